#pragma once

#include <stdexcept>
#include <string>

namespace dcl {

/// Base class of every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class root_has_no_parent : public error {
 public:
  root_has_no_parent() : error("the root interval [0,1) has no parent or sibling") {}
};

class resolution_exceeded : public error {
 public:
  explicit resolution_exceeded(const std::string& what) : error("resolution exceeded: " + what) {}
};

class dimension_too_large : public error {
 public:
  explicit dimension_too_large(const std::string& what) : error("dimension too large: " + what) {}
};

class dimension_mismatch : public error {
 public:
  explicit dimension_mismatch(const std::string& what) : error("dimension mismatch: " + what) {}
};

class parameter_out_of_range : public error {
 public:
  explicit parameter_out_of_range(const std::string& what) : error("parameter out of range: " + what) {}
};

class nesting_mismatch : public error {
 public:
  explicit nesting_mismatch(const std::string& what) : error("nesting mismatch: " + what) {}
};

class nondegeneracy_required : public error {
 public:
  explicit nondegeneracy_required(const std::string& what) : error("non-degeneracy required: " + what) {}
};

class target_unreachable : public error {
 public:
  explicit target_unreachable(const std::string& what) : error("target unreachable: " + what) {}
};

/// Malformed input file or unreadable path.
class format_error : public error {
 public:
  explicit format_error(const std::string& what) : error("format error: " + what) {}
};

/// Invalid suite or command configuration, detected before any work is done.
class config_error : public error {
 public:
  explicit config_error(const std::string& what) : error("config error: " + what) {}
};

}  // namespace dcl
