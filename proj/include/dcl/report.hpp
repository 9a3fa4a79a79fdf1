#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

#include "dcl/dyadic.hpp"

namespace dcl {

using json = nlohmann::ordered_json;

inline json to_json(const DyadicInterval& interval) { return json::array({interval.level, interval.index}); }
inline json to_json(const DyadicRectangle& rect) { return json::array({to_json(rect.first), to_json(rect.second)}); }

/// One pass/fail record: a measured quantity compared against a bound.
struct CheckRecord {
  std::string name;
  bool pass = true;
  double measured = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  json witness;  // null when there is nothing to point at

  json to_json() const {
    json j;
    j["name"] = name;
    j["pass"] = pass;
    j["measured"] = measured;
    j["bound"] = bound;
    j["tolerance"] = tolerance;
    j["witness"] = witness;
    return j;
  }
};

/// Structured result of a check or of a whole suite.
struct VerificationReport {
  std::string check;
  json parameters = json::object();
  std::vector<CheckRecord> records;
  std::vector<json> counterexamples;
  std::size_t counterexample_count = 0;  // may exceed counterexamples.size() when truncated
  double worst_ratio = std::numeric_limits<double>::quiet_NaN();
  double max_constant = 0.0;

  static constexpr std::size_t max_listed_counterexamples = 64;

  bool pass() const {
    return counterexample_count == 0 &&
           std::all_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.pass; });
  }
  std::size_t passes() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.pass; }));
  }
  std::size_t failures() const { return records.size() - passes(); }

  void add(CheckRecord record) { records.push_back(std::move(record)); }

  /// Records a measured <= bound check with relative slack.
  CheckRecord& expect_le(std::string name, double measured, double bound, double tolerance, json witness = {}) {
    const bool ok = measured <= bound + tolerance * std::max(1.0, std::abs(bound));
    records.push_back({std::move(name), ok, measured, bound, tolerance, std::move(witness)});
    return records.back();
  }

  /// Records |measured - expected| <= tolerance * max(1, |expected|).
  CheckRecord& expect_near(std::string name, double measured, double expected, double tolerance, json witness = {}) {
    const bool ok = std::abs(measured - expected) <= tolerance * std::max(1.0, std::abs(expected));
    records.push_back({std::move(name), ok, measured, expected, tolerance, std::move(witness)});
    return records.back();
  }

  void add_counterexample(json c) {
    ++counterexample_count;
    if (counterexamples.size() < max_listed_counterexamples) counterexamples.push_back(std::move(c));
  }

  json to_json() const {
    json j;
    j["check"] = check;
    j["parameters"] = parameters;
    j["pass"] = pass();
    j["worst_ratio"] = std::isfinite(worst_ratio) ? json(worst_ratio) : json(nullptr);
    j["counterexamples"] = counterexamples;
    j["counterexample_count"] = counterexample_count;
    json recs = json::array();
    for (const auto& r : records) recs.push_back(r.to_json());
    j["records"] = recs;
    j["summary"] = {{"passes", passes()}, {"failures", failures()}, {"max_constant", max_constant}};
    return j;
  }
};

}  // namespace dcl
