#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "dcl/bmo.hpp"
#include "dcl/report.hpp"
#include "dcl/shift.hpp"

namespace dcl {

// GridFunction: {dimension, resolution, values: [re | [re, im], ...]} in row-major order.

inline json to_json(const GridFunction& f) {
  json values = json::array();
  for (const auto& v : f.values()) {
    if (v.imag() == 0.0) values.push_back(v.real());
    else values.push_back(json::array({v.real(), v.imag()}));
  }
  return {{"dimension", f.dimension()}, {"resolution", f.resolution()}, {"values", std::move(values)}};
}

namespace detail {

inline scalar scalar_from_json(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw format_error("expected a number or [re, im], got " + v.dump());
}

inline DyadicInterval interval_from_json(const json& v) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
    throw format_error("expected [level, index], got " + v.dump());
  }
  const int level = v[0].get<int>();
  const auto index = v[1].get<std::int64_t>();
  if (level < 0 || level > 62 || index < 0 || index >= (std::int64_t{1} << level)) {
    throw format_error("not a dyadic interval of [0,1): " + v.dump());
  }
  return {level, index};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw format_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace detail

inline GridFunction grid_function_from_json(const json& j) {
  try {
    const int d = j.at("dimension").get<int>();
    const int n = j.at("resolution").get<int>();
    GridFunction f(d, n);
    const auto& values = j.at("values");
    if (!values.is_array() || values.size() != f.size()) {
      throw format_error("expected " + std::to_string(f.size()) + " values");
    }
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = detail::scalar_from_json(values[k]);
    return f;
  } catch (const json::exception& e) {
    throw format_error(std::string("grid function: ") + e.what());
  }
}

/// One value per line ("re" or "re,im"); 1D only. The line count fixes the resolution.
inline std::string to_csv(const GridFunction& f) {
  if (f.dimension() != 1) throw dimension_mismatch("CSV output is one-dimensional");
  std::ostringstream out;
  out.precision(17);
  for (const auto& v : f.values()) {
    out << v.real();
    if (v.imag() != 0.0) out << ',' << v.imag();
    out << '\n';
  }
  return out.str();
}

inline GridFunction grid_function_from_csv(const std::string& text) {
  std::vector<scalar> values;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double re = 0.0, im = 0.0;
    if (!(fields >> re)) throw format_error("bad CSV line '" + line + "'");
    if (!(fields >> im)) im = 0.0;
    values.emplace_back(re, im);
  }
  int n = 0;
  while ((std::size_t{1} << n) < values.size()) ++n;
  if (values.empty() || (std::size_t{1} << n) != values.size()) {
    throw format_error("CSV holds " + std::to_string(values.size()) + " values, not a power of two");
  }
  GridFunction f(1, n);
  for (std::size_t k = 0; k < values.size(); ++k) f[k] = values[k];
  return f;
}

/// Reads JSON, or CSV when the path ends in ".csv".
inline GridFunction load_grid_function(const std::string& path) {
  const auto text = detail::read_file(path);
  if (detail::has_suffix(path, ".csv")) return grid_function_from_csv(text);
  try {
    return grid_function_from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    throw format_error("'" + path + "': " + e.what());
  }
}

inline Weight load_weight(const std::string& path) {
  auto f = load_grid_function(path);
  try {
    return Weight(std::move(f));
  } catch (const parameter_out_of_range&) {
    throw format_error("'" + path + "' is not a strictly positive weight");
  }
}

// ShiftSpec: {complexity:[i,j], prefactor, scale_filter, entries:[{I, K, L, c:[re,im]}]}.
// An optional "coefficient_bound" is honoured; otherwise the largest |c| (or 1) is used.

inline json to_json(const ShiftSpec& spec) {
  json entries = json::array();
  for (const auto& [interval, block] : spec.blocks()) {
    const auto ks = descendants(interval, spec.input_depth(), interval.level + spec.input_depth());
    const auto ls = descendants(interval, spec.output_depth(), interval.level + spec.output_depth());
    for (std::size_t k = 0; k < ks.size(); ++k) {
      for (std::size_t l = 0; l < ls.size(); ++l) {
        const scalar c = block[k * ls.size() + l];
        if (c == scalar{}) continue;
        entries.push_back({{"I", to_json(interval)}, {"K", to_json(ks[k])}, {"L", to_json(ls[l])},
                           {"c", json::array({c.real(), c.imag()})}});
      }
    }
  }
  return {{"complexity", {spec.input_depth(), spec.output_depth()}},
          {"prefactor", spec.prefactor()},
          {"coefficient_bound", spec.coefficient_bound()},
          {"scale_filter", spec.scale_filter() == ScaleFilter::even ? "even" : "all"},
          {"entries", std::move(entries)}};
}

inline ShiftSpec shift_spec_from_json(const json& j) {
  try {
    const auto& cx = j.at("complexity");
    if (!cx.is_array() || cx.size() != 2) throw format_error("complexity must be [i, j]");
    const std::string filter = j.value("scale_filter", "all");
    if (filter != "all" && filter != "even") throw format_error("scale_filter must be \"all\" or \"even\"");
    const auto& entries = j.at("entries");
    if (!entries.is_array()) throw format_error("entries must be an array");
    double bound = 0.0;
    for (const auto& e : entries) bound = std::max(bound, std::abs(detail::scalar_from_json(e.at("c"))));
    if (j.contains("coefficient_bound")) bound = j.at("coefficient_bound").get<double>();
    else if (bound == 0.0) bound = 1.0;
    ShiftSpec spec(cx[0].get<int>(), cx[1].get<int>(), j.at("prefactor").get<double>(), bound,
                   filter == "even" ? ScaleFilter::even : ScaleFilter::all);
    for (const auto& e : entries) {
      spec.set(detail::interval_from_json(e.at("I")), detail::interval_from_json(e.at("K")),
               detail::interval_from_json(e.at("L")), detail::scalar_from_json(e.at("c")));
    }
    return spec;
  } catch (const json::exception& e) {
    throw format_error(std::string("shift spec: ") + e.what());
  } catch (const parameter_out_of_range& e) {
    throw format_error(std::string("shift spec: ") + e.what());
  }
}

inline ShiftSpec load_shift_spec(const std::string& path) {
  try {
    return shift_spec_from_json(json::parse(detail::read_file(path)));
  } catch (const json::parse_error& e) {
    throw format_error("'" + path + "': " + e.what());
  }
}

/// One row per record: name,pass,measured,bound,tolerance.
inline std::string to_csv(const VerificationReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "name,pass,measured,bound,tolerance\n";
  for (const auto& r : report.records) {
    std::string name = r.name;
    for (std::size_t k = name.find('"'); k != std::string::npos; k = name.find('"', k + 2)) name.insert(k, 1, '"');
    out << '"' << name << "\"," << (r.pass ? "true" : "false") << ',' << r.measured << ',' << r.bound << ','
        << r.tolerance << '\n';
  }
  return out.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw format_error("cannot write '" + path + "'");
  out << text;
}

}  // namespace dcl
