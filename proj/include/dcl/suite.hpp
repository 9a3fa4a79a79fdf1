#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dcl/bmo.hpp"
#include "dcl/commutator.hpp"
#include "dcl/kernel.hpp"
#include "dcl/random.hpp"
#include "dcl/report.hpp"

namespace dcl {

struct Tolerances {
  double identity = 1e-10;      // exact identities, relative
  double reproduction = 1e-9;   // reproduction formulas, relative to the target
  double slack = 1e-12;         // inequalities
  double null = 1e-12;          // quantities that vanish identically
};

/// Everything a suite run depends on. Unset optionals take suite defaults in validate_config.
struct SuiteConfig {
  std::string suite;
  std::optional<int> resolution;
  std::optional<int> dimension;
  double p = 2.0;
  std::uint64_t seed = 0;
  std::optional<int> trials;
  Tolerances tolerances;
  std::string output;

  SymbolProfile profile = SymbolProfile::haar_gaussian;
  double weight_target = 4.0;
  std::string family = "both";  // nondegeneracy: purely-mixing | sliced | both
  std::optional<int> complexity;
  std::optional<double> modulus;

  // user-supplied inputs replace the generated ones
  std::optional<GridFunction> symbol;
  std::optional<ShiftSpec> spec;
  std::optional<double> constant;
  std::optional<Weight> mu;
  std::optional<Weight> lambda;
};

namespace detail {

struct SuiteInfo {
  const char* name;
  int default_dimension;
  bool any_dimension;
  bool materializes;
  int trials_1d;
  int trials_2d;
};

inline constexpr SuiteInfo suite_table[] = {
    {"identities-1d", 1, false, false, 50, 0},   {"identities-2d", 2, false, false, 0, 20},
    {"iterated-rect", 2, false, false, 0, 20},   {"kernel-tensor", 2, false, true, 0, 10},
    {"kernel-general", 1, false, true, 20, 0},   {"nondegeneracy", 1, false, false, 50, 0},
    {"weighted-bloom", 2, true, true, 20, 20},   {"two-sided", 1, true, true, 100, 20},
};

inline const SuiteInfo* find_suite(const std::string& name) {
  for (const auto& s : suite_table)
    if (name == s.name) return &s;
  return nullptr;
}

inline std::string suite_names() {
  std::string out;
  for (const auto& s : suite_table) out += (out.empty() ? "" : ", ") + std::string(s.name);
  return out;
}

// splitmix64 over (seed, stream, trial)
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream * 0x100000001b3ULL + trial + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline bool purely_mixing_modulus_ok(int i, double b) {
  const double two_i = std::ldexp(1.0, i);
  return b >= 1.0 && b < two_i / (two_i - 1.0);
}

}  // namespace detail

/// Fills defaults and checks every invariant; throws config_error before any work is done.
inline SuiteConfig validate_config(SuiteConfig cfg) {
  const auto* info = detail::find_suite(cfg.suite);
  if (info == nullptr) {
    throw config_error("unknown suite '" + cfg.suite + "' (expected one of: " + detail::suite_names() + ")");
  }
  if (cfg.symbol && !cfg.dimension) cfg.dimension = cfg.symbol->dimension();
  const int d = cfg.dimension.value_or(info->default_dimension);
  if (d != info->default_dimension && !(info->any_dimension && (d == 1 || d == 2))) {
    throw config_error("suite " + cfg.suite + " does not run in dimension " + std::to_string(d));
  }
  cfg.dimension = d;
  if (cfg.symbol && !cfg.resolution) cfg.resolution = cfg.symbol->resolution();
  const int n = cfg.resolution.value_or(d == 1 ? 8 : 5);
  cfg.resolution = n;
  const bool shift_family = cfg.suite == "kernel-general" || cfg.suite == "nondegeneracy";
  const int min_n = shift_family && !cfg.spec ? 4 : 2;
  if (n < min_n) throw config_error("suite " + cfg.suite + " needs resolution >= " + std::to_string(min_n));
  if (info->materializes && n * d > max_materialized_cells_log2) {
    throw config_error("resolution x dimension must be <= " + std::to_string(max_materialized_cells_log2) +
                       " for suites that materialize operators");
  }
  if (n * d > 16) throw config_error("resolution x dimension must be <= 16");
  if (!(cfg.p > 1.0) || !std::isfinite(cfg.p)) throw config_error("p must be a finite number > 1");
  if (cfg.suite == "two-sided" && cfg.p != 2.0) throw config_error("two-sided compares exact L^2 norms; p must be 2");
  if (cfg.symbol) {
    if (cfg.symbol->dimension() != d || cfg.symbol->resolution() != n) {
      throw config_error("symbol shape does not match dimension/resolution");
    }
    if (cfg.trials && *cfg.trials != 1) throw config_error("a supplied symbol runs exactly one trial");
    cfg.trials = 1;
  }
  if (!cfg.trials) cfg.trials = d == 1 ? info->trials_1d : info->trials_2d;
  if (*cfg.trials < 1) throw config_error("trial count must be >= 1");
  const auto& t = cfg.tolerances;
  for (double v : {t.identity, t.reproduction, t.slack, t.null}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw config_error("tolerances must be positive");
  }
  if (!(cfg.weight_target >= 1.0) || !std::isfinite(cfg.weight_target)) {
    throw config_error("weight target characteristic must be >= 1");
  }
  for (const auto* w : {&cfg.mu, &cfg.lambda}) {
    if (*w && ((*w)->dimension() != d || (*w)->resolution() != n)) {
      throw config_error("weight shape does not match dimension/resolution");
    }
  }
  if ((cfg.mu || cfg.lambda) && cfg.suite != "weighted-bloom") {
    throw config_error("weights are only used by weighted-bloom");
  }
  if (cfg.spec) {
    if (!shift_family) throw config_error("a shift spec is only used by kernel-general and nondegeneracy");
    try {
      cfg.spec->require_resolution(n);
    } catch (const error& e) {
      throw config_error(e.what());
    }
    if (n - 1 - cfg.spec->max_depth() < 0) throw config_error("the grid does not resolve the shift's complexity");
  }
  if (cfg.constant && !(*cfg.constant > 0.0)) throw config_error("non-degeneracy constant must be positive");
  if (cfg.family != "both" && cfg.family != "purely-mixing" && cfg.family != "sliced") {
    throw config_error("family must be purely-mixing, sliced or both");
  }
  if (cfg.complexity) {
    const int i = *cfg.complexity;
    const bool pm = cfg.family != "sliced";
    if (i < (pm ? 1 : 0) || n - 1 - i < 0) throw config_error("complexity out of range for this grid");
  }
  if (cfg.modulus) {
    const double b = *cfg.modulus;
    if (cfg.family != "sliced") {
      for (int i : cfg.complexity ? std::vector<int>{*cfg.complexity} : std::vector<int>{1, 2}) {
        if (!detail::purely_mixing_modulus_ok(i, b)) {
          throw config_error("purely mixing modulus must lie in [1, 2^i/(2^i-1)) for i = " + std::to_string(i));
        }
      }
    }
    if (cfg.family != "purely-mixing" && !(b >= 1.0 && b < 3.0)) {
      throw config_error("sliced modulus must lie in [1, 3)");
    }
  }
  return cfg;
}

inline json to_json(const SuiteConfig& cfg) {
  json j;
  j["suite"] = cfg.suite;
  j["dimension"] = cfg.dimension ? json(*cfg.dimension) : json(nullptr);
  j["resolution"] = cfg.resolution ? json(*cfg.resolution) : json(nullptr);
  j["p"] = cfg.p;
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials ? json(*cfg.trials) : json(nullptr);
  j["tolerances"] = {{"identity", cfg.tolerances.identity},
                     {"reproduction", cfg.tolerances.reproduction},
                     {"slack", cfg.tolerances.slack},
                     {"null", cfg.tolerances.null}};
  j["symbol"] = cfg.symbol ? "supplied" : to_string(cfg.profile);
  if (cfg.suite == "weighted-bloom") {
    j["weights"] = {{"mu", cfg.mu ? json("supplied") : json("random")},
                    {"lambda", cfg.lambda ? json("supplied") : json("random")},
                    {"target_characteristic", cfg.weight_target}};
  }
  if (cfg.suite == "kernel-general" || cfg.suite == "nondegeneracy") {
    j["shift"] = cfg.spec ? json("supplied") : json(cfg.family);
    if (cfg.complexity) j["complexity"] = *cfg.complexity;
    if (cfg.modulus) j["modulus"] = *cfg.modulus;
    if (cfg.constant) j["constant"] = *cfg.constant;
  }
  if (!cfg.output.empty()) j["output"] = cfg.output;
  return j;
}

namespace detail {

struct TrialResult {
  std::vector<CheckRecord> records;
  std::vector<json> counterexamples;
  double max_constant = 0.0;
};

// Worst relative deviation over many regions, folded into one record per trial.
class Tally {
 public:
  Tally(std::string name, double tolerance, int trial) : name_(std::move(name)), tolerance_(tolerance), trial_(trial) {}

  /// deviation / max(scale, floor) must not exceed the tolerance
  void deviation(const json& region, double deviation, double scale, double floor, json extra = {}) {
    const double err = deviation / std::max(scale, floor);
    observe(region, err, std::move(extra));
  }

  void near(const json& region, double lhs, double rhs, double floor) {
    deviation(region, std::abs(lhs - rhs), std::abs(rhs), floor, {{"lhs", lhs}, {"rhs", rhs}});
  }

  /// relative excess of lhs over rhs
  void at_most(const json& region, double lhs, double rhs, double floor) {
    observe(region, (lhs - rhs) / std::max(std::abs(rhs), floor), {{"lhs", lhs}, {"rhs", rhs}});
  }

  void fail(const json& region, const std::string& what) {
    observe(region, std::numeric_limits<double>::infinity(), {{"error", what}});
  }

  void finish(TrialResult& out) {
    json witness = {{"trial", trial_}, {"region", worst_region_}};
    if (!worst_extra_.is_null()) witness["detail"] = worst_extra_;
    const bool ok = seen_ == 0 || worst_ <= tolerance_;
    out.records.push_back({name_, ok, seen_ == 0 ? 0.0 : worst_, 0.0, tolerance_, std::move(witness)});
    for (auto& c : failures_) out.counterexamples.push_back(std::move(c));
  }

 private:
  void observe(const json& region, double err, json extra) {
    if (seen_++ == 0 || std::isnan(err) || err > worst_) {
      worst_ = err;
      worst_region_ = region;
      worst_extra_ = extra;
    }
    if (!(err <= tolerance_)) {
      json c = {{"check", name_}, {"trial", trial_}, {"region", region}, {"error", err}};
      if (!extra.is_null()) c["detail"] = std::move(extra);
      failures_.push_back(std::move(c));
    }
  }

  std::string name_;
  double tolerance_;
  int trial_;
  std::size_t seen_ = 0;
  double worst_ = 0.0;
  json worst_region_;
  json worst_extra_;
  std::vector<json> failures_;
};

inline double sq(double x) { return x * x; }

inline GridFunction trial_symbol(const SuiteConfig& cfg, int trial) {
  if (cfg.symbol) return *cfg.symbol;
  return random_symbol(trial_seed(cfg.seed, 1, static_cast<std::uint64_t>(trial)), *cfg.dimension, *cfg.resolution,
                       cfg.profile);
}

inline Operator commutator_base(int dimension, int n) {
  return dimension == 1 ? shift_operator(n) : tensor_shift_operator(n);
}

inline void add_bound_record(TrialResult& out, const std::string& name, const KernelBoundReport& r, int trial,
                             json extra = {}) {
  json witness = {{"trial", trial},
                  {"constant", r.constant},
                  {"reference", r.reference.to_json()},
                  {"reference_is_estimate", r.reference_is_estimate}};
  const KernelBoundReport::Row* worst = nullptr;
  for (const auto& row : r.rows) {
    if (worst == nullptr || row.lhs > worst->lhs) worst = &row;
    if (!row.pass) {
      out.counterexamples.push_back(
          {{"check", name}, {"trial", trial}, {"region", row.region}, {"lhs", row.lhs}, {"bound", row.bound}});
    }
  }
  if (worst != nullptr) witness["largest_lhs_region"] = worst->region;
  if (!extra.is_null()) witness["detail"] = std::move(extra);
  out.records.push_back({name, r.pass(), r.max_ratio, 1.0, KernelBoundReport::slack, std::move(witness)});
  // smallest constant the data would allow
  out.max_constant = std::max(out.max_constant, r.max_ratio * r.constant);
}

// ---- suites ---------------------------------------------------------------

inline TrialResult identities_1d(const SuiteConfig& cfg, int trial) {
  const int n = *cfg.resolution;
  const auto b = trial_symbol(cfg, trial);
  const CommutatorOp c(shift_operator(n), b);
  const double scale = std::max(sq(b.max_abs()), std::numeric_limits<double>::min());
  Tally testing("testing identity", cfg.tolerances.identity, trial);
  Tally support("outside part invisible on the parent", cfg.tolerances.identity, trial);
  for (const auto& i : all_intervals(n, 1)) {
    const double floor = 1e-6 * i.length() * scale;
    const double rhs = i.length() * weighted_oscillation(b, i, 2.0, nullptr, nullptr);
    testing.near(to_json(i), testing_mass(c, i), rhs, floor);
    const CommutatorOp outer(shift_operator(n), local_projection(b, i, ProjectionPart::outside));
    support.deviation(to_json(i), testing_mass(outer, i), 0.0, floor);
  }
  TrialResult out;
  testing.finish(out);
  support.finish(out);
  return out;
}

inline TrialResult identities_2d(const SuiteConfig& cfg, int trial) {
  const int n = *cfg.resolution;
  const auto b = trial_symbol(cfg, trial);
  const double scale = std::max(sq(b.max_abs()), std::numeric_limits<double>::min());
  Tally total("tensor testing identity", cfg.tolerances.identity, trial);
  Tally inside("in-square mass <= oscillation", cfg.tolerances.slack, trial);
  const auto intervals = all_intervals(n, 1);
  for (const auto& i : intervals) {
    for (const auto& j : intervals) {
      const DyadicRectangle r{i, j};
      const double floor = 1e-6 * r.area() * scale;
      const double rhs = r.area() * weighted_oscillation(b, r, 2.0, nullptr, nullptr);
      const auto m = tensor_testing_mass(b, r);
      total.near(to_json(r), m.total(), rhs, floor);
      inside.at_most(to_json(r), m.inside, rhs, floor);
    }
  }
  TrialResult out;
  total.finish(out);
  inside.finish(out);
  return out;
}

inline TrialResult iterated_rect(const SuiteConfig& cfg, int trial) {
  const int n = *cfg.resolution;
  const auto b = trial_symbol(cfg, trial);
  const auto additive = random_symbol(trial_seed(cfg.seed, 2, static_cast<std::uint64_t>(trial)), 2, n,
                                      SymbolProfile::additive);
  const double scale = std::max(sq(b.max_abs()), std::numeric_limits<double>::min());
  const double additive_scale = std::max(1.0, additive.max_abs());
  Tally identity("iterated testing identity", cfg.tolerances.identity, trial);
  Tally null("additive symbol annihilated", cfg.tolerances.null, trial);
  const auto intervals = all_intervals(n, 1);
  for (const auto& i : intervals) {
    for (const auto& j : intervals) {
      const DyadicRectangle r{i, j};
      const auto region = to_json(r);
      const double rhs = r.area() * rectangular_oscillation(b, r);
      try {
        identity.near(region, iterated_testing_mass(b, r), rhs, 1e-6 * r.area() * scale);
      } catch (const nesting_mismatch& e) {
        identity.fail(region, e.what());
      }
      try {
        const auto out = iterated_commutator_apply(additive, GridFunction::indicator(r, n));
        null.deviation(region, out.max_abs(), additive_scale, 0.0);
      } catch (const nesting_mismatch& e) {
        null.fail(region, e.what());
      }
    }
  }
  TrialResult out;
  identity.finish(out);
  null.finish(out);
  return out;
}

// Materialized S1S2 against the minimal-rectangle kernel on every cell pair.
inline TrialResult tensor_kernel_matrix(const SuiteConfig& cfg) {
  const int n = *cfg.resolution;
  const auto m = materialize(tensor_shift_operator(n));
  const std::int64_t side = std::int64_t{1} << n;
  const double inv_vol = std::ldexp(1.0, 2 * n);
  Tally t("kernel equals materialized operator", cfg.tolerances.identity, -1);
  double worst = -1.0;
  json worst_pair;
  for (std::int64_t x = 0; x < side * side; ++x) {
    for (std::int64_t y = 0; y < side * side; ++y) {
      const Point2 px{{n, x / side}, {n, x % side}};
      const Point2 py{{n, y / side}, {n, y % side}};
      const double k = tensor_kernel(px, py);
      const double err = std::abs(m(x, y) * inv_vol - k) / std::max(1.0, std::abs(k));
      if (err > worst) {
        worst = err;
        worst_pair = {{"x", x}, {"y", y}, {"kernel", k}};
      }
    }
  }
  t.deviation(worst_pair, worst, 1.0, 1.0);
  TrialResult out;
  t.finish(out);
  return out;
}

inline TrialResult kernel_tensor(const SuiteConfig& cfg, int trial) {
  const int n = *cfg.resolution;
  const auto b = trial_symbol(cfg, trial);
  TrialResult out;

  Tally integration("kernel integration matches the operator", cfg.tolerances.identity, trial);
  const auto f = random_symbol(trial_seed(cfg.seed, 3, static_cast<std::uint64_t>(trial)), 2, n,
                               SymbolProfile::haar_gaussian);
  const auto direct = apply_tensor_shift(f);
  integration.deviation(nullptr, (integrate_tensor_kernel(f) - direct).max_abs(), direct.max_abs(), f.max_abs());
  integration.finish(out);

  Tally repro("tensor reproduction", cfg.tolerances.reproduction, trial);
  const auto coarse = all_intervals(n - 2);
  for (const auto& i : coarse) {
    for (const auto& j : coarse) {
      const DyadicRectangle r{i, j};
      const auto target = reproduction_target(b, r);
      const auto diff = (reproduce_symbol_tensor(b, r) - target).max_abs();
      repro.deviation(to_json(r), diff, target.max_abs(), 1e-6 * r.area() * std::max(b.max_abs(), 1e-300));
    }
  }
  repro.finish(out);

  const auto one = Weight::constant(2, n);
  add_bound_record(out, "kernel lower bound",
                   kernel_lower_bound(b, cfg.p, one, one, BoundTarget::tensor(), trial_seed(cfg.seed, 6, trial)),
                   trial);
  return out;
}

struct GeneratedShift {
  ShiftSpec spec;
  double c = 0.0;
  json description;
};

inline GeneratedShift purely_mixing_for(const SuiteConfig& cfg, int trial, int i) {
  std::mt19937_64 rng(trial_seed(cfg.seed, 7, static_cast<std::uint64_t>(trial)));
  const double upper = std::ldexp(1.0, i) / (std::ldexp(1.0, i) - 1.0);
  const double b = cfg.modulus ? *cfg.modulus : std::uniform_real_distribution<double>(1.0, upper)(rng);
  return {make_purely_mixing(i, b, trial_seed(cfg.seed, 8, trial), *cfg.resolution), purely_mixing_constant(i, b),
          {{"family", "purely-mixing"}, {"i", i}, {"b", b}}};
}

inline GeneratedShift sliced_for(const SuiteConfig& cfg, int trial, int i, int j) {
  std::mt19937_64 rng(trial_seed(cfg.seed, 9, static_cast<std::uint64_t>(trial)));
  const double b = cfg.modulus ? *cfg.modulus : std::uniform_real_distribution<double>(1.0, 3.0)(rng);
  return {make_sliced(i, j, b, trial_seed(cfg.seed, 10, trial), *cfg.resolution), sliced_constant(b),
          {{"family", "sliced"}, {"i", i}, {"j", j}, {"b", b}}};
}

inline GeneratedShift supplied_shift(const SuiteConfig& cfg) {
  const double c = cfg.constant ? *cfg.constant : minimal_nondegeneracy_constant(*cfg.spec, *cfg.resolution);
  return {*cfg.spec, c, {{"family", "supplied"}}};
}

inline TrialResult kernel_general(const SuiteConfig& cfg, int trial) {
  const int n = *cfg.resolution;
  GeneratedShift g;
  if (cfg.spec) {
    g = supplied_shift(cfg);
  } else {
    switch (trial % 3) {
      case 0: g = purely_mixing_for(cfg, trial, cfg.complexity.value_or(1)); break;
      case 1: g = purely_mixing_for(cfg, trial, cfg.complexity.value_or(2)); break;
      default: g = sliced_for(cfg, trial, cfg.complexity.value_or((trial / 3) % 3), cfg.complexity.value_or((trial / 9) % 3));
    }
  }
  g.description["c"] = std::isfinite(g.c) ? json(g.c) : json(nullptr);
  const auto b = trial_symbol(cfg, trial);
  TrialResult out;

  Tally integration("kernel integration matches the operator", cfg.tolerances.identity, trial);
  const auto f = random_symbol(trial_seed(cfg.seed, 3, static_cast<std::uint64_t>(trial)), 1, n,
                               SymbolProfile::haar_gaussian);
  const auto direct = apply_general_shift(g.spec, f);
  integration.deviation(g.description, (integrate_general_kernel(g.spec, f) - direct).max_abs(), direct.max_abs(),
                        f.max_abs());
  integration.finish(out);

  if (!std::isfinite(g.c)) {
    out.records.push_back({"shift is non-degenerate", false, g.c, 0.0, 0.0, {{"trial", trial}, {"shift", g.description}}});
    out.counterexamples.push_back({{"check", "shift is non-degenerate"}, {"trial", trial}, {"shift", g.description}});
    return out;
  }

  Tally repro("general reproduction", cfg.tolerances.reproduction, trial);
  for (const auto& j : all_intervals(n - 1 - g.spec.max_depth())) {
    const auto target = reproduction_target(b, j);
    try {
      const auto diff = (reproduce_symbol_general(g.spec, b, j) - target).max_abs();
      repro.deviation(to_json(j), diff, target.max_abs(), 1e-6 * j.length() * std::max(b.max_abs(), 1e-300));
    } catch (const nondegeneracy_required& e) {
      repro.fail(to_json(j), e.what());
    }
  }
  repro.finish(out);

  const auto one = Weight::constant(1, n);
  add_bound_record(out, "kernel lower bound",
                   kernel_lower_bound(b, cfg.p, one, one, BoundTarget::general(g.spec, g.c),
                                      trial_seed(cfg.seed, 6, trial)),
                   trial, g.description);
  return out;
}

inline void absorb_nondegeneracy(TrialResult& out, const std::string& name, const VerificationReport& r, int trial,
                                 const json& description) {
  json witness = {{"trial", trial}, {"shift", description}};
  if (!r.counterexamples.empty()) witness["first_counterexample"] = r.counterexamples.front();
  out.records.push_back({name, r.pass(), r.worst_ratio, 1.0, detail::inequality_slack, std::move(witness)});
  for (const auto& c : r.counterexamples) {
    json cc = c;
    cc["check"] = name;
    cc["trial"] = trial;
    out.counterexamples.push_back(std::move(cc));
  }
}

// Zeroes one off-diagonal coefficient of a complexity (1,1) purely mixing shift.
// With i = 1 no ancestor reaches the reduced coefficients below the zeroed pair,
// so exactly the four pairs (K', L') with K' in K, L' in L must be reported.
inline TrialResult degenerate_witness(const SuiteConfig& cfg, int trial) {
  const int n = *cfg.resolution;
  std::mt19937_64 rng(trial_seed(cfg.seed, 11, static_cast<std::uint64_t>(trial)));
  const double b = std::uniform_real_distribution<double>(1.0, 2.0)(rng);
  auto spec = make_purely_mixing(1, b, trial_seed(cfg.seed, 12, trial), n);
  const auto intervals = all_intervals(n - 2);
  const auto i0 = intervals[std::uniform_int_distribution<std::size_t>(0, intervals.size() - 1)(rng)];
  const bool flip = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
  const auto k0 = flip ? i0.right_child() : i0.left_child();
  const auto l0 = flip ? i0.left_child() : i0.right_child();
  spec.set(i0, k0, l0, 0.0);
  const double c = purely_mixing_constant(1, b);
  const auto r = check_nondegeneracy(spec, n, c);
  bool located = r.counterexample_count == 4;
  for (const auto& w : r.counterexamples) {
    const DyadicInterval wi(w["I"][0].get<int>(), w["I"][1].get<std::int64_t>());
    const DyadicInterval wk(w["K"][0].get<int>(), w["K"][1].get<std::int64_t>());
    const DyadicInterval wl(w["L"][0].get<int>(), w["L"][1].get<std::int64_t>());
    located = located && wi == i0 && k0.contains(wk) && l0.contains(wl) && w["value"].get<double>() == 0.0;
  }
  json witness = {{"trial", trial},
                  {"zeroed", {{"I", to_json(i0)}, {"K", to_json(k0)}, {"L", to_json(l0)}}},
                  {"reported", r.counterexample_count}};
  TrialResult out;
  const bool ok = !r.pass() && located;
  out.records.push_back({"degenerate shift rejected at the zeroed pair", ok, static_cast<double>(r.counterexample_count),
                         4.0, 0.0, witness});
  if (!ok) {
    witness["check"] = "degenerate shift rejected at the zeroed pair";
    out.counterexamples.push_back(std::move(witness));
  }
  return out;
}

inline TrialResult nondegeneracy(const SuiteConfig& cfg, int trial) {
  const int n = *cfg.resolution;
  TrialResult out;
  if (cfg.spec) {
    const auto g = supplied_shift(cfg);
    if (!std::isfinite(g.c)) {
      out.records.push_back({"non-degeneracy certificate", false, 0.0, 1.0, 0.0, {{"trial", trial}, {"reason", "a reduced coefficient vanishes"}}});
      out.counterexamples.push_back({{"check", "non-degeneracy certificate"}, {"reason", "a reduced coefficient vanishes"}});
      return out;
    }
    json d = g.description;
    d["c"] = g.c;
    absorb_nondegeneracy(out, "non-degeneracy certificate", check_nondegeneracy(g.spec, n, g.c), trial, d);
    return out;
  }
  if (cfg.family != "sliced") {
    auto g = purely_mixing_for(cfg, trial, cfg.complexity.value_or(1 + trial % 2));
    g.description["c"] = g.c;
    absorb_nondegeneracy(out, "purely-mixing certificate", check_nondegeneracy(g.spec, n, g.c), trial, g.description);
  }
  if (cfg.family != "purely-mixing") {
    auto g = sliced_for(cfg, trial, cfg.complexity.value_or(trial % 3), cfg.complexity.value_or((trial / 3) % 3));
    g.description["c"] = g.c;
    absorb_nondegeneracy(out, "sliced certificate", check_nondegeneracy(g.spec, n, g.c), trial, g.description);
  }
  auto degenerate = degenerate_witness(cfg, trial);
  for (auto& r : degenerate.records) out.records.push_back(std::move(r));
  for (auto& c : degenerate.counterexamples) out.counterexamples.push_back(std::move(c));
  return out;
}

inline TrialResult weighted_bloom(const SuiteConfig& cfg, int trial) {
  const int n = *cfg.resolution;
  const int d = *cfg.dimension;
  const auto b = trial_symbol(cfg, trial);
  TrialResult out;
  auto weight = [&](const std::optional<Weight>& supplied, std::uint64_t stream, const char* name) -> std::optional<Weight> {
    if (supplied) return supplied;
    try {
      auto w = random_ap_weight(trial_seed(cfg.seed, stream, trial), d, n, cfg.p, cfg.weight_target);
      const double a = ap_characteristic(w, cfg.p);
      out.records.push_back({std::string("A_p characteristic of ") + name, a <= cfg.weight_target, a,
                             cfg.weight_target, 0.0, {{"trial", trial}}});
      return w;
    } catch (const target_unreachable& e) {
      out.records.push_back({std::string("A_p characteristic of ") + name, false, 0.0, cfg.weight_target, 0.0,
                             {{"trial", trial}, {"error", e.what()}}});
      out.counterexamples.push_back({{"check", "weight generation"}, {"trial", trial}, {"error", e.what()}});
      return std::nullopt;
    }
  };
  const auto mu = weight(cfg.mu, 4, "mu");
  const auto lambda = weight(cfg.lambda, 5, "lambda");
  if (!mu || !lambda) return out;

  const auto target = d == 2 ? BoundTarget::tensor()
                             : BoundTarget::general(ShiftSpec::encoding_of_S(n),
                                                    minimal_nondegeneracy_constant(ShiftSpec::encoding_of_S(n), n));
  const auto report = kernel_lower_bound(b, cfg.p, *mu, *lambda, target, trial_seed(cfg.seed, 6, trial));
  const auto bloom = weighted_bmo_norm(b, cfg.p, *mu, *lambda);
  add_bound_record(out, "weighted kernel lower bound", report, trial,
                   {{"bloom_bmo", bloom.value}, {"bloom_maximizer", bloom.maximizer_json()}});

  const CommutatorOp c(target.base(n), b);
  const auto testing = testing_lower_bound(c, cfg.p, *mu, *lambda);
  const double ref = report.reference.lower;
  const bool ok = testing.lower <= ref + cfg.tolerances.slack * std::max(1.0, ref);
  json witness = {{"trial", trial}, {"testing", testing.to_json()}, {"reference", report.reference.to_json()}};
  out.records.push_back({"testing <= weighted norm", ok, testing.lower, ref, cfg.tolerances.slack, witness});
  if (!ok) {
    witness["check"] = "testing <= weighted norm";
    out.counterexamples.push_back(std::move(witness));
  }
  return out;
}

inline TrialResult two_sided(const SuiteConfig& cfg, int trial) {
  const int n = *cfg.resolution;
  const int d = *cfg.dimension;
  const auto b = trial_symbol(cfg, trial);
  const CommutatorOp c(commutator_base(d, n), b);
  const auto exact = l2_operator_norm(c.as_operator());
  const auto testing = testing_lower_bound(c);
  const auto bmo = d == 1 ? bmo_norm(b, 2.0, 1) : little_bmo_norm(b, 2.0, 1);
  const auto& tol = cfg.tolerances;
  TrialResult out;
  auto record = [&](const std::string& name, bool ok, double measured, double bound, double tolerance) {
    json witness = {{"trial", trial},
                    {"exact", exact.lower},
                    {"testing", testing.to_json()},
                    {"bmo_levels_ge_1", bmo.value},
                    {"bmo_maximizer", bmo.maximizer_json()}};
    out.records.push_back({name, ok, measured, bound, tolerance, witness});
    if (!ok) {
      witness["check"] = name;
      out.counterexamples.push_back(std::move(witness));
    }
  };
  record("testing <= exact", testing.lower <= exact.lower + tol.slack * std::max(1.0, exact.lower), testing.lower,
         exact.lower, tol.slack);
  if (d == 1) {
    record("testing = bmo (levels >= 1)",
           std::abs(testing.lower - bmo.value) <= tol.identity * std::max(bmo.value, 1e-6 * b.max_abs()),
           testing.lower, bmo.value, tol.identity);
  } else {
    record("testing <= little bmo (levels >= 1)",
           testing.lower <= bmo.value + tol.slack * std::max(1.0, bmo.value), testing.lower, bmo.value, tol.slack);
  }
  const double floor = tol.null * std::max(1.0, b.max_abs());
  if (bmo.value <= floor) {
    record("norms vanish with the symbol", exact.lower <= floor && testing.lower <= floor, exact.lower, 0.0, tol.null);
  } else {
    const double ratio = exact.lower / bmo.value;
    record("exact / bmo is finite", std::isfinite(ratio), ratio, std::numeric_limits<double>::infinity(), 0.0);
    out.max_constant = std::max(out.max_constant, ratio);
  }
  return out;
}

template <class Body>
void run_trials(VerificationReport& report, int trials, Body&& body) {
  std::vector<TrialResult> results(static_cast<std::size_t>(trials));
  parallel_for(results.size(), [&](std::size_t t) { results[t] = body(static_cast<int>(t)); });
  for (auto& r : results) {
    for (auto& rec : r.records) report.add(std::move(rec));
    for (auto& c : r.counterexamples) report.add_counterexample(std::move(c));
    report.max_constant = std::max(report.max_constant, r.max_constant);
  }
}

}  // namespace detail

/// Runs one named suite. Trials run in parallel; records are assembled in trial order,
/// so the report depends on the configuration only.
inline VerificationReport run_suite(const SuiteConfig& config) {
  const auto cfg = validate_config(config);
  VerificationReport report;
  report.check = cfg.suite;
  report.parameters = to_json(cfg);
  const int trials = *cfg.trials;
  const auto& s = cfg.suite;
  if (s == "identities-1d") {
    detail::run_trials(report, trials, [&](int t) { return detail::identities_1d(cfg, t); });
  } else if (s == "identities-2d") {
    detail::run_trials(report, trials, [&](int t) { return detail::identities_2d(cfg, t); });
  } else if (s == "iterated-rect") {
    detail::run_trials(report, trials, [&](int t) { return detail::iterated_rect(cfg, t); });
  } else if (s == "kernel-tensor") {
    detail::run_trials(report, 1, [&](int) { return detail::tensor_kernel_matrix(cfg); });
    detail::run_trials(report, trials, [&](int t) { return detail::kernel_tensor(cfg, t); });
  } else if (s == "kernel-general") {
    detail::run_trials(report, trials, [&](int t) { return detail::kernel_general(cfg, t); });
  } else if (s == "nondegeneracy") {
    detail::run_trials(report, trials, [&](int t) { return detail::nondegeneracy(cfg, t); });
  } else if (s == "weighted-bloom") {
    detail::run_trials(report, trials, [&](int t) { return detail::weighted_bloom(cfg, t); });
  } else {
    detail::run_trials(report, trials, [&](int t) { return detail::two_sided(cfg, t); });
  }
  // smallest c|I||a| over the non-degeneracy certificates
  for (const auto& r : report.records) {
    if (r.name.find("certificate") != std::string::npos) {
      report.worst_ratio = std::isnan(report.worst_ratio) ? r.measured : std::min(report.worst_ratio, r.measured);
    }
  }
  return report;
}

}  // namespace dcl
