// dcl: generators, norm estimators and verification suites for dyadic commutators.
// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration or input error.

#include <cmath>
#include <iostream>
#include <limits>
#include <string>

#include "CLI11.hpp"

#include "dcl/dcl.hpp"

namespace {

struct Options {
  // 0 / -1 / NaN mark "not given"
  int resolution = 0;
  int dimension = 0;
  double p = 2.0;
  std::uint64_t seed = 0;
  int trials = -1;
  std::string output;
  std::string format = "json";
  std::string shift_spec;
  std::string symbol;
  std::string weight_mu;
  std::string weight_lambda;
  std::string profile = "haar-gaussian";
  std::string family = "both";
  int complexity = -1;
  int output_complexity = -1;
  double modulus = std::numeric_limits<double>::quiet_NaN();
  double constant = std::numeric_limits<double>::quiet_NaN();
  double target = 4.0;
  std::string kind = "auto";
  std::string what = "symbol";
  bool weak = false;
  double tol_identity = 1e-10;
  double tol_reproduction = 1e-9;
  double tol_slack = 1e-12;

  bool has_constant() const { return !std::isnan(constant); }
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--resolution,-n", o.resolution, "grid resolution N (2^N cells per axis)");
  cmd->add_option("--dimension,-d", o.dimension, "1 or 2");
  cmd->add_option("--p", o.p, "exponent p > 1");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--trials", o.trials, "number of random trials");
  cmd->add_option("--output,-o", o.output, "write the result here instead of stdout");
  cmd->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--shift-spec", o.shift_spec, "shift specification (JSON)");
  cmd->add_option("--symbol", o.symbol, "symbol b (JSON, or CSV for 1D)");
  cmd->add_option("--weight-mu", o.weight_mu, "weight mu");
  cmd->add_option("--weight-lambda", o.weight_lambda, "weight lambda");
  cmd->add_option("--profile", o.profile, "random symbol profile: haar-gaussian, indicator-mix, additive");
}

void add_shift_family(CLI::App* cmd, Options& o) {
  cmd->add_option("--family", o.family, "shift family: purely-mixing, sliced or both");
  cmd->add_option("--complexity", o.complexity, "input complexity i");
  cmd->add_option("--modulus", o.modulus, "coefficient modulus bound b");
  cmd->add_option("--constant,-c", o.constant, "non-degeneracy constant c");
}

int dimension_of(const Options& o, int fallback) { return o.dimension != 0 ? o.dimension : fallback; }

int resolution_of(const Options& o, int dimension) { return o.resolution != 0 ? o.resolution : (dimension == 1 ? 8 : 5); }

void emit(const Options& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
  } else {
    dcl::write_text(o.output, text);
  }
}

void emit_json(const Options& o, const dcl::json& j) {
  if (o.format == "csv") {
    // flat key,value rows; nested objects use dotted keys
    std::string out = "key,value\n";
    for (const auto& [key, value] : j.flatten().items()) out += key.substr(1) + "," + value.dump() + "\n";
    emit(o, out);
  } else {
    emit(o, j.dump(2) + "\n");
  }
}

int emit_report(const Options& o, const dcl::VerificationReport& r) {
  emit(o, o.format == "csv" ? dcl::to_csv(r) : r.to_json().dump(2) + "\n");
  std::cerr << r.check << ": " << (r.pass() ? "PASS" : "FAIL") << " (" << r.passes() << " passed, " << r.failures()
            << " failed)\n";
  return r.pass() ? 0 : 1;
}

dcl::GridFunction symbol_of(const Options& o, int& d, int& n) {
  if (!o.symbol.empty()) {
    auto b = dcl::load_grid_function(o.symbol);
    d = b.dimension();
    n = b.resolution();
    return b;
  }
  return dcl::random_symbol(o.seed, d, n, dcl::parse_profile(o.profile));
}

dcl::Weight weight_of(const std::string& path, int d, int n) {
  if (path.empty()) return dcl::Weight::constant(d, n);
  auto w = dcl::load_weight(path);
  if (w.dimension() != d || w.resolution() != n) throw dcl::config_error("weight '" + path + "' has the wrong shape");
  return w;
}

dcl::ShiftSpec generated_spec(const Options& o, int n) {
  const int i = o.complexity >= 0 ? o.complexity : 1;
  if (std::isnan(o.modulus)) throw dcl::config_error("--modulus is required to generate a shift");
  if (o.family == "purely-mixing") return dcl::make_purely_mixing(i, o.modulus, o.seed, n);
  if (o.family == "sliced") return dcl::make_sliced(i, o.output_complexity >= 0 ? o.output_complexity : i, o.modulus, o.seed, n);
  throw dcl::config_error("--family must be purely-mixing or sliced here");
}

double family_constant(const Options& o, const dcl::ShiftSpec& spec, int n) {
  if (o.has_constant()) return o.constant;
  if (o.shift_spec.empty() && o.family == "purely-mixing") return dcl::purely_mixing_constant(spec.input_depth(), o.modulus);
  if (o.shift_spec.empty() && o.family == "sliced") return dcl::sliced_constant(o.modulus);
  return dcl::minimal_nondegeneracy_constant(spec, n);
}

int run_suite_command(const Options& o, const std::string& name) {
  dcl::SuiteConfig c;
  c.suite = name;
  if (o.resolution != 0) c.resolution = o.resolution;
  if (o.dimension != 0) c.dimension = o.dimension;
  if (o.trials != -1) c.trials = o.trials;
  c.p = o.p;
  c.seed = o.seed;
  c.output = o.output;
  c.profile = dcl::parse_profile(o.profile);
  c.weight_target = o.target;
  c.family = o.family;
  c.tolerances.identity = o.tol_identity;
  c.tolerances.reproduction = o.tol_reproduction;
  c.tolerances.slack = o.tol_slack;
  if (o.complexity >= 0) c.complexity = o.complexity;
  if (!std::isnan(o.modulus)) c.modulus = o.modulus;
  if (o.has_constant()) c.constant = o.constant;
  if (!o.symbol.empty()) c.symbol = dcl::load_grid_function(o.symbol);
  if (!o.shift_spec.empty()) c.spec = dcl::load_shift_spec(o.shift_spec);
  if (!o.weight_mu.empty()) c.mu = dcl::load_weight(o.weight_mu);
  if (!o.weight_lambda.empty()) c.lambda = dcl::load_weight(o.weight_lambda);
  const auto validated = dcl::validate_config(c);  // config errors surface before any work
  return emit_report(o, dcl::run_suite(validated));
}

int run_norm(const Options& o) {
  int d = dimension_of(o, 1);
  int n = resolution_of(o, d);
  const auto b = symbol_of(o, d, n);
  dcl::require_materializable(d, n);
  const auto mu = weight_of(o.weight_mu, d, n);
  const auto lambda = weight_of(o.weight_lambda, d, n);
  const auto base = !o.shift_spec.empty() ? dcl::general_shift_operator(dcl::load_shift_spec(o.shift_spec), n)
                                          : (d == 1 ? dcl::shift_operator(n) : dcl::tensor_shift_operator(n));
  if (base.dimension != d) throw dcl::config_error("operator and symbol dimensions differ");
  const dcl::CommutatorOp c(base, b);
  dcl::json j;
  j["operator"] = base.name;
  j["dimension"] = d;
  j["resolution"] = n;
  j["p"] = o.p;
  const auto testing = dcl::testing_lower_bound(c, o.p, mu, lambda);
  j["testing"] = testing.to_json();
  if (o.p == 2.0) {
    j["norm"] = dcl::weighted_l2_norm(c.as_operator(), mu, lambda).to_json();
  } else {
    j["norm"] = dcl::lp_ascent_estimate(c.as_operator(), o.p, mu, lambda, 200, o.seed, testing.witness).to_json();
  }
  emit_json(o, j);
  return 0;
}

int run_bmo(const Options& o) {
  int d = dimension_of(o, 1);
  int n = resolution_of(o, d);
  const auto b = symbol_of(o, d, n);
  std::string kind = o.kind;
  if (kind == "auto") kind = !o.weight_mu.empty() || !o.weight_lambda.empty() ? "weighted" : (d == 1 ? "dyadic" : "little");
  dcl::BmoResult r;
  if (kind == "dyadic") {
    r = dcl::bmo_norm(b, o.p);
  } else if (kind == "little") {
    r = dcl::little_bmo_norm(b, o.p);
  } else if (kind == "rectangular") {
    r = dcl::rectangular_bmo_norm(b, o.p);
  } else if (kind == "weighted") {
    r = dcl::weighted_bmo_norm(b, o.p, weight_of(o.weight_mu, d, n), weight_of(o.weight_lambda, d, n));
  } else if (kind == "bloom-rectangular") {
    r = dcl::weighted_rectangular_bloom_norm(b, weight_of(o.weight_mu, d, n), weight_of(o.weight_lambda, d, n));
  } else {
    throw dcl::config_error("unknown --kind '" + kind + "'");
  }
  emit_json(o, {{"kind", kind}, {"p", o.p}, {"value", r.value}, {"maximizer", r.maximizer_json()}});
  return 0;
}

int run_ap(const Options& o) {
  int d = dimension_of(o, 1);
  int n = resolution_of(o, d);
  dcl::Weight w = o.weight_mu.empty() ? dcl::random_ap_weight(o.seed, d, n, o.p, o.target) : dcl::load_weight(o.weight_mu);
  emit_json(o, {{"p", o.p},
                {"dimension", w.dimension()},
                {"resolution", w.resolution()},
                {"characteristic", dcl::ap_characteristic(w, o.p)},
                {"grid_aligned_characteristic", dcl::ap_characteristic_grid_aligned(w, o.p)}});
  return 0;
}

int run_kernel(const Options& o) {
  const bool general = !o.shift_spec.empty();
  int d = dimension_of(o, general ? 1 : 2);
  int n = resolution_of(o, d);
  const auto b = symbol_of(o, d, n);
  dcl::require_materializable(d, n);
  dcl::BoundTarget target = dcl::BoundTarget::tensor();
  if (general || d == 1) {
    auto spec = general ? dcl::load_shift_spec(o.shift_spec) : dcl::ShiftSpec::encoding_of_S(n);
    const double c = o.has_constant() ? o.constant : dcl::minimal_nondegeneracy_constant(spec, n);
    if (!std::isfinite(c)) throw dcl::nondegeneracy_required("the shift has a vanishing reduced coefficient");
    target = dcl::BoundTarget::general(std::move(spec), c);
  }
  const auto r = dcl::kernel_lower_bound(b, o.p, weight_of(o.weight_mu, d, n), weight_of(o.weight_lambda, d, n), target,
                                         o.seed);
  if (o.format == "csv") {
    std::string out = "region,lhs,bound,pass\n";
    for (const auto& row : r.rows) {
      out += "\"" + row.region.dump() + "\"," + dcl::json(row.lhs).dump() + "," + dcl::json(row.bound).dump() + "," +
             (row.pass ? "true" : "false") + "\n";
    }
    emit(o, out);
  } else {
    emit(o, r.to_json().dump(2) + "\n");
  }
  std::cerr << "kernel lower bound: " << (r.pass() ? "PASS" : "FAIL") << " (max ratio " << r.max_ratio << ")\n";
  return r.pass() ? 0 : 1;
}

int run_nondeg(const Options& o) {
  const int n = resolution_of(o, 1);
  const auto spec = o.shift_spec.empty() ? generated_spec(o, n) : dcl::load_shift_spec(o.shift_spec);
  const double c = family_constant(o, spec, n);
  if (!std::isfinite(c)) {
    throw dcl::config_error("no finite constant exists for this shift; pass --constant to list the failures");
  }
  return emit_report(o, o.weak ? dcl::check_weak_nondegeneracy(spec, n, c) : dcl::check_nondegeneracy(spec, n, c));
}

int run_gen(const Options& o) {
  int d = dimension_of(o, 1);
  const int n = resolution_of(o, d);
  if (o.what == "symbol" || o.what == "weight") {
    const auto f = o.what == "symbol" ? dcl::random_symbol(o.seed, d, n, dcl::parse_profile(o.profile))
                                      : dcl::random_ap_weight(o.seed, d, n, o.p, o.target).function();
    emit(o, o.format == "csv" ? dcl::to_csv(f) : dcl::to_json(f).dump(2) + "\n");
  } else if (o.what == "spec") {
    emit(o, dcl::to_json(generated_spec(o, n)).dump(2) + "\n");
  } else {
    throw dcl::config_error("--what must be symbol, weight or spec");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic commutator lower bounds: generators, estimators and verification suites"};
  app.require_subcommand(1);
  Options o;
  std::string suite_name;

  auto* suite = app.add_subcommand("suite", "run a verification suite");
  suite->add_option("name", suite_name, "identities-1d, identities-2d, iterated-rect, kernel-tensor, "
                                        "kernel-general, nondegeneracy, weighted-bloom, two-sided")
      ->required();
  add_common(suite, o);
  add_shift_family(suite, o);
  suite->add_option("--target", o.target, "A_p characteristic target for random weights");
  suite->add_option("--tol-identity", o.tol_identity, "relative tolerance for exact identities");
  suite->add_option("--tol-reproduction", o.tol_reproduction, "relative tolerance for reproduction formulas");
  suite->add_option("--tol-slack", o.tol_slack, "slack for inequalities");

  auto* norm = app.add_subcommand("norm", "commutator norm: exact at p = 2, testing and ascent bounds otherwise");
  add_common(norm, o);

  auto* bmo = app.add_subcommand("bmo", "BMO-type norms of a symbol");
  add_common(bmo, o);
  bmo->add_option("--kind", o.kind, "dyadic, little, rectangular, weighted, bloom-rectangular (default by input)");

  auto* ap = app.add_subcommand("ap", "A_p characteristic of --weight-mu, or of a random weight");
  add_common(ap, o);
  ap->add_option("--target", o.target, "target characteristic for the random weight");

  auto* kernel = app.add_subcommand("kernel", "kernel lower-bound chain over every dyadic rectangle or interval");
  add_common(kernel, o);
  kernel->add_option("--constant,-c", o.constant, "non-degeneracy constant of the shift");

  auto* nondeg = app.add_subcommand("nondeg", "non-degeneracy certificate for a shift");
  add_common(nondeg, o);
  add_shift_family(nondeg, o);
  nondeg->add_flag("--weak", o.weak, "check the weak condition instead");

  auto* gen = app.add_subcommand("gen", "generate a random symbol, weight or shift spec");
  add_common(gen, o);
  add_shift_family(gen, o);
  gen->add_option("--what", o.what, "symbol, weight or spec");
  gen->add_option("--target", o.target, "A_p target for weights");
  gen->add_option("--output-complexity", o.output_complexity, "output complexity j for sliced specs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (suite->parsed()) return run_suite_command(o, suite_name);
    if (norm->parsed()) return run_norm(o);
    if (bmo->parsed()) return run_bmo(o);
    if (ap->parsed()) return run_ap(o);
    if (kernel->parsed()) return run_kernel(o);
    if (nondeg->parsed()) return run_nondeg(o);
    if (gen->parsed()) return run_gen(o);
  } catch (const dcl::error& e) {
    std::cerr << "dcl: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "dcl: internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
