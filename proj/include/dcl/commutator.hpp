#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dcl/bmo.hpp"
#include "dcl/kernel.hpp"
#include "dcl/operator.hpp"
#include "dcl/report.hpp"

namespace dcl {

inline int region_dimension(const DyadicInterval&) { return 1; }
inline int region_dimension(const DyadicRectangle&) { return 2; }
inline double region_area(const DyadicInterval& i) { return i.length(); }
inline double region_area(const DyadicRectangle& r) { return r.area(); }

/// [base, b] for a fixed symbol b.
struct CommutatorOp {
  Operator base;
  GridFunction symbol;

  CommutatorOp(Operator op, GridFunction b) : base(std::move(op)), symbol(std::move(b)) {
    if (symbol.dimension() != base.dimension || symbol.resolution() != base.resolution) {
      throw dimension_mismatch("symbol shape does not match the operator");
    }
  }

  int dimension() const { return base.dimension; }
  int resolution() const { return base.resolution; }

  GridFunction operator()(const GridFunction& f) const {
    if (f.dimension() != dimension() || f.resolution() != resolution()) {
      throw dimension_mismatch("commutator argument has the wrong shape");
    }
    return base(symbol * f) - symbol * base(f);
  }

  Operator as_operator() const { return commutator_operator(base, symbol); }
};

inline GridFunction commutator_apply(const CommutatorOp& c, const GridFunction& f) { return c(f); }

inline constexpr double nesting_tolerance = 1e-12;

/// [S1,[S2,b]] f, cross-checked against [S2,[S1,b]] f.
inline GridFunction iterated_commutator_apply(const GridFunction& b, const GridFunction& f,
                                              std::optional<ScaleWindow> window = std::nullopt) {
  if (b.dimension() != 2 || !b.same_shape(f)) throw dimension_mismatch("iterated commutator needs 2D inputs of one shape");
  const CommutatorOp c2(coordinate_shift_operator(b.resolution(), 2, window), b);
  const CommutatorOp c1(coordinate_shift_operator(b.resolution(), 1, window), b);
  auto s1 = [&](const GridFunction& g) { return apply_S_coordinate(g, 1, window); };
  auto s2 = [&](const GridFunction& g) { return apply_S_coordinate(g, 2, window); };
  const GridFunction first = s1(c2(f)) - c2(s1(f));
  const GridFunction second = s2(c1(f)) - c1(s2(f));
  const double gap = (first - second).max_abs();
  if (gap > nesting_tolerance * std::max(1.0, first.max_abs())) {
    throw nesting_mismatch("nesting orders differ by " + std::to_string(gap));
  }
  return first;
}

/// Lower (and possibly exact) value of an operator norm with the test function realizing it.
struct NormEstimate {
  double lower = 0.0;
  std::optional<double> exact;
  std::string method;
  GridFunction witness;
  json witness_ref;

  json to_json() const {
    json j;
    j["lower"] = lower;
    if (exact) j["exact"] = *exact;
    j["method"] = method;
    j["witness_ref"] = witness_ref;
    return j;
  }
};

namespace detail {

inline GridFunction from_vector(const Eigen::VectorXcd& v, int dimension, int resolution) {
  GridFunction f(dimension, resolution);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = v(static_cast<Eigen::Index>(k));
  return f;
}

inline Eigen::MatrixXcd weighted_matrix(const Operator& op, const Weight& mu, const Weight& lambda, double p) {
  if (mu.dimension() != op.dimension || mu.resolution() != op.resolution || lambda.dimension() != op.dimension ||
      lambda.resolution() != op.resolution) {
    throw dimension_mismatch("weight shapes do not match the operator");
  }
  Eigen::MatrixXcd m = materialize(op);
  const Eigen::Index n = m.rows();
  for (Eigen::Index r = 0; r < n; ++r) m.row(r) *= std::pow(lambda[static_cast<std::size_t>(r)], 1.0 / p);
  for (Eigen::Index c = 0; c < n; ++c) m.col(c) *= std::pow(mu[static_cast<std::size_t>(c)], -1.0 / p);
  return m;
}

}  // namespace detail

/// Exact L^2 -> L^2 norm from the top singular value of the materialized operator.
inline NormEstimate l2_operator_norm(const Operator& op) {
  const auto top = top_singular(materialize(op));
  NormEstimate e;
  e.lower = top.value;
  e.exact = top.value;
  e.method = "singular-value";
  e.witness = detail::from_vector(top.right, op.dimension, op.resolution);
  e.witness_ref = {{"kind", "right-singular-vector"}};
  return e;
}

/// Exact L^2(mu) -> L^2(lambda) norm: top singular value of D_lambda^{1/2} M D_mu^{-1/2}.
inline NormEstimate weighted_l2_norm(const Operator& op, const Weight& mu, const Weight& lambda) {
  const auto top = top_singular(detail::weighted_matrix(op, mu, lambda, 2.0));
  NormEstimate e;
  e.lower = top.value;
  e.exact = top.value;
  e.method = "weighted-singular-value";
  e.witness = detail::from_vector(top.right, op.dimension, op.resolution);
  for (std::size_t k = 0; k < e.witness.size(); ++k) e.witness[k] /= std::sqrt(mu[k]);
  e.witness_ref = {{"kind", "right-singular-vector"}};
  return e;
}

namespace detail {

// Cells of the testing region: the parent of I in 1D, (parent(R1) x [0,1)) u ([0,1) x parent(R2)) in 2D.
inline std::vector<std::size_t> testing_region(const DyadicInterval& interval, int n) {
  std::vector<std::size_t> cells;
  for_cells(interval.parent(), n, [&](std::size_t k) { cells.push_back(k); });
  return cells;
}

inline std::vector<std::size_t> testing_region(const DyadicRectangle& rect, int n) {
  std::vector<std::size_t> cells;
  const auto p1 = rect.first.parent();
  const auto p2 = rect.second.parent();
  const auto side = std::int64_t{1} << n;
  for (std::int64_t a = 0; a < side; ++a) {
    const bool in1 = p1.contains(DyadicInterval{n, a});
    for (std::int64_t c = 0; c < side; ++c) {
      if (in1 || p2.contains(DyadicInterval{n, c})) cells.push_back(static_cast<std::size_t>(a * side + c));
    }
  }
  return cells;
}

template <class Region>
double testing_ratio(const CommutatorOp& c, const Region& region, double p, const Weight& mu, const Weight& lambda) {
  const int n = c.resolution();
  const auto out = c(GridFunction::indicator(region, n));
  double num = 0.0;
  for (const auto k : testing_region(region, n)) num += std::pow(std::abs(out[k]), p) * lambda[k];
  double den = 0.0;
  for_cells(region, n, [&](std::size_t k) { den += mu[k]; });
  return std::pow(num / den, 1.0 / p);
}

}  // namespace detail

/// ||C 1_I||^2 over the parent of I (1D), or over the part of R-check inside the unit square (2D).
template <class Region>
double testing_mass(const CommutatorOp& c, const Region& region) {
  if (region_dimension(region) != c.dimension()) throw dimension_mismatch("testing region dimension");
  const int n = c.resolution();
  const auto out = c(GridFunction::indicator(region, n));
  double acc = 0.0;
  for (const auto k : detail::testing_region(region, n)) acc += std::norm(out[k]);
  return acc * out.cell_volume();
}

/// Mass of [S1S2, b] 1_R over R-check = (parent(R1) x line) u (line x parent(R2)) in the plane,
/// split into the part inside the unit square and the part outside it.
struct TestingMass {
  double inside = 0.0;
  double outside = 0.0;
  double total() const { return inside + outside; }
};

inline TestingMass tensor_testing_mass(const GridFunction& b, const DyadicRectangle& rect) {
  if (b.dimension() != 2) throw dimension_mismatch("tensor testing needs a 2D symbol");
  if (rect.first.level < 1 || rect.second.level < 1) throw parameter_out_of_range("testing rectangle needs a parent");
  const int n = b.resolution();
  TestingMass m;
  m.inside = testing_mass(CommutatorOp(tensor_shift_operator(n), b), rect);

  // Outside the square only S1S2(b 1_R) survives. Along an axis, S sends the
  // mean and the [0,1) Haar function to orthonormal functions supported off
  // [0,1); the other axis is then the truncated S on the projected profile.
  const auto v = b * GridFunction::indicator(rect, n);
  const auto side = v.side();
  const double vol = std::ldexp(1.0, -n);
  const DyadicInterval root{0, 0};
  for (int axis = 1; axis <= 2; ++axis) {
    const auto parent = (axis == 1 ? rect.first : rect.second).parent();
    GridFunction mean_profile(1, n), root_profile(1, n);
    for (std::int64_t a = 0; a < side; ++a) {
      scalar sm{}, sr{};
      for (std::int64_t c = 0; c < side; ++c) {
        const scalar val = axis == 1 ? v.at(a, c) : v.at(c, a);
        sm += val;
        sr += val * haar_value(root, DyadicInterval{n, c});
      }
      mean_profile[static_cast<std::size_t>(a)] = sm * vol;
      root_profile[static_cast<std::size_t>(a)] = sr * vol;
    }
    for (const auto& profile : {apply_S(mean_profile), apply_S(root_profile)}) {
      detail::for_cells(parent, n, [&](std::size_t k) { m.outside += std::norm(profile[k]) * vol; });
    }
  }
  return m;
}

/// int over parent(R1) x parent(R2) of |[S1,[S2,b]] 1_R|^2.
inline double iterated_testing_mass(const GridFunction& b, const DyadicRectangle& rect) {
  const int n = b.resolution();
  const auto out = iterated_commutator_apply(b, GridFunction::indicator(rect, n));
  double acc = 0.0;
  detail::for_cells(DyadicRectangle{rect.first.parent(), rect.second.parent()}, n,
                    [&](std::size_t k) { acc += std::norm(out[k]); });
  return acc * out.cell_volume();
}

/// max over indicator test functions of ||C 1_E||_{L^p(region, lambda)} / ||1_E||_{L^p(mu)}, with E
/// ranging over dyadic intervals (1D) or rectangles (2D) of level >= 1 on every side.
inline NormEstimate testing_lower_bound(const CommutatorOp& c, double p, const Weight& mu, const Weight& lambda) {
  detail::require_p(p, 1.0 + 1e-300);
  const int n = c.resolution();
  NormEstimate e;
  e.method = "testing";
  bool first = true;
  auto consider = [&](const auto& region, double value) {
    if (first || detail::improves(value, e.lower)) {
      e.lower = value;
      e.witness = GridFunction::indicator(region, n);
      e.witness_ref = {{"kind", "indicator"}, {"region", to_json(region)}};
      first = false;
    }
  };
  if (c.dimension() == 1) {
    for (const auto& i : all_intervals(n, 1)) consider(i, detail::testing_ratio(c, i, p, mu, lambda));
  } else {
    for (const auto& i : all_intervals(n, 1))
      for (const auto& j : all_intervals(n, 1)) {
        const DyadicRectangle r{i, j};
        consider(r, detail::testing_ratio(c, r, p, mu, lambda));
      }
  }
  return e;
}

inline NormEstimate testing_lower_bound(const CommutatorOp& c, double p = 2.0) {
  const auto one = Weight::constant(c.dimension(), c.resolution());
  return testing_lower_bound(c, p, one, one);
}

/// Lower bound for the L^p(mu) -> L^p(lambda) norm by nonlinear power iteration
/// (dual-map ascent). Runs from `start` when given and from a seeded random vector;
/// the reported value is the best ratio reached, so it is always attained.
inline NormEstimate lp_ascent_estimate(const Operator& op, double p, const Weight& mu, const Weight& lambda,
                                       int iterations, std::uint64_t seed,
                                       const std::optional<GridFunction>& start = std::nullopt) {
  detail::require_p(p, 1.0 + 1e-300);
  if (iterations < 0) throw parameter_out_of_range("iterations must be non-negative");
  const Eigen::MatrixXcd a = detail::weighted_matrix(op, mu, lambda, p);
  const Eigen::Index n = a.cols();
  const double q = p / (p - 1.0);

  auto norm_p = [](const Eigen::VectorXcd& v, double r) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < v.size(); ++k) acc += std::pow(std::abs(v(k)), r);
    return std::pow(acc, 1.0 / r);
  };
  // dual element of v in l^r: unit l^{r'} norm, pairing equal to ||v||_r
  auto dual = [&](const Eigen::VectorXcd& v, double r) {
    const double nv = norm_p(v, r);
    Eigen::VectorXcd d = Eigen::VectorXcd::Zero(v.size());
    if (nv == 0.0) return d;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      const double mod = std::abs(v(k));
      if (mod > 0.0) d(k) = v(k) / mod * std::pow(mod / nv, r - 1.0);
    }
    return d;
  };

  NormEstimate best;
  best.method = "lp-ascent";
  best.witness = GridFunction(op.dimension, op.resolution);
  best.witness_ref = {{"kind", "ascent"}, {"iterations", iterations}, {"seed", seed}};
  auto record = [&](const Eigen::VectorXcd& x, double ratio) {
    if (ratio > best.lower) {
      best.lower = ratio;
      for (std::size_t k = 0; k < best.witness.size(); ++k) {
        best.witness[k] = x(static_cast<Eigen::Index>(k)) * std::pow(mu[k], -1.0 / p);
      }
    }
  };
  auto run = [&](Eigen::VectorXcd x) {
    double nx = norm_p(x, p);
    if (nx == 0.0) return;
    x /= nx;
    record(x, norm_p(a * x, p));
    for (int it = 0; it < iterations; ++it) {
      const Eigen::VectorXcd y = a * x;
      if (norm_p(y, p) == 0.0) return;
      const Eigen::VectorXcd z = a.adjoint() * dual(y, p);
      if (norm_p(z, q) == 0.0) return;
      x = dual(z, q);
      nx = norm_p(x, p);
      x /= nx;
      record(x, norm_p(a * x, p));
    }
  };

  if (start) {
    if (start->dimension() != op.dimension || start->resolution() != op.resolution) {
      throw dimension_mismatch("start vector shape");
    }
    Eigen::VectorXcd x(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      x(k) = (*start)[static_cast<std::size_t>(k)] * std::pow(mu[static_cast<std::size_t>(k)], 1.0 / p);
    }
    run(x);
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd x(n);
  for (Eigen::Index k = 0; k < n; ++k) x(k) = g(rng);
  run(x);
  return best;
}

/// c_p = sum_{n >= 1} 2^{-n/p}.
inline double c_p(double p) {
  detail::require_p(p, 1.0 + 1e-300);
  return 1.0 / (std::pow(2.0, 1.0 / p) - 1.0);
}

/// |R| 1_R (b - <b>_R), the left-hand side of both reproduction formulas.
template <class Region>
GridFunction reproduction_target(const GridFunction& b, const Region& region) {
  const int n = b.resolution();
  const scalar mean = average(b, region);
  GridFunction out(b.dimension(), n);
  const double area = region_area(region);
  detail::for_cells(region, n, [&](std::size_t k) { out[k] = area * (b[k] - mean); });
  return out;
}

/// Right-hand side of the tensor reproduction formula on R: the sum over K in D(R1),
/// L in D(R2) and the four child pairs of -[S1S2,b](1_E / h_E) 1_E' / h_E', plus the
/// scales below the grid's truncation, integrated directly.
inline GridFunction reproduce_symbol_tensor(const GridFunction& b, const DyadicRectangle& rect) {
  if (b.dimension() != 2) throw dimension_mismatch("tensor reproduction needs a 2D symbol");
  const int n = b.resolution();
  if (rect.first.level >= n - 1 || rect.second.level >= n - 1) {
    throw resolution_exceeded("rectangle " + to_string(rect) + " has no grandchildren on the grid");
  }
  const CommutatorOp c(tensor_shift_operator(n), b);
  GridFunction out(2, n);
  const auto side = out.side();

  auto scaled_haar = [&](const DyadicInterval& k1, const DyadicInterval& k2) {
    // 1_E / h_E = |E| h_E
    GridFunction g(2, n);
    const double area = k1.length() * k2.length();
    detail::for_cells(DyadicRectangle{k1, k2}, n, [&](std::size_t k) {
      const DyadicInterval c1{n, static_cast<std::int64_t>(k) / side};
      const DyadicInterval c2{n, static_cast<std::int64_t>(k) % side};
      g[k] = area * haar_value(k1, c1) * haar_value(k2, c2);
    });
    return g;
  };

  for (const auto& k : all_intervals(n - 2, rect.first.level)) {
    if (!rect.first.contains(k)) continue;
    for (const auto& l : all_intervals(n - 2, rect.second.level)) {
      if (!rect.second.contains(l)) continue;
      const auto [k_minus, k_plus] = k.children();
      const auto [l_minus, l_plus] = l.children();
      for (int eps : {1, -1}) {
        for (int delta : {1, -1}) {
          const auto& ke = eps > 0 ? k_plus : k_minus;
          const auto& ko = eps > 0 ? k_minus : k_plus;
          const auto& ld = delta > 0 ? l_plus : l_minus;
          const auto& lo = delta > 0 ? l_minus : l_plus;
          const auto u = c(scaled_haar(ke, ld));
          const auto target = scaled_haar(ko, lo);
          const double sign = eps * delta;
          detail::for_cells(DyadicRectangle{ko, lo}, n, [&](std::size_t cell) { out[cell] -= sign * u[cell] * target[cell]; });
        }
      }
    }
  }

  // y in R whose first or second coordinate shares a level N-1 interval with x
  const double vol = out.cell_volume();
  auto box = [&](const DyadicRectangle& r) {
    scalar acc{};
    detail::for_cells(r, n, [&](std::size_t k) { acc += b[k]; });
    return acc * vol;
  };
  detail::for_cells(rect, n, [&](std::size_t cell) {
    const DyadicInterval x1{n, static_cast<std::int64_t>(cell) / side};
    const DyadicInterval x2{n, static_cast<std::int64_t>(cell) % side};
    const auto p1 = x1.ancestor(n - 1);
    const auto p2 = x2.ancestor(n - 1);
    const DyadicRectangle a{p1, rect.second}, bb{rect.first, p2}, ab{p1, p2};
    const double measure = a.area() + bb.area() - ab.area();
    out[cell] += measure * b[cell] - (box(a) + box(bb) - box(ab));
  });
  return out;
}

/// Right-hand side of the general reproduction formula on J: the sum over I in D(J)
/// and admissible K, L of (1/a^I_{KL}) (-[T,b])(1_K) 1_L, plus the unresolved scales.
inline GridFunction reproduce_symbol_general(const ShiftSpec& spec, const GridFunction& b, const DyadicInterval& j) {
  if (b.dimension() != 1) throw dimension_mismatch("general reproduction needs a 1D symbol");
  const int n = b.resolution();
  const auto red = reduced_coefficients(spec, n);
  const int max_level = red.max_level();
  if (j.level > max_level) {
    throw resolution_exceeded("interval " + to_string(j) + " is below the deepest reduced scale");
  }
  const CommutatorOp c(general_shift_operator(spec, n), b);
  GridFunction out(1, n);
  for (const auto& interval : all_intervals(max_level, j.level)) {
    if (!j.contains(interval)) continue;
    for (std::size_t k = 0; k < red.k_count(); ++k) {
      const auto kk = red.k_interval(interval, k);
      std::optional<GridFunction> u;
      for (std::size_t l = 0; l < red.l_count(); ++l) {
        const auto ll = red.l_interval(interval, l);
        if (ReducedCoefficients::same_child(interval, kk, ll)) continue;
        const scalar a = red.a(interval, k, l);
        if (a == scalar{}) {
          throw nondegeneracy_required("reduced coefficient vanishes at I=" + to_string(interval) +
                                       " K=" + to_string(kk) + " L=" + to_string(ll));
        }
        if (!u) u = c(GridFunction::indicator(kk, n));
        detail::for_cells(ll, n, [&](std::size_t cell) { out[cell] -= (*u)[cell] / a; });
      }
    }
  }
  // y sharing the level max_level+1 interval with x
  detail::for_cells(j, n, [&](std::size_t cell) {
    const auto fine = DyadicInterval{n, static_cast<std::int64_t>(cell)}.ancestor(max_level + 1);
    out[cell] += fine.length() * (b[cell] - average(b, fine));
  });
  return out;
}

/// Which commutator the kernel bound refers to: [S1S2,b], or [T,b] for a general
/// shift with non-degeneracy constant c.
struct BoundTarget {
  std::optional<ShiftSpec> spec;
  double c = 0.0;

  static BoundTarget tensor() { return {}; }
  static BoundTarget general(ShiftSpec s, double constant) { return {std::move(s), constant}; }

  bool is_tensor() const { return !spec.has_value(); }
  int dimension() const { return is_tensor() ? 2 : 1; }

  /// c_p^2 for the tensor shift; c c_p 2^{(j+1)+(i+1)/p'} for a general one.
  double constant(double p) const {
    const double cp = c_p(p);
    if (is_tensor()) return cp * cp;
    const double pp = p / (p - 1.0);
    return c * cp * std::pow(2.0, (spec->output_depth() + 1) + (spec->input_depth() + 1) / pp);
  }

  Operator base(int resolution) const {
    return is_tensor() ? tensor_shift_operator(resolution) : general_shift_operator(*spec, resolution);
  }
};

/// Smallest c with |a^I_{KL}| >= 1/(c|I|) on all admissible triples (infinite if some a vanishes).
inline double minimal_nondegeneracy_constant(const ShiftSpec& spec, int resolution) {
  const auto red = reduced_coefficients(spec, resolution);
  double c = 0.0;
  for (const auto& [interval, blk] : red.blocks()) {
    for (std::size_t k = 0; k < red.k_count(); ++k)
      for (std::size_t l = 0; l < red.l_count(); ++l) {
        if (ReducedCoefficients::same_child(interval, red.k_interval(interval, k), red.l_interval(interval, l))) continue;
        const double mod = std::abs(blk[k * red.l_count() + l]);
        if (mod == 0.0) return std::numeric_limits<double>::infinity();
        c = std::max(c, 1.0 / (interval.length() * mod));
      }
  }
  return c;
}

/// One row per dyadic rectangle (or interval) R: LHS_p(R) against constant x reference.
struct KernelBoundReport {
  struct Row {
    json region;
    double lhs = 0.0;
    double bound = 0.0;
    bool pass = true;
  };
  double p = 2.0;
  double constant = 0.0;
  NormEstimate reference;
  bool reference_is_estimate = false;
  std::vector<Row> rows;
  double max_ratio = 0.0;  // max LHS / (constant x reference)

  static constexpr double slack = 1e-12;

  bool pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.pass; });
  }

  json to_json() const {
    json j;
    j["p"] = p;
    j["constant"] = constant;
    j["reference"] = reference.to_json();
    j["reference_is_estimate"] = reference_is_estimate;
    j["pass"] = pass();
    j["max_ratio"] = max_ratio;
    json arr = json::array();
    for (const auto& r : rows) arr.push_back({{"region", r.region}, {"lhs", r.lhs}, {"bound", r.bound}, {"pass", r.pass}});
    j["rows"] = arr;
    return j;
  }
};

/// Checks ((1/mu(R)) int_R |b - <b>_R|^p lambda)^{1/p} <= constant x ||C_b|| over every dyadic R,
/// where the norm is the exact weighted L^2 norm at p = 2 and an ascent lower bound otherwise.
inline KernelBoundReport kernel_lower_bound(const GridFunction& b, double p, const Weight& mu, const Weight& lambda,
                                            const BoundTarget& target, std::uint64_t seed = 0,
                                            int ascent_iterations = 200) {
  detail::require_p(p, 1.0 + 1e-300);
  if (b.dimension() != target.dimension()) throw dimension_mismatch("symbol dimension does not match the target");
  detail::require_shape(b, mu);
  detail::require_shape(b, lambda);
  const int n = b.resolution();
  KernelBoundReport report;
  report.p = p;
  report.constant = target.constant(p);
  const CommutatorOp c(target.base(n), b);
  if (p == 2.0) {
    report.reference = weighted_l2_norm(c.as_operator(), mu, lambda);
  } else {
    const auto testing = testing_lower_bound(c, p, mu, lambda);
    report.reference = lp_ascent_estimate(c.as_operator(), p, mu, lambda, ascent_iterations, seed, testing.witness);
    report.reference_is_estimate = true;
  }
  const double rhs = report.constant * report.reference.lower;
  auto add = [&](const auto& region) {
    const double lhs = std::pow(detail::weighted_oscillation(b, region, p, &mu, &lambda), 1.0 / p);
    KernelBoundReport::Row row{to_json(region), lhs, rhs, lhs <= rhs + KernelBoundReport::slack * std::max(1.0, rhs)};
    if (rhs > 0.0) report.max_ratio = std::max(report.max_ratio, lhs / rhs);
    else if (lhs > 0.0) report.max_ratio = std::numeric_limits<double>::infinity();
    report.rows.push_back(std::move(row));
  };
  if (n == 0) return report;
  if (target.is_tensor()) {
    detail::for_each_rectangle(n, 0, add);
  } else {
    detail::for_each_interval(n, 0, add);
  }
  return report;
}

}  // namespace dcl
