#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "dcl/dyadic.hpp"
#include "dcl/grid_function.hpp"
#include "dcl/report.hpp"
#include "dcl/shift.hpp"

namespace dcl {

/// A point of [0,1)^2, represented by its finest cell in each variable.
struct Point2 {
  DyadicInterval x1;
  DyadicInterval x2;
};

namespace detail {

inline void require_same_level(const DyadicInterval& x, const DyadicInterval& y) {
  if (x.level != y.level) throw dimension_mismatch("kernel points must be cells of the same resolution");
}

// Kernel of S (window-capped to intervals of level <= max_level): only the
// minimal interval I containing x and y contributes, with
// eps * h_{I_eps}(y) * h_{I_-eps}(x) where y lies in I_eps.
inline double shift_kernel(const DyadicInterval& x, const DyadicInterval& y, int max_level) {
  require_same_level(x, y);
  if (x == y) return 0.0;
  const auto interval = minimal_common_interval(x, y);
  if (interval.level > max_level) return 0.0;
  const auto [minus, plus] = interval.children();
  const bool y_right = plus.contains(y);
  const double eps = y_right ? 1.0 : -1.0;
  return eps * haar_product(y_right ? plus : minus, y, y_right ? minus : plus, x);
}

// sum_{K in D(R_i), level(K) <= max_level} sum_eps eps 1_{K_eps}(y)/h_{K_eps}(y) * 1_{K_-eps}(x)/h_{K_-eps}(x)
inline double inverse_shift_kernel(const DyadicInterval& side, const DyadicInterval& x,
                                   const DyadicInterval& y, int max_level) {
  require_same_level(x, y);
  if (!side.contains(x) || !side.contains(y)) return 0.0;
  double acc = 0.0;
  for (int level = side.level; level <= max_level; ++level) {
    const auto k = x.ancestor(level);
    const auto [minus, plus] = k.children();
    for (int e = 0; e < 2; ++e) {
      const auto& ke = e ? plus : minus;
      const auto& kme = e ? minus : plus;
      if (!ke.contains(y) || !kme.contains(x)) continue;
      acc += (e ? 1.0 : -1.0) / haar_product(ke, y, kme, x);
    }
  }
  return acc;
}

}  // namespace detail

/// Kernel of S1 S2 at (x, y); zero when x1 = y1 or x2 = y2 or when the minimal
/// containing rectangle is not resolved by the grid.
inline double tensor_kernel(const Point2& x, const Point2& y) {
  const int cap = x.x1.level - 2;
  return detail::shift_kernel(x.x1, y.x1, cap) * detail::shift_kernel(x.x2, y.x2, cap);
}

/// Kernel of the scale-truncated operator T_n.
inline double truncated_tensor_kernel(const ScaleWindow& window, const Point2& x, const Point2& y) {
  const int cap = std::min(x.x1.level - 2, window.max_level());
  return detail::shift_kernel(x.x1, y.x1, cap) * detail::shift_kernel(x.x2, y.x2, cap);
}

/// 1_R(x) 1_R(y) 1_{A_x}(y) / K(x,y), evaluated through the expansion over
/// K x L in D(R); 0/0 = 0.
inline double inverse_tensor_kernel(const DyadicRectangle& rect, const Point2& x, const Point2& y) {
  const int cap = x.x1.level - 2;
  return detail::inverse_shift_kernel(rect.first, x.x1, y.x1, cap) *
         detail::inverse_shift_kernel(rect.second, x.x2, y.x2, cap);
}

/// sum_I sum_{K,L} prefactor c^I_{KL} h_K(y) h_L(x), including x = y.
inline scalar general_kernel_sum(const ShiftSpec& spec, const DyadicInterval& x, const DyadicInterval& y) {
  detail::require_same_level(x, y);
  const auto top = minimal_common_interval(x, y);
  scalar acc{};
  for (int level = std::min(top.level, x.level - 1 - spec.max_depth()); level >= 0; --level) {
    const auto interval = top.ancestor(level);
    const auto* block = spec.find_block(interval);
    if (block == nullptr || !spec.active(interval)) continue;
    const auto k = y.ancestor(level + spec.input_depth());
    const auto l = x.ancestor(level + spec.output_depth());
    const auto k_off = static_cast<std::size_t>(k.index - (interval.index << spec.input_depth()));
    const auto l_off = static_cast<std::size_t>(l.index - (interval.index << spec.output_depth()));
    const scalar c = (*block)[k_off * spec.output_count() + l_off];
    if (c == scalar{}) continue;
    acc += spec.prefactor() * c * haar_product(k, y, l, x);
  }
  return acc;
}

/// Kernel of a general shift, with K(x,x) = 0.
inline scalar general_kernel(const ShiftSpec& spec, const DyadicInterval& x, const DyadicInterval& y) {
  if (x == y) return 0.0;
  return general_kernel_sum(spec, x, y);
}

/// The within-cell term sum_I ... h_K(x) h_L(x) that the a.e. kernel drops.
inline scalar general_kernel_diagonal(const ShiftSpec& spec, const DyadicInterval& x) {
  return general_kernel_sum(spec, x, x);
}

/// x -> sum_y K(x,y) f(y) |cell| for S1 S2. The diagonal slices carry no mass
/// for this kernel, so nothing has to be reinstated.
inline GridFunction integrate_tensor_kernel(const GridFunction& f) {
  if (f.dimension() != 2) throw dimension_mismatch("tensor kernel acts on 2D functions");
  const int n = f.resolution();
  const auto side = f.side();
  // K factors into one-variable kernels; tabulate them.
  std::vector<double> k1(static_cast<std::size_t>(side * side));
  for (std::int64_t a = 0; a < side; ++a)
    for (std::int64_t b = 0; b < side; ++b)
      k1[static_cast<std::size_t>(a * side + b)] = detail::shift_kernel({n, a}, {n, b}, n - 2);
  GridFunction out(2, n);
  for (std::int64_t x1 = 0; x1 < side; ++x1) {
    for (std::int64_t x2 = 0; x2 < side; ++x2) {
      scalar acc{};
      for (std::int64_t y1 = 0; y1 < side; ++y1) {
        const double a = k1[static_cast<std::size_t>(x1 * side + y1)];
        if (a == 0.0) continue;
        for (std::int64_t y2 = 0; y2 < side; ++y2) {
          acc += a * k1[static_cast<std::size_t>(x2 * side + y2)] * f.at(y1, y2);
        }
      }
      out.at(x1, x2) = acc * f.cell_volume();
    }
  }
  return out;
}

/// x -> sum_{y != x} K(x,y) f(y) |cell| + K_diag(x) f(x) |cell| for a general shift.
inline GridFunction integrate_general_kernel(const ShiftSpec& spec, const GridFunction& f) {
  if (f.dimension() != 1) throw dimension_mismatch("general kernels act on 1D functions");
  spec.require_resolution(f.resolution());
  const int n = f.resolution();
  GridFunction out(1, n);
  for (std::int64_t x = 0; x < f.side(); ++x) {
    scalar acc{};
    for (std::int64_t y = 0; y < f.side(); ++y) {
      acc += general_kernel_sum(spec, {n, x}, {n, y}) * f[static_cast<std::size_t>(y)];
    }
    out[static_cast<std::size_t>(x)] = acc * f.cell_volume();
  }
  return out;
}

/// Coefficients a^I_{KL} (K in ch_{i+1}(I), L in ch_{j+1}(I)) of the reduced
/// kernel expression, for every I whose reduced children resolve on the grid.
class ReducedCoefficients {
 public:
  ReducedCoefficients(int input_depth, int output_depth, int resolution)
      : i_(input_depth), j_(output_depth), resolution_(resolution) {}

  int input_depth() const { return i_; }
  int output_depth() const { return j_; }
  int resolution() const { return resolution_; }
  std::size_t k_count() const { return std::size_t{1} << (i_ + 1); }
  std::size_t l_count() const { return std::size_t{1} << (j_ + 1); }
  /// Deepest I carrying reduced coefficients: level(I) + max(i,j) + 1 <= N.
  int max_level() const { return resolution_ - 1 - std::max(i_, j_); }

  DyadicInterval k_interval(const DyadicInterval& interval, std::size_t k) const {
    return {interval.level + i_ + 1, (interval.index << (i_ + 1)) + static_cast<std::int64_t>(k)};
  }
  DyadicInterval l_interval(const DyadicInterval& interval, std::size_t l) const {
    return {interval.level + j_ + 1, (interval.index << (j_ + 1)) + static_cast<std::int64_t>(l)};
  }

  /// True when K and L sit in the same child of I (the coefficient is then 0).
  static bool same_child(const DyadicInterval& interval, const DyadicInterval& k, const DyadicInterval& l) {
    return k.ancestor(interval.level + 1) == l.ancestor(interval.level + 1);
  }

  scalar a(const DyadicInterval& interval, std::size_t k, std::size_t l) const {
    const auto it = blocks_.find(interval);
    return it == blocks_.end() ? scalar{} : it->second[k * l_count() + l];
  }
  /// 1/a, or 0 when a = 0.
  scalar b(const DyadicInterval& interval, std::size_t k, std::size_t l) const {
    const scalar v = a(interval, k, l);
    return v == scalar{} ? scalar{} : 1.0 / v;
  }

  const std::map<DyadicInterval, std::vector<scalar>>& blocks() const { return blocks_; }
  std::vector<scalar>& block(const DyadicInterval& interval) {
    auto& blk = blocks_[interval];
    if (blk.empty()) blk.assign(k_count() * l_count(), scalar{});
    return blk;
  }

 private:
  int i_;
  int j_;
  int resolution_;
  std::map<DyadicInterval, std::vector<scalar>> blocks_;
};

inline ReducedCoefficients reduced_coefficients(const ShiftSpec& spec, int resolution) {
  spec.require_resolution(resolution);
  ReducedCoefficients red(spec.input_depth(), spec.output_depth(), resolution);
  const int i = spec.input_depth();
  const int j = spec.output_depth();
  for (const auto& interval : all_intervals(red.max_level())) {
    auto& blk = red.block(interval);
    for (std::size_t k = 0; k < red.k_count(); ++k) {
      const auto kk = red.k_interval(interval, k);
      for (std::size_t l = 0; l < red.l_count(); ++l) {
        const auto ll = red.l_interval(interval, l);
        if (ReducedCoefficients::same_child(interval, kk, ll)) continue;
        // h_K' and h_L' of I and of every ancestor are constant on K and on L
        scalar acc{};
        for (int level = interval.level; level >= 0; --level) {
          const auto anc = interval.ancestor(level);
          const auto* coeffs = spec.find_block(anc);
          if (coeffs == nullptr || !spec.active(anc)) continue;
          const auto k_parent = kk.ancestor(level + i);
          const auto l_parent = ll.ancestor(level + j);
          const auto k_off = static_cast<std::size_t>(k_parent.index - (anc.index << i));
          const auto l_off = static_cast<std::size_t>(l_parent.index - (anc.index << j));
          const scalar c = (*coeffs)[k_off * spec.output_count() + l_off];
          if (c == scalar{}) continue;
          acc += spec.prefactor() * c * haar_product(k_parent, kk, l_parent, ll);
        }
        blk[k * red.l_count() + l] = acc;
      }
    }
  }
  return red;
}

/// max |a^I_{KL}| |I| / (2 kernel_scale): at most 1 for every spec honouring its coefficient bound.
inline double reduced_bound_ratio(const ShiftSpec& spec, const ReducedCoefficients& red) {
  double worst = 0.0;
  const double scale = 2.0 * spec.kernel_scale();
  for (const auto& [interval, blk] : red.blocks()) {
    for (const auto& v : blk) worst = std::max(worst, std::abs(v) * interval.length() / scale);
  }
  return worst;
}

namespace detail {
inline constexpr double inequality_slack = 1e-12;

inline json spec_parameters(const ShiftSpec& spec, int resolution, double c) {
  return {{"complexity", {spec.input_depth(), spec.output_depth()}},
          {"prefactor", spec.prefactor()},
          {"coefficient_bound", spec.coefficient_bound()},
          {"resolution", resolution},
          {"c", c}};
}
}  // namespace detail

/// PASS iff |a^I_{KL}| >= 1/(c|I|) whenever no child of I contains K and L.
/// worst_ratio is the minimum of c |I| |a^I_{KL}| over those triples.
inline VerificationReport check_nondegeneracy(const ShiftSpec& spec, int resolution, double c) {
  if (!(c > 0.0)) throw parameter_out_of_range("non-degeneracy constant must be positive");
  const auto red = reduced_coefficients(spec, resolution);
  VerificationReport report;
  report.check = "nondegeneracy";
  report.parameters = detail::spec_parameters(spec, resolution, c);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& [interval, blk] : red.blocks()) {
    for (std::size_t k = 0; k < red.k_count(); ++k) {
      const auto kk = red.k_interval(interval, k);
      for (std::size_t l = 0; l < red.l_count(); ++l) {
        const auto ll = red.l_interval(interval, l);
        if (ReducedCoefficients::same_child(interval, kk, ll)) continue;
        const double mod = std::abs(blk[k * red.l_count() + l]);
        const double ratio = c * interval.length() * mod;
        worst = std::min(worst, ratio);
        if (ratio < 1.0 - detail::inequality_slack) {
          report.add_counterexample({{"I", to_json(interval)},
                                     {"K", to_json(kk)},
                                     {"L", to_json(ll)},
                                     {"value", mod},
                                     {"required", 1.0 / (c * interval.length())}});
        }
      }
    }
  }
  report.worst_ratio = worst;
  report.add({"min c|I||a|", report.counterexample_count == 0, worst, 1.0, detail::inequality_slack, nullptr});
  return report;
}

/// PASS iff for every I and K some admissible L has |a^I_{KL}| >= 1/(c|I|).
inline VerificationReport check_weak_nondegeneracy(const ShiftSpec& spec, int resolution, double c) {
  if (!(c > 0.0)) throw parameter_out_of_range("non-degeneracy constant must be positive");
  const auto red = reduced_coefficients(spec, resolution);
  VerificationReport report;
  report.check = "weak-nondegeneracy";
  report.parameters = detail::spec_parameters(spec, resolution, c);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& [interval, blk] : red.blocks()) {
    for (std::size_t k = 0; k < red.k_count(); ++k) {
      const auto kk = red.k_interval(interval, k);
      double best = 0.0;
      for (std::size_t l = 0; l < red.l_count(); ++l) {
        if (ReducedCoefficients::same_child(interval, kk, red.l_interval(interval, l))) continue;
        best = std::max(best, std::abs(blk[k * red.l_count() + l]));
      }
      const double ratio = c * interval.length() * best;
      worst = std::min(worst, ratio);
      if (ratio < 1.0 - detail::inequality_slack) {
        report.add_counterexample({{"I", to_json(interval)},
                                   {"K", to_json(kk)},
                                   {"value", best},
                                   {"required", 1.0 / (c * interval.length())}});
      }
    }
  }
  report.worst_ratio = worst;
  report.add({"min_K max_L c|I||a|", report.counterexample_count == 0, worst, 1.0, detail::inequality_slack,
              nullptr});
  return report;
}

/// c = 2^i / (1 - (2^i - 1) b / 2^i)
inline double purely_mixing_constant(int i, double b) {
  const double two_i = std::ldexp(1.0, i);
  return two_i / (1.0 - (two_i - 1.0) * b / two_i);
}

/// c = 2 / (1 - b/3)
inline double sliced_constant(double b) { return 2.0 / (1.0 - b / 3.0); }

namespace detail {
inline scalar random_coefficient(std::mt19937_64& rng, double b) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double modulus = 1.0 + (b - 1.0) * unit(rng);
  const double phase = 2.0 * std::numbers::pi * unit(rng);
  return std::polar(modulus, phase);
}
}  // namespace detail

/// Complexity (i,i), prefactor 2^-i, c^I_{KK} = 0 and 1 <= |c^I_{KL}| <= b otherwise,
/// filled on every I that the grid at `resolution` resolves.
inline ShiftSpec make_purely_mixing(int i, double b, std::uint64_t seed, int resolution) {
  if (i < 1) throw parameter_out_of_range("purely mixing shifts need i >= 1");
  const double two_i = std::ldexp(1.0, i);
  if (!(b >= 1.0 && b < two_i / (two_i - 1.0))) {
    throw parameter_out_of_range("purely mixing b must lie in [1, 2^i/(2^i-1))");
  }
  ShiftSpec spec(i, i, 1.0 / two_i, b);
  std::mt19937_64 rng(seed);
  for (const auto& interval : all_intervals(resolution - 1 - i)) {
    for (std::size_t k = 0; k < spec.input_count(); ++k) {
      for (std::size_t l = 0; l < spec.output_count(); ++l) {
        spec.set_block_entry(interval, k, l, k == l ? scalar{} : detail::random_coefficient(rng, b));
      }
    }
  }
  return spec;
}

/// Complexity (i,j), prefactor 2^-(i+j)/2, coefficients with 1 <= |c| <= b on
/// even-level intervals only.
inline ShiftSpec make_sliced(int i, int j, double b, std::uint64_t seed, int resolution) {
  if (i < 0 || j < 0) throw parameter_out_of_range("complexity must be non-negative");
  if (!(b >= 1.0 && b < 3.0)) throw parameter_out_of_range("sliced b must lie in [1, 3)");
  ShiftSpec spec(i, j, std::pow(2.0, -0.5 * (i + j)), b, ScaleFilter::even);
  std::mt19937_64 rng(seed);
  for (const auto& interval : all_intervals(resolution - 1 - std::max(i, j))) {
    if (interval.level % 2 != 0) continue;
    for (std::size_t k = 0; k < spec.input_count(); ++k) {
      for (std::size_t l = 0; l < spec.output_count(); ++l) {
        spec.set_block_entry(interval, k, l, detail::random_coefficient(rng, b));
      }
    }
  }
  return spec;
}

}  // namespace dcl
