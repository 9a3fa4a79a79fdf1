#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dcl/dyadic.hpp"
#include "dcl/grid_function.hpp"

namespace dcl {

/// Keeps the scales 2^-n <= |I| <= 2^n. On [0,1) only the lower bound bites,
/// so the window is "levels 0..n".
struct ScaleWindow {
  int n = 0;

  bool admits(const DyadicInterval& interval) const { return interval.level <= n; }
  int max_level() const { return n; }
};

namespace detail {

inline int window_cap(const std::optional<ScaleWindow>& window, int cap) {
  if (!window) return cap;
  if (window->n < 0) throw parameter_out_of_range("scale window must be non-negative");
  return std::min(cap, window->max_level());
}

// S on one heap-layout coefficient line: f_{I+} moves to h_{I-}, -f_{I-} moves
// to h_{I+}, for every I of level <= max_level. Mean and root slots are dropped.
inline void shift_line(const scalar* in, std::ptrdiff_t in_stride, scalar* out,
                       std::ptrdiff_t out_stride, int resolution, int max_level) {
  const std::size_t n = std::size_t{1} << resolution;
  for (std::size_t s = 0; s < n; ++s) out[static_cast<std::ptrdiff_t>(s) * out_stride] = 0.0;
  for (int k = 0; k <= max_level; ++k) {
    const std::size_t count = std::size_t{1} << k;
    for (std::size_t m = 0; m < count; ++m) {
      const auto minus = static_cast<std::ptrdiff_t>(2 * (count + m));
      const auto plus = minus + 1;
      out[minus * out_stride] = in[plus * in_stride];
      out[plus * out_stride] = -in[minus * in_stride];
    }
  }
}

}  // namespace detail

/// S in Haar coordinates, optionally truncated to a scale window.
inline HaarCoefficients shift_coefficients(const HaarCoefficients& c, int axis = 1,
                                           const std::optional<ScaleWindow>& window = std::nullopt) {
  HaarCoefficients out(c.dimension(), c.resolution());
  const int cap = detail::window_cap(window, c.resolution() - 2);
  const auto side = static_cast<std::ptrdiff_t>(c.side());
  if (c.dimension() == 1) {
    detail::shift_line(c.data().data(), 1, out.data().data(), 1, c.resolution(), cap);
  } else if (axis == 1) {
    for (std::ptrdiff_t b = 0; b < side; ++b) {
      detail::shift_line(c.data().data() + b, side, out.data().data() + b, side, c.resolution(), cap);
    }
  } else {
    for (std::ptrdiff_t a = 0; a < side; ++a) {
      detail::shift_line(c.data().data() + a * side, 1, out.data().data() + a * side, 1,
                         c.resolution(), cap);
    }
  }
  return out;
}

/// Sf = sum_I (f_{I+} h_{I-} - f_{I-} h_{I+}) on [0,1). The mean and h_[0,1)
/// are annihilated since their images live outside the unit interval.
inline GridFunction apply_S(const GridFunction& f, const std::optional<ScaleWindow>& window = std::nullopt) {
  if (f.dimension() != 1) throw dimension_mismatch("apply_S expects a 1D function");
  return synthesis(shift_coefficients(analysis(f), 1, window));
}

/// S acting in variable `axis` of a 2D function.
inline GridFunction apply_S_coordinate(const GridFunction& f, int axis,
                                       const std::optional<ScaleWindow>& window = std::nullopt) {
  if (f.dimension() != 2) throw dimension_mismatch("apply_S_coordinate expects a 2D function");
  if (axis != 1 && axis != 2) throw parameter_out_of_range("axis must be 1 or 2");
  // only the acting axis needs the Haar transform
  const int n = f.resolution();
  const int cap = detail::window_cap(window, n - 2);
  const auto side = static_cast<std::ptrdiff_t>(f.side());
  const std::ptrdiff_t stride = axis == 1 ? side : 1;
  const std::ptrdiff_t step = axis == 1 ? 1 : side;
  GridFunction out(2, n);
  std::vector<scalar> line(static_cast<std::size_t>(side)), shifted(line.size()), a, b;
  for (std::ptrdiff_t t = 0; t < side; ++t) {
    for (std::ptrdiff_t c = 0; c < side; ++c) line[static_cast<std::size_t>(c)] = f[static_cast<std::size_t>(t * step + c * stride)];
    detail::haar_analysis_line(line.data(), 1, n, a, b);
    detail::shift_line(line.data(), 1, shifted.data(), 1, n, cap);
    detail::haar_synthesis_line(shifted.data(), 1, n, a, b);
    for (std::ptrdiff_t c = 0; c < side; ++c) out[static_cast<std::size_t>(t * step + c * stride)] = shifted[static_cast<std::size_t>(c)];
  }
  return out;
}

/// S1 S2 f = sum_{I,J} sum_{eps,delta} eps*delta f_{I_eps x J_delta} h_{I_-eps x J_-delta},
/// evaluated rectangle by rectangle in Haar coordinates.
inline GridFunction apply_tensor_shift(const GridFunction& f,
                                       const std::optional<ScaleWindow>& window = std::nullopt) {
  if (f.dimension() != 2) throw dimension_mismatch("apply_tensor_shift expects a 2D function");
  const auto in = analysis(f);
  HaarCoefficients out(2, f.resolution());
  const int cap = detail::window_cap(window, f.resolution() - 2);
  const std::size_t side = in.side();
  for (int k1 = 0; k1 <= cap; ++k1) {
    for (std::int64_t m1 = 0; m1 < (std::int64_t{1} << k1); ++m1) {
      const DyadicInterval i(k1, m1);
      const std::size_t i_slot[2] = {i.left_child().heap_slot(), i.right_child().heap_slot()};
      for (int k2 = 0; k2 <= cap; ++k2) {
        for (std::int64_t m2 = 0; m2 < (std::int64_t{1} << k2); ++m2) {
          const DyadicInterval j(k2, m2);
          const std::size_t j_slot[2] = {j.left_child().heap_slot(), j.right_child().heap_slot()};
          // index 0 is "-", index 1 is "+"
          for (int e = 0; e < 2; ++e) {
            for (int d = 0; d < 2; ++d) {
              const double sign = (e == 1 ? 1.0 : -1.0) * (d == 1 ? 1.0 : -1.0);
              out.data()[i_slot[1 - e] * side + j_slot[1 - d]] =
                  sign * in.data()[i_slot[e] * side + j_slot[d]];
            }
          }
        }
      }
    }
  }
  return synthesis(out);
}

enum class ScaleFilter { all, even };

/// Coefficient table of a Haar shift of complexity (i, j):
///   T f = prefactor * sum_I sum_{K in ch_i(I), L in ch_j(I)} c^I_{KL} f_K h_L.
/// Coefficients are stored per I as a dense 2^i x 2^j block; absent I means zero.
class ShiftSpec {
 public:
  ShiftSpec() = default;
  ShiftSpec(int input_depth, int output_depth, double prefactor, double coefficient_bound = 1.0,
            ScaleFilter filter = ScaleFilter::all)
      : i_(input_depth),
        j_(output_depth),
        prefactor_(prefactor),
        coefficient_bound_(coefficient_bound),
        filter_(filter) {
    if (i_ < 0 || j_ < 0 || i_ > 16 || j_ > 16) throw parameter_out_of_range("shift complexity");
    if (!(prefactor_ > 0.0)) throw parameter_out_of_range("shift prefactor must be positive");
    if (!(coefficient_bound_ >= 0.0)) throw parameter_out_of_range("coefficient bound");
  }

  /// The shift S written as a complexity (1,1) shift on every I of level <= N-2.
  static ShiftSpec encoding_of_S(int resolution) {
    ShiftSpec spec(1, 1, 1.0, 1.0);
    for (const auto& interval : all_intervals(resolution - 2)) {
      const auto [minus, plus] = interval.children();
      spec.set(interval, plus, minus, 1.0);
      spec.set(interval, minus, plus, -1.0);
    }
    return spec;
  }

  int input_depth() const { return i_; }
  int output_depth() const { return j_; }
  int max_depth() const { return std::max(i_, j_); }
  double prefactor() const { return prefactor_; }
  double coefficient_bound() const { return coefficient_bound_; }
  ScaleFilter scale_filter() const { return filter_; }
  std::size_t input_count() const { return std::size_t{1} << i_; }
  std::size_t output_count() const { return std::size_t{1} << j_; }

  /// Multiplier on the unit kernel bound 2/|J|: prefactor * coefficient_bound * 2^{(i+j)/2}.
  double kernel_scale() const {
    return prefactor_ * coefficient_bound_ * std::pow(2.0, 0.5 * (i_ + j_));
  }

  bool active(const DyadicInterval& interval) const {
    return filter_ == ScaleFilter::all || interval.level % 2 == 0;
  }

  void set(const DyadicInterval& interval, const DyadicInterval& k, const DyadicInterval& l, scalar c) {
    if (k.level != interval.level + i_ || !interval.contains(k)) {
      throw parameter_out_of_range("K must lie in ch_i(I)");
    }
    if (l.level != interval.level + j_ || !interval.contains(l)) {
      throw parameter_out_of_range("L must lie in ch_j(I)");
    }
    block(interval)[offset(interval, k, i_) * output_count() + offset(interval, l, j_)] = c;
  }

  void set_block_entry(const DyadicInterval& interval, std::size_t k_offset, std::size_t l_offset, scalar c) {
    block(interval)[k_offset * output_count() + l_offset] = c;
  }

  scalar coefficient(const DyadicInterval& interval, const DyadicInterval& k, const DyadicInterval& l) const {
    const auto it = blocks_.find(interval);
    if (it == blocks_.end()) return 0.0;
    if (k.level != interval.level + i_ || l.level != interval.level + j_ || !interval.contains(k) ||
        !interval.contains(l)) {
      return 0.0;
    }
    return it->second[offset(interval, k, i_) * output_count() + offset(interval, l, j_)];
  }

  /// Block of I (row = K offset, column = L offset), or nullptr when absent.
  const std::vector<scalar>* find_block(const DyadicInterval& interval) const {
    const auto it = blocks_.find(interval);
    return it == blocks_.end() ? nullptr : &it->second;
  }

  const std::map<DyadicInterval, std::vector<scalar>>& blocks() const { return blocks_; }

  /// Deepest level carrying a block, or -1.
  int deepest_level() const {
    int deepest = -1;
    for (const auto& [interval, _] : blocks_) deepest = std::max(deepest, interval.level);
    return deepest;
  }

  /// Every coefficient must address Haar functions that exist on the grid.
  void require_resolution(int resolution) const {
    const int deepest = deepest_level();
    if (deepest >= 0 && deepest + max_depth() > resolution - 1) {
      throw resolution_exceeded("shift coefficients at level " + std::to_string(deepest) +
                                " with complexity (" + std::to_string(i_) + "," + std::to_string(j_) +
                                ") need resolution > " + std::to_string(deepest + max_depth()));
    }
  }

  double max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& [_, b] : blocks_) {
      for (const auto& c : b) m = std::max(m, std::abs(c));
    }
    return m;
  }

 private:
  static std::size_t offset(const DyadicInterval& interval, const DyadicInterval& child, int depth) {
    return static_cast<std::size_t>(child.index - (interval.index << depth));
  }

  std::vector<scalar>& block(const DyadicInterval& interval) {
    auto& b = blocks_[interval];
    if (b.empty()) b.assign(input_count() * output_count(), scalar{});
    return b;
  }

  int i_ = 0;
  int j_ = 0;
  double prefactor_ = 1.0;
  double coefficient_bound_ = 1.0;
  ScaleFilter filter_ = ScaleFilter::all;
  std::map<DyadicInterval, std::vector<scalar>> blocks_;
};

/// Exact finite sum T f on the grid; the output coefficient of h_L accumulates
/// prefactor * c^I_{KL} * f_K.
inline GridFunction apply_general_shift(const ShiftSpec& spec, const GridFunction& f,
                                        const std::optional<ScaleWindow>& window = std::nullopt) {
  if (f.dimension() != 1) throw dimension_mismatch("general shifts act on 1D functions");
  spec.require_resolution(f.resolution());
  const auto in = analysis(f);
  HaarCoefficients out(1, f.resolution());
  const int cap = detail::window_cap(window, f.resolution());
  const std::size_t nk = spec.input_count();
  const std::size_t nl = spec.output_count();
  for (const auto& [interval, block] : spec.blocks()) {
    if (interval.level > cap || !spec.active(interval)) continue;
    const std::size_t k0 = DyadicInterval(interval.level + spec.input_depth(),
                                          interval.index << spec.input_depth()).heap_slot();
    const std::size_t l0 = DyadicInterval(interval.level + spec.output_depth(),
                                          interval.index << spec.output_depth()).heap_slot();
    for (std::size_t k = 0; k < nk; ++k) {
      const scalar fk = in.data()[k0 + k];
      if (fk == scalar{}) continue;
      for (std::size_t l = 0; l < nl; ++l) {
        out.data()[l0 + l] += spec.prefactor() * block[k * nl + l] * fk;
      }
    }
  }
  return synthesis(out);
}

}  // namespace dcl
