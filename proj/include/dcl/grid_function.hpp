#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dcl/dyadic.hpp"
#include "dcl/error.hpp"

namespace dcl {

using scalar = std::complex<double>;

/// Largest resolution accepted for grid functions (2D at this resolution is 2^24 cells).
inline constexpr int max_resolution = 24;

/// Piecewise constant function on [0,1) or [0,1)^2 with one value per finest
/// dyadic cell. 2D values are stored row-major: slot = i1 * 2^N + i2.
class GridFunction {
 public:
  GridFunction() = default;

  GridFunction(int dimension, int resolution)
      : dimension_(dimension), resolution_(resolution) {
    check_shape(dimension, resolution);
    values_.assign(expected_size(dimension, resolution), scalar{});
  }

  GridFunction(int dimension, int resolution, std::vector<scalar> values)
      : dimension_(dimension), resolution_(resolution), values_(std::move(values)) {
    check_shape(dimension, resolution);
    if (values_.size() != expected_size(dimension, resolution)) {
      throw dimension_mismatch("expected " + std::to_string(expected_size(dimension, resolution)) +
                               " values, got " + std::to_string(values_.size()));
    }
    for (const auto& v : values_) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw parameter_out_of_range("grid function values must be finite");
      }
    }
  }

  static GridFunction constant(int dimension, int resolution, scalar value) {
    GridFunction f(dimension, resolution);
    std::fill(f.values_.begin(), f.values_.end(), value);
    return f;
  }

  static GridFunction indicator(const DyadicInterval& interval, int resolution) {
    GridFunction f(1, resolution);
    const auto first = interval.first_cell(resolution);
    for (std::int64_t c = 0; c < interval.cell_count(resolution); ++c) f.values_[first + c] = 1.0;
    return f;
  }

  static GridFunction indicator(const DyadicRectangle& rect, int resolution) {
    GridFunction f(2, resolution);
    const auto side = f.side();
    const auto a0 = rect.first.first_cell(resolution);
    const auto b0 = rect.second.first_cell(resolution);
    for (std::int64_t a = 0; a < rect.first.cell_count(resolution); ++a) {
      for (std::int64_t b = 0; b < rect.second.cell_count(resolution); ++b) {
        f.values_[static_cast<std::size_t>((a0 + a) * side + b0 + b)] = 1.0;
      }
    }
    return f;
  }

  /// h_I sampled on the grid; requires level(I) < N.
  static GridFunction haar(const DyadicInterval& interval, int resolution) {
    GridFunction f(1, resolution);
    if (interval.level >= resolution) throw resolution_exceeded("h_I needs level(I) < N");
    const auto first = interval.first_cell(resolution);
    for (std::int64_t c = 0; c < interval.cell_count(resolution); ++c) {
      f.values_[first + c] = haar_value(interval, DyadicInterval(resolution, first + c));
    }
    return f;
  }

  /// Tensor product u(x1) v(x2) of two 1D functions at the same resolution.
  static GridFunction tensor(const GridFunction& u, const GridFunction& v) {
    if (u.dimension() != 1 || v.dimension() != 1 || u.resolution() != v.resolution()) {
      throw dimension_mismatch("tensor product needs two 1D functions at equal resolution");
    }
    GridFunction f(2, u.resolution());
    const auto side = f.side();
    for (std::int64_t a = 0; a < side; ++a) {
      for (std::int64_t b = 0; b < side; ++b) f.values_[a * side + b] = u.values_[a] * v.values_[b];
    }
    return f;
  }

  int dimension() const { return dimension_; }
  int resolution() const { return resolution_; }
  std::int64_t side() const { return std::int64_t{1} << resolution_; }
  std::size_t size() const { return values_.size(); }
  double cell_volume() const { return std::ldexp(1.0, -resolution_ * dimension_); }

  std::span<const scalar> values() const { return values_; }
  std::span<scalar> values() { return values_; }

  scalar operator[](std::size_t slot) const { return values_[slot]; }
  scalar& operator[](std::size_t slot) { return values_[slot]; }
  scalar at(std::int64_t i1, std::int64_t i2) const { return values_[i1 * side() + i2]; }
  scalar& at(std::int64_t i1, std::int64_t i2) { return values_[i1 * side() + i2]; }

  bool same_shape(const GridFunction& other) const {
    return dimension_ == other.dimension_ && resolution_ == other.resolution_;
  }

  bool is_real(double tolerance = 0.0) const {
    return std::all_of(values_.begin(), values_.end(),
                       [&](const scalar& v) { return std::abs(v.imag()) <= tolerance; });
  }

  GridFunction& operator+=(const GridFunction& o) { return combine(o, [](scalar& a, scalar b) { a += b; }); }
  GridFunction& operator-=(const GridFunction& o) { return combine(o, [](scalar& a, scalar b) { a -= b; }); }
  /// Pointwise product.
  GridFunction& operator*=(const GridFunction& o) { return combine(o, [](scalar& a, scalar b) { a *= b; }); }
  GridFunction& operator*=(scalar t) {
    for (auto& v : values_) v *= t;
    return *this;
  }
  GridFunction& operator+=(scalar t) {
    for (auto& v : values_) v += t;
    return *this;
  }

  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(GridFunction a, const GridFunction& b) { return a *= b; }
  friend GridFunction operator*(scalar t, GridFunction a) { return a *= t; }
  friend GridFunction operator*(GridFunction a, scalar t) { return a *= t; }

  /// sum |f|^2 * cell volume
  double squared_l2_norm() const {
    double acc = 0.0;
    for (const auto& v : values_) acc += std::norm(v);
    return acc * cell_volume();
  }
  double l2_norm() const { return std::sqrt(squared_l2_norm()); }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  template <class Op>
  GridFunction& combine(const GridFunction& o, Op op) {
    if (!same_shape(o)) throw dimension_mismatch("grid functions of different shape");
    for (std::size_t k = 0; k < values_.size(); ++k) op(values_[k], o.values_[k]);
    return *this;
  }

  static std::size_t expected_size(int dimension, int resolution) {
    return std::size_t{1} << (resolution * dimension);
  }

  static void check_shape(int dimension, int resolution) {
    if (dimension != 1 && dimension != 2) throw parameter_out_of_range("dimension must be 1 or 2");
    if (resolution < 1 || resolution * dimension > max_resolution) {
      throw parameter_out_of_range("resolution " + std::to_string(resolution) + " in dimension " +
                                   std::to_string(dimension));
    }
  }

  int dimension_ = 1;
  int resolution_ = 1;
  std::vector<scalar> values_;
};

inline scalar inner_product(const GridFunction& f, const GridFunction& g) {
  if (!f.same_shape(g)) throw dimension_mismatch("inner product of differently shaped functions");
  scalar acc{};
  for (std::size_t k = 0; k < f.size(); ++k) acc += f[k] * std::conj(g[k]);
  return acc * f.cell_volume();
}

/// Haar coefficients in heap layout.
///
/// Along one axis slot 0 holds the coefficient of the constant 1 on [0,1) and
/// slot 2^k + m holds f_I for I = (k, m), k < N. In 2D the slot of the pair
/// (a1, a2) is a1 * 2^N + a2, so the tensor basis {1, h_I} x {1, h_J} is covered;
/// slots with a1, a2 >= 1 are the doubly cancellative rectangles.
class HaarCoefficients {
 public:
  HaarCoefficients() = default;
  HaarCoefficients(int dimension, int resolution)
      : dimension_(dimension),
        resolution_(resolution),
        data_(std::size_t{1} << (resolution * dimension)) {}

  int dimension() const { return dimension_; }
  int resolution() const { return resolution_; }
  std::size_t side() const { return std::size_t{1} << resolution_; }
  std::size_t size() const { return data_.size(); }

  scalar mean() const { return data_[0]; }
  scalar& mean() { return data_[0]; }

  scalar at(const DyadicInterval& interval) const { return data_[checked_slot(interval)]; }
  scalar& at(const DyadicInterval& interval) { return data_[checked_slot(interval)]; }
  scalar at(const DyadicRectangle& rect) const {
    return data_[checked_slot(rect.first) * side() + checked_slot(rect.second)];
  }
  scalar& at(const DyadicRectangle& rect) {
    return data_[checked_slot(rect.first) * side() + checked_slot(rect.second)];
  }

  /// Raw access by axis slots (0 = mean layer).
  scalar slot(std::size_t a1, std::size_t a2 = 0) const {
    return dimension_ == 2 ? data_[a1 * side() + a2] : data_[a1];
  }

  std::span<const scalar> data() const { return data_; }
  std::span<scalar> data() { return data_; }

  double squared_norm() const {
    double acc = 0.0;
    for (const auto& v : data_) acc += std::norm(v);
    return acc;
  }

 private:
  std::size_t checked_slot(const DyadicInterval& interval) const {
    if (interval.level >= resolution_) {
      throw resolution_exceeded("no Haar coefficient for level " + std::to_string(interval.level));
    }
    return interval.heap_slot();
  }

  int dimension_ = 1;
  int resolution_ = 1;
  std::vector<scalar> data_;
};

namespace detail {

// In-place 1D Haar analysis of a strided line of 2^N cell values into heap layout.
inline void haar_analysis_line(scalar* line, std::ptrdiff_t stride, int resolution,
                               std::vector<scalar>& avg, std::vector<scalar>& out) {
  const std::size_t n = std::size_t{1} << resolution;
  avg.resize(n);
  out.resize(n);
  for (std::size_t c = 0; c < n; ++c) avg[c] = line[static_cast<std::ptrdiff_t>(c) * stride];
  for (int k = resolution - 1; k >= 0; --k) {
    const std::size_t count = std::size_t{1} << k;
    const double half_sqrt_len = 0.5 * std::sqrt(std::ldexp(1.0, -k));
    for (std::size_t m = 0; m < count; ++m) {
      const scalar l = avg[2 * m];
      const scalar r = avg[2 * m + 1];
      out[count + m] = half_sqrt_len * (r - l);
      avg[m] = 0.5 * (l + r);
    }
  }
  out[0] = avg[0];
  for (std::size_t c = 0; c < n; ++c) line[static_cast<std::ptrdiff_t>(c) * stride] = out[c];
}

inline void haar_synthesis_line(scalar* line, std::ptrdiff_t stride, int resolution,
                                std::vector<scalar>& avg, std::vector<scalar>& next) {
  const std::size_t n = std::size_t{1} << resolution;
  avg.resize(n);
  next.resize(n);
  avg[0] = line[0];
  for (int k = 0; k < resolution; ++k) {
    const std::size_t count = std::size_t{1} << k;
    const double inv_sqrt_len = std::sqrt(std::ldexp(1.0, k));
    for (std::size_t m = 0; m < count; ++m) {
      const scalar d = line[static_cast<std::ptrdiff_t>(count + m) * stride] * inv_sqrt_len;
      next[2 * m] = avg[m] - d;
      next[2 * m + 1] = avg[m] + d;
    }
    std::copy(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(2 * count), avg.begin());
  }
  for (std::size_t c = 0; c < n; ++c) line[static_cast<std::ptrdiff_t>(c) * stride] = avg[c];
}

// Applies a line transform along one axis of a 1D or 2D array (axis 1 = x1).
template <class LineOp>
void along_axis(std::span<scalar> data, int dimension, int resolution, int axis, LineOp op) {
  const std::ptrdiff_t side = std::ptrdiff_t{1} << resolution;
  if (dimension == 1) {
    op(data.data(), 1);
    return;
  }
  if (axis == 1) {
    for (std::ptrdiff_t b = 0; b < side; ++b) op(data.data() + b, side);
  } else {
    for (std::ptrdiff_t a = 0; a < side; ++a) op(data.data() + a * side, 1);
  }
}

}  // namespace detail

/// Haar analysis: mean and f_I = (f, h_I) for all I of level < N (tensor basis in 2D).
inline HaarCoefficients analysis(const GridFunction& f) {
  HaarCoefficients c(f.dimension(), f.resolution());
  std::copy(f.values().begin(), f.values().end(), c.data().begin());
  std::vector<scalar> avg, out;
  for (int axis = 1; axis <= f.dimension(); ++axis) {
    detail::along_axis(c.data(), f.dimension(), f.resolution(), axis,
                       [&](scalar* line, std::ptrdiff_t stride) {
                         detail::haar_analysis_line(line, stride, f.resolution(), avg, out);
                       });
  }
  return c;
}

/// Inverse of analysis.
inline GridFunction synthesis(const HaarCoefficients& c) {
  GridFunction f(c.dimension(), c.resolution());
  std::copy(c.data().begin(), c.data().end(), f.values().begin());
  std::vector<scalar> avg, next;
  for (int axis = 1; axis <= c.dimension(); ++axis) {
    detail::along_axis(f.values(), c.dimension(), c.resolution(), axis,
                       [&](scalar* line, std::ptrdiff_t stride) {
                         detail::haar_synthesis_line(line, stride, c.resolution(), avg, next);
                       });
  }
  return f;
}

/// Exact mean of f over a dyadic interval.
inline scalar average(const GridFunction& f, const DyadicInterval& interval) {
  if (f.dimension() != 1) throw dimension_mismatch("interval average of a 2D function");
  if (interval.level > f.resolution()) throw resolution_exceeded("average below grid scale");
  const auto first = interval.first_cell(f.resolution());
  const auto count = interval.cell_count(f.resolution());
  scalar acc{};
  for (std::int64_t c = 0; c < count; ++c) acc += f[static_cast<std::size_t>(first + c)];
  return acc / static_cast<double>(count);
}

/// Exact mean of f over a dyadic rectangle.
inline scalar average(const GridFunction& f, const DyadicRectangle& rect) {
  if (f.dimension() != 2) throw dimension_mismatch("rectangle average of a 1D function");
  const int n = f.resolution();
  if (rect.first.level > n || rect.second.level > n) throw resolution_exceeded("average below grid scale");
  const auto a0 = rect.first.first_cell(n), na = rect.first.cell_count(n);
  const auto b0 = rect.second.first_cell(n), nb = rect.second.cell_count(n);
  scalar acc{};
  for (std::int64_t a = 0; a < na; ++a) {
    for (std::int64_t b = 0; b < nb; ++b) acc += f.at(a0 + a, b0 + b);
  }
  return acc / static_cast<double>(na * nb);
}

/// Which side of the split a local projection keeps.
enum class ProjectionPart { inside, outside };

/// P_I b (inside: coefficients of h_K with K in D(I)) or P_{I^c} b (all the rest, mean included).
inline GridFunction local_projection(const GridFunction& b, const DyadicInterval& interval,
                                     ProjectionPart part) {
  if (b.dimension() != 1) throw dimension_mismatch("interval projection of a 2D function");
  auto c = analysis(b);
  const bool keep_inside = part == ProjectionPart::inside;
  c.mean() = keep_inside ? scalar{} : c.mean();
  for (std::size_t s = 1; s < c.size(); ++s) {
    const bool in = interval.contains(DyadicInterval::from_heap_slot(s));
    if (in != keep_inside) c.data()[s] = 0.0;
  }
  return synthesis(c);
}

namespace detail {
// Along one axis, the slot belongs to the "strictly coarser than R_i" family
// (mean layer or an interval strictly containing R_i).
inline bool coarser_than(std::size_t slot, const DyadicInterval& side_interval) {
  return slot == 0 || DyadicInterval::from_heap_slot(slot).strictly_contains(side_interval);
}
}  // namespace detail

/// 2D split into the family R^c = {K : R_i strictly inside K_i, i = 1,2} (mean
/// layers count as containing everything) and its complement (the family "R").
inline GridFunction local_projection(const GridFunction& b, const DyadicRectangle& rect,
                                     ProjectionPart part) {
  if (b.dimension() != 2) throw dimension_mismatch("rectangle projection of a 1D function");
  auto c = analysis(b);
  const std::size_t side = c.side();
  const bool keep_outside = part == ProjectionPart::outside;
  for (std::size_t a1 = 0; a1 < side; ++a1) {
    const bool coarse1 = detail::coarser_than(a1, rect.first);
    for (std::size_t a2 = 0; a2 < side; ++a2) {
      const bool in_complement = coarse1 && detail::coarser_than(a2, rect.second);
      if (in_complement != keep_outside) c.data()[a1 * side + a2] = 0.0;
    }
  }
  return synthesis(c);
}

}  // namespace dcl
