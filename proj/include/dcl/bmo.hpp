#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "dcl/dyadic.hpp"
#include "dcl/grid_function.hpp"
#include "dcl/report.hpp"

namespace dcl {

/// Strictly positive, finite, real weight on the grid.
class Weight {
 public:
  explicit Weight(GridFunction data) : data_(std::move(data)), cache_(std::make_shared<Cache>()) {
    values_.reserve(data_.size());
    for (const auto& v : data_.values()) {
      if (v.imag() != 0.0 || !(v.real() > 0.0) || !std::isfinite(v.real())) {
        throw parameter_out_of_range("weights must be strictly positive and real");
      }
      values_.push_back(v.real());
    }
  }

  static Weight constant(int dimension, int resolution, double value = 1.0) {
    return Weight(GridFunction::constant(dimension, resolution, value));
  }

  const GridFunction& function() const { return data_; }
  int dimension() const { return data_.dimension(); }
  int resolution() const { return data_.resolution(); }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  const std::vector<double>& values() const { return values_; }

  Weight scaled(double t) const { return Weight(data_ * scalar(t)); }

  /// Memoized [w]_{A_p}; `compute` runs at most once per p.
  template <class F>
  double cached_characteristic(double p, F&& compute) const {
    {
      std::lock_guard lock(cache_->mutex);
      if (auto it = cache_->values.find(p); it != cache_->values.end()) return it->second;
    }
    const double v = compute();
    std::lock_guard lock(cache_->mutex);
    cache_->values.emplace(p, v);
    return v;
  }

 private:
  struct Cache {
    std::mutex mutex;
    std::map<double, double> values;
  };
  GridFunction data_;
  std::vector<double> values_;
  std::shared_ptr<Cache> cache_;
};

/// Value of a supremum over dyadic intervals (1D) or rectangles (2D) and the
/// first index, in (level, index) order, attaining it.
struct BmoResult {
  double value = 0.0;
  int dimension = 1;
  DyadicInterval interval;
  DyadicRectangle rectangle;

  json maximizer_json() const { return dimension == 1 ? to_json(interval) : to_json(rectangle); }
};

namespace detail {

inline constexpr double tie_tolerance = 1e-12;

inline bool improves(double candidate, double best) {
  return candidate > best * (1.0 + tie_tolerance) && candidate > best + 1e-300;
}

// Calls visit(interval) for all dyadic intervals of level min_level..N, or
// visit(rect) for all dyadic rectangles, in lexicographic (level, index) order.
template <class Visit>
void for_each_interval(int resolution, int min_level, Visit&& visit) {
  for (const auto& i : all_intervals(resolution, min_level)) visit(i);
}

template <class Visit>
void for_each_rectangle(int resolution, int min_level, Visit&& visit) {
  const auto intervals = all_intervals(resolution, min_level);
  for (const auto& i : intervals)
    for (const auto& j : intervals) visit(DyadicRectangle{i, j});
}

// Generic sup over the dyadic family of the dimension of `shape`. `eval`
// returns the quantity whose max is sought.
template <class EvalI, class EvalR>
BmoResult dyadic_sup(int dimension, int resolution, int min_level, EvalI&& eval_interval, EvalR&& eval_rect) {
  BmoResult best;
  best.dimension = dimension;
  bool first = true;
  if (dimension == 1) {
    for_each_interval(resolution, min_level, [&](const DyadicInterval& i) {
      const double v = eval_interval(i);
      if (first || improves(v, best.value)) {
        best.value = v;
        best.interval = i;
        first = false;
      }
    });
  } else {
    for_each_rectangle(resolution, min_level, [&](const DyadicRectangle& r) {
      const double v = eval_rect(r);
      if (first || improves(v, best.value)) {
        best.value = v;
        best.rectangle = r;
        first = false;
      }
    });
  }
  return best;
}

// Cells of a rectangle in row-major order.
template <class F>
void for_cells(const DyadicRectangle& r, int n, F&& f) {
  const auto a0 = r.first.first_cell(n), na = r.first.cell_count(n);
  const auto b0 = r.second.first_cell(n), nb = r.second.cell_count(n);
  const auto side = std::int64_t{1} << n;
  for (std::int64_t a = 0; a < na; ++a)
    for (std::int64_t b = 0; b < nb; ++b) f(static_cast<std::size_t>((a0 + a) * side + b0 + b));
}

template <class F>
void for_cells(const DyadicInterval& i, int n, F&& f) {
  const auto first = i.first_cell(n);
  for (std::int64_t c = 0; c < i.cell_count(n); ++c) f(static_cast<std::size_t>(first + c));
}

// (1/sum mu) * sum |b - <b>_E|^p lambda over the cells of E; null weights mean Lebesgue.
template <class Region>
double weighted_oscillation(const GridFunction& b, const Region& region, double p, const Weight* mu,
                            const Weight* lambda) {
  const int n = b.resolution();
  scalar mean{};
  std::size_t count = 0;
  for_cells(region, n, [&](std::size_t k) {
    mean += b[k];
    ++count;
  });
  mean /= static_cast<double>(count);
  double num = 0.0;
  double den = 0.0;
  for_cells(region, n, [&](std::size_t k) {
    num += std::pow(std::abs(b[k] - mean), p) * (lambda ? (*lambda)[k] : 1.0);
    den += mu ? (*mu)[k] : 1.0;
  });
  return num / den;
}

inline void require_p(double p, double lower = 1.0) {
  if (!(p >= lower) || !std::isfinite(p)) throw parameter_out_of_range("exponent p out of range");
}

inline void require_shape(const GridFunction& b, const Weight& w) {
  if (b.dimension() != w.dimension() || b.resolution() != w.resolution()) {
    throw dimension_mismatch("weight and symbol shapes differ");
  }
}

}  // namespace detail

/// ||b||_{p,BMO} = sup_I ((1/|I|) int_I |b - <b>_I|^p)^{1/p} over dyadic I of level >= min_level.
inline BmoResult bmo_norm(const GridFunction& b, double p, int min_level = 0) {
  if (b.dimension() != 1) throw dimension_mismatch("bmo_norm expects a 1D symbol");
  detail::require_p(p);
  auto r = detail::dyadic_sup(
      1, b.resolution(), min_level,
      [&](const DyadicInterval& i) { return detail::weighted_oscillation(b, i, p, nullptr, nullptr); },
      [](const DyadicRectangle&) { return 0.0; });
  r.value = std::pow(r.value, 1.0 / p);
  return r;
}

/// Little bmo: sup over dyadic rectangles of ((1/|R|) int_R |b - <b>_R|^p)^{1/p}.
inline BmoResult little_bmo_norm(const GridFunction& b, double p, int min_level = 0) {
  if (b.dimension() != 2) throw dimension_mismatch("little_bmo_norm expects a 2D symbol");
  detail::require_p(p);
  auto r = detail::dyadic_sup(
      2, b.resolution(), min_level, [](const DyadicInterval&) { return 0.0; },
      [&](const DyadicRectangle& rect) { return detail::weighted_oscillation(b, rect, p, nullptr, nullptr); });
  r.value = std::pow(r.value, 1.0 / p);
  return r;
}

/// (1/|R|) int_R |b - <b>_{R2}(x1) - <b>_{R1}(x2) + <b>_R|^2
inline double rectangular_oscillation(const GridFunction& b, const DyadicRectangle& rect) {
  const int n = b.resolution();
  const auto a0 = rect.first.first_cell(n), na = rect.first.cell_count(n);
  const auto b0 = rect.second.first_cell(n), nb = rect.second.cell_count(n);
  std::vector<scalar> row_mean(static_cast<std::size_t>(na)), col_mean(static_cast<std::size_t>(nb));
  scalar mean{};
  for (std::int64_t a = 0; a < na; ++a) {
    for (std::int64_t c = 0; c < nb; ++c) {
      const scalar v = b.at(a0 + a, b0 + c);
      row_mean[static_cast<std::size_t>(a)] += v;
      col_mean[static_cast<std::size_t>(c)] += v;
      mean += v;
    }
  }
  for (auto& v : row_mean) v /= static_cast<double>(nb);
  for (auto& v : col_mean) v /= static_cast<double>(na);
  mean /= static_cast<double>(na * nb);
  double acc = 0.0;
  for (std::int64_t a = 0; a < na; ++a) {
    for (std::int64_t c = 0; c < nb; ++c) {
      acc += std::norm(b.at(a0 + a, b0 + c) - row_mean[static_cast<std::size_t>(a)] -
                       col_mean[static_cast<std::size_t>(c)] + mean);
    }
  }
  return acc / static_cast<double>(na * nb);
}

/// Rectangular BMO with the exponent fixed at 2.
inline BmoResult rectangular_bmo_norm(const GridFunction& b, double p = 2.0, int min_level = 0) {
  if (b.dimension() != 2) throw dimension_mismatch("rectangular_bmo_norm expects a 2D symbol");
  if (p != 2.0) throw parameter_out_of_range("rectangular BMO is defined with p = 2 only");
  auto r = detail::dyadic_sup(
      2, b.resolution(), min_level, [](const DyadicInterval&) { return 0.0; },
      [&](const DyadicRectangle& rect) { return rectangular_oscillation(b, rect); });
  r.value = std::sqrt(r.value);
  return r;
}

/// sup over dyadic R of <w>_R <w^{-1/(p-1)}>_R^{p-1}.
inline double ap_characteristic(const Weight& w, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw parameter_out_of_range("A_p needs 1 < p < inf");
  return w.cached_characteristic(p, [&] {
    const double q = -1.0 / (p - 1.0);
    std::vector<double> dual(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) dual[k] = std::pow(w[k], q);
    auto eval = [&](const auto& region) {
      double s = 0.0, t = 0.0;
      std::size_t count = 0;
      detail::for_cells(region, w.resolution(), [&](std::size_t k) {
        s += w[k];
        t += dual[k];
        ++count;
      });
      const double cnt = static_cast<double>(count);
      return (s / cnt) * std::pow(t / cnt, p - 1.0);
    };
    return detail::dyadic_sup(w.dimension(), w.resolution(), 0, eval, eval).value;
  });
}

/// Same quantity with the supremum over every grid-aligned interval
/// [a 2^-N, b 2^-N) (1D) or product of such intervals (2D).
inline double ap_characteristic_grid_aligned(const Weight& w, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw parameter_out_of_range("A_p needs 1 < p < inf");
  const double q = -1.0 / (p - 1.0);
  const auto side = static_cast<std::size_t>(std::int64_t{1} << w.resolution());
  double best = 0.0;
  if (w.dimension() == 1) {
    std::vector<double> s(side + 1, 0.0), t(side + 1, 0.0);
    for (std::size_t k = 0; k < side; ++k) {
      s[k + 1] = s[k] + w[k];
      t[k + 1] = t[k] + std::pow(w[k], q);
    }
    for (std::size_t a = 0; a < side; ++a) {
      for (std::size_t b = a + 1; b <= side; ++b) {
        const double len = static_cast<double>(b - a);
        best = std::max(best, (s[b] - s[a]) / len * std::pow((t[b] - t[a]) / len, p - 1.0));
      }
    }
    return best;
  }
  const std::size_t stride = side + 1;
  std::vector<double> s(stride * stride, 0.0), t(stride * stride, 0.0);
  for (std::size_t a = 0; a < side; ++a) {
    for (std::size_t b = 0; b < side; ++b) {
      const double v = w[a * side + b];
      s[(a + 1) * stride + b + 1] = v + s[a * stride + b + 1] + s[(a + 1) * stride + b] - s[a * stride + b];
      const double d = std::pow(v, q);
      t[(a + 1) * stride + b + 1] = d + t[a * stride + b + 1] + t[(a + 1) * stride + b] - t[a * stride + b];
    }
  }
  auto box = [&](const std::vector<double>& m, std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
    return m[a1 * stride + b1] - m[a0 * stride + b1] - m[a1 * stride + b0] + m[a0 * stride + b0];
  };
  for (std::size_t a0 = 0; a0 < side; ++a0)
    for (std::size_t a1 = a0 + 1; a1 <= side; ++a1)
      for (std::size_t b0 = 0; b0 < side; ++b0)
        for (std::size_t b1 = b0 + 1; b1 <= side; ++b1) {
          const double area = static_cast<double>((a1 - a0) * (b1 - b0));
          best = std::max(best, box(s, a0, a1, b0, b1) / area *
                                    std::pow(box(t, a0, a1, b0, b1) / area, p - 1.0));
        }
  return best;
}

/// sup_R ((1/mu(R)) int_R |b - <b>_R|^p lambda)^{1/p}; intervals in 1D, rectangles in 2D.
inline BmoResult weighted_bmo_norm(const GridFunction& b, double p, const Weight& mu, const Weight& lambda,
                                   int min_level = 0) {
  detail::require_p(p);
  detail::require_shape(b, mu);
  detail::require_shape(b, lambda);
  auto eval = [&](const auto& region) {
    // mu(R) uses cell masses; the cell volume cancels against the one in the integral
    return detail::weighted_oscillation(b, region, p, &mu, &lambda);
  };
  auto r = detail::dyadic_sup(b.dimension(), b.resolution(), min_level, eval, eval);
  r.value = std::pow(r.value, 1.0 / p);
  return r;
}

namespace detail {

// Projection of b|_R onto span{h_K x h_L : K in D(R1), L in D(R2)}, computed
// by a local Haar transform of the restriction (returned row-major on R).
inline std::vector<scalar> doubly_cancellative_part(const GridFunction& b, const DyadicRectangle& rect) {
  const int n = b.resolution();
  const int r1 = n - rect.first.level;
  const int r2 = n - rect.second.level;
  const std::size_t n1 = std::size_t{1} << r1;
  const std::size_t n2 = std::size_t{1} << r2;
  const auto a0 = rect.first.first_cell(n), b0 = rect.second.first_cell(n);
  std::vector<scalar> local(n1 * n2);
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t c = 0; c < n2; ++c)
      local[a * n2 + c] = b.at(a0 + static_cast<std::int64_t>(a), b0 + static_cast<std::int64_t>(c));
  std::vector<scalar> t1, t2;
  const auto s2 = static_cast<std::ptrdiff_t>(n2);
  for (std::size_t c = 0; c < n2; ++c) haar_analysis_line(local.data() + c, s2, r1, t1, t2);
  for (std::size_t a = 0; a < n1; ++a) haar_analysis_line(local.data() + a * n2, 1, r2, t1, t2);
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t c = 0; c < n2; ++c)
      if (a == 0 || c == 0) local[a * n2 + c] = 0.0;
  for (std::size_t a = 0; a < n1; ++a) haar_synthesis_line(local.data() + a * n2, 1, r2, t1, t2);
  for (std::size_t c = 0; c < n2; ++c) haar_synthesis_line(local.data() + c, s2, r1, t1, t2);
  return local;
}

}  // namespace detail

/// sup_R ((1/mu(R)) int_R |sum_{K in D(R)} b_K h_K|^2 lambda)^{1/2}, with the
/// inner sum over doubly cancellative Haar rectangles inside R.
inline BmoResult weighted_rectangular_bloom_norm(const GridFunction& b, const Weight& mu, const Weight& lambda,
                                                 int min_level = 0) {
  if (b.dimension() != 2) throw dimension_mismatch("Bloom rectangular norm expects a 2D symbol");
  detail::require_shape(b, mu);
  detail::require_shape(b, lambda);
  const int n = b.resolution();
  auto eval_rect = [&](const DyadicRectangle& rect) {
    const auto part = detail::doubly_cancellative_part(b, rect);
    double num = 0.0, den = 0.0;
    std::size_t k = 0;
    detail::for_cells(rect, n, [&](std::size_t cell) {
      num += std::norm(part[k++]) * lambda[cell];
      den += mu[cell];
    });
    return num / den;
  };
  auto r = detail::dyadic_sup(2, n, min_level, [](const DyadicInterval&) { return 0.0; }, eval_rect);
  r.value = std::sqrt(r.value);
  return r;
}

}  // namespace dcl
