#pragma once

// Brute-force reference computations. These deliberately avoid the library's
// fast paths (heap layouts, transforms, caches) and evaluate definitions directly.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "dcl/dyadic.hpp"
#include "dcl/grid_function.hpp"
#include "dcl/shift.hpp"

namespace oracle {

using dcl::DyadicInterval;
using dcl::DyadicRectangle;
using dcl::GridFunction;
using dcl::scalar;

inline GridFunction random_function(std::uint64_t seed, int dimension, int resolution, bool complex_values = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  GridFunction f(dimension, resolution);
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double re = g(rng);
    f[k] = complex_values ? scalar(re, g(rng)) : scalar(re, 0.0);
  }
  return f;
}

/// Value of the 2^-N cell of index c under h_I, from the definition.
inline double h(const DyadicInterval& interval, std::int64_t cell, int resolution) {
  const double x = (static_cast<double>(cell) + 0.5) * std::ldexp(1.0, -resolution);
  if (x < interval.left() || x >= interval.right()) return 0.0;
  const double mid = 0.5 * (interval.left() + interval.right());
  return (x < mid ? -1.0 : 1.0) / std::sqrt(interval.length());
}

/// (f, h_I) by quadrature.
inline scalar haar_coefficient(const GridFunction& f, const DyadicInterval& interval) {
  const int n = f.resolution();
  scalar acc{};
  for (std::int64_t c = 0; c < f.side(); ++c) acc += f[static_cast<std::size_t>(c)] * h(interval, c, n);
  return acc * std::ldexp(1.0, -n);
}

/// (f, h_I x h_J) by quadrature.
inline scalar haar_coefficient(const GridFunction& f, const DyadicRectangle& rect) {
  const int n = f.resolution();
  scalar acc{};
  for (std::int64_t a = 0; a < f.side(); ++a) {
    const double ha = h(rect.first, a, n);
    if (ha == 0.0) continue;
    for (std::int64_t b = 0; b < f.side(); ++b) acc += f.at(a, b) * ha * h(rect.second, b, n);
  }
  return acc * std::ldexp(1.0, -2 * n);
}

/// S f = sum_I (f_{I+} h_{I-} - f_{I-} h_{I+}) summed over every I whose
/// grandchildren still resolve on the grid.
inline GridFunction apply_S(const GridFunction& f, int max_level = -1) {
  const int n = f.resolution();
  if (max_level < 0) max_level = n - 2;
  GridFunction out(1, n);
  for (const auto& interval : dcl::all_intervals(max_level)) {
    const auto [minus, plus] = interval.children();
    const scalar fp = haar_coefficient(f, plus);
    const scalar fm = haar_coefficient(f, minus);
    for (std::int64_t c = 0; c < f.side(); ++c) {
      out[static_cast<std::size_t>(c)] += fp * h(minus, c, n) - fm * h(plus, c, n);
    }
  }
  return out;
}

/// Full sum of the tensor kernel over every rectangle that the grid resolves,
/// evaluated at cell centres of x = (x1, x2) and y = (y1, y2).
/// Returns the value and the number of rectangles with a nonzero term.
struct KernelSum {
  double value = 0.0;
  int contributing = 0;
};

inline KernelSum tensor_kernel_full_sum(std::int64_t x1, std::int64_t x2, std::int64_t y1, std::int64_t y2,
                                        int resolution) {
  KernelSum out;
  if (x1 == y1 || x2 == y2) return out;
  const auto intervals = dcl::all_intervals(resolution - 2);
  // sum_{eps,delta} eps delta h_{I_eps}(y1) h_{J_delta}(y2) h_{I_-eps}(x1) h_{J_-delta}(x2)
  // factors as (sum_eps eps ...)(sum_delta delta ...); tabulate each factor per interval.
  // Both children have the same length, so h_{I_eps}(y) h_{I_-eps}(x) is
  // +-2^{level+1}; take the signs from h and the magnitude as an exact power.
  auto factor = [&](const DyadicInterval& i, std::int64_t x, std::int64_t y) {
    const double mag = std::ldexp(1.0, i.level + 1);
    auto sgn = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
    return mag * (sgn(h(i.right_child(), y, resolution)) * sgn(h(i.left_child(), x, resolution)) -
                  sgn(h(i.left_child(), y, resolution)) * sgn(h(i.right_child(), x, resolution)));
  };
  std::vector<double> f1, f2;
  for (const auto& i : intervals) {
    f1.push_back(factor(i, x1, y1));
    f2.push_back(factor(i, x2, y2));
  }
  for (std::size_t a = 0; a < intervals.size(); ++a) {
    for (std::size_t c = 0; c < intervals.size(); ++c) {
      const double term = f1[a] * f2[c];
      if (term != 0.0) ++out.contributing;
      out.value += term;
    }
  }
  return out;
}

/// Full sum of sum_I sum_{K,L} prefactor c^I_{KL} h_K(y) h_L(x) over all stored
/// coefficients, at cell centres.
inline scalar general_kernel_full_sum(const dcl::ShiftSpec& spec, std::int64_t x, std::int64_t y,
                                      int resolution) {
  scalar acc{};
  for (const auto& [interval, block] : spec.blocks()) {
    if (!spec.active(interval)) continue;
    const auto ks = dcl::descendants(interval, spec.input_depth(), resolution);
    const auto ls = dcl::descendants(interval, spec.output_depth(), resolution);
    for (std::size_t k = 0; k < ks.size(); ++k) {
      for (std::size_t l = 0; l < ls.size(); ++l) {
        acc += spec.prefactor() * block[k * ls.size() + l] * h(ks[k], y, resolution) * h(ls[l], x, resolution);
      }
    }
  }
  return acc;
}

/// (1/|E|) int_E |b - <b>_E|^p by direct cell sums.
inline double oscillation(const GridFunction& b, const DyadicInterval& interval, double p) {
  const int n = b.resolution();
  const auto first = interval.first_cell(n);
  const auto count = interval.cell_count(n);
  scalar mean{};
  for (std::int64_t c = 0; c < count; ++c) mean += b[static_cast<std::size_t>(first + c)];
  mean /= static_cast<double>(count);
  double acc = 0.0;
  for (std::int64_t c = 0; c < count; ++c) acc += std::pow(std::abs(b[static_cast<std::size_t>(first + c)] - mean), p);
  return acc / static_cast<double>(count);
}

inline double oscillation(const GridFunction& b, const DyadicRectangle& rect, double p) {
  const int n = b.resolution();
  const auto a0 = rect.first.first_cell(n), na = rect.first.cell_count(n);
  const auto b0 = rect.second.first_cell(n), nb = rect.second.cell_count(n);
  scalar mean{};
  for (std::int64_t a = 0; a < na; ++a)
    for (std::int64_t c = 0; c < nb; ++c) mean += b.at(a0 + a, b0 + c);
  mean /= static_cast<double>(na * nb);
  double acc = 0.0;
  for (std::int64_t a = 0; a < na; ++a)
    for (std::int64_t c = 0; c < nb; ++c) acc += std::pow(std::abs(b.at(a0 + a, b0 + c) - mean), p);
  return acc / static_cast<double>(na * nb);
}

// |R|^{-1} int_R |b - <b>_{R2}(x1) - <b>_{R1}(x2) + <b>_R|^2 via Haar coefficients of b inside R.
inline double rectangular_oscillation(const GridFunction& b, const DyadicRectangle& r) {
  const int n = b.resolution();
  double acc = 0.0;
  for (const auto& k1 : dcl::all_intervals(n - 1)) {
    if (!r.first.contains(k1)) continue;
    for (const auto& k2 : dcl::all_intervals(n - 1))
      if (r.second.contains(k2)) acc += std::norm(haar_coefficient(b, DyadicRectangle{k1, k2}));
  }
  return acc / r.area();
}

// |R| 1_R (b - <b>_R) by direct cell sums.
inline GridFunction reproduction_target(const GridFunction& b, const DyadicRectangle& r) {
  const int n = b.resolution();
  scalar mean{};
  double count = 0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    const auto a = static_cast<std::int64_t>(k) / b.side(), c = static_cast<std::int64_t>(k) % b.side();
    if (r.first.contains({n, a}) && r.second.contains({n, c})) {
      mean += b[k];
      count += 1;
    }
  }
  mean /= count;
  GridFunction out(2, n);
  for (std::size_t k = 0; k < b.size(); ++k) {
    const auto a = static_cast<std::int64_t>(k) / b.side(), c = static_cast<std::int64_t>(k) % b.side();
    if (r.first.contains({n, a}) && r.second.contains({n, c})) out[k] = r.area() * (b[k] - mean);
  }
  return out;
}

inline GridFunction reproduction_target(const GridFunction& b, const DyadicInterval& j) {
  const int n = b.resolution();
  scalar mean{};
  for (auto c = j.first_cell(n); c < j.first_cell(n) + j.cell_count(n); ++c) mean += b[static_cast<std::size_t>(c)];
  mean /= static_cast<double>(j.cell_count(n));
  GridFunction out(1, n);
  for (auto c = j.first_cell(n); c < j.first_cell(n) + j.cell_count(n); ++c)
    out[static_cast<std::size_t>(c)] = j.length() * (b[static_cast<std::size_t>(c)] - mean);
  return out;
}

/// [w]_{A_p} by direct sums over every dyadic interval or rectangle.
inline double ap_characteristic(const dcl::GridFunction& f, double p) {
  const int n = f.resolution();
  double best = 0.0;
  auto eval = [&](auto&& cells) {
    double s = 0.0, t = 0.0, c = 0.0;
    cells([&](std::size_t k) {
      s += f[k].real();
      t += std::pow(f[k].real(), -1.0 / (p - 1.0));
      c += 1.0;
    });
    best = std::max(best, s / c * std::pow(t / c, p - 1.0));
  };
  for (const auto& i : dcl::all_intervals(n)) {
    if (f.dimension() == 1) {
      eval([&](auto&& g) {
        for (auto c = i.first_cell(n); c < i.first_cell(n) + i.cell_count(n); ++c) g(static_cast<std::size_t>(c));
      });
      continue;
    }
    for (const auto& j : dcl::all_intervals(n)) {
      eval([&](auto&& g) {
        for (auto a = i.first_cell(n); a < i.first_cell(n) + i.cell_count(n); ++a)
          for (auto b = j.first_cell(n); b < j.first_cell(n) + j.cell_count(n); ++b)
            g(static_cast<std::size_t>(a * f.side() + b));
      });
    }
  }
  return best;
}

}  // namespace oracle
