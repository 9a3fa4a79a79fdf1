#pragma once

#include <cmath>
#include <random>
#include <string>

#include "dcl/bmo.hpp"
#include "dcl/grid_function.hpp"

namespace dcl {

enum class SymbolProfile { haar_gaussian, indicator_mix, additive };

inline SymbolProfile parse_profile(const std::string& name) {
  if (name == "haar-gaussian") return SymbolProfile::haar_gaussian;
  if (name == "indicator-mix") return SymbolProfile::indicator_mix;
  if (name == "additive") return SymbolProfile::additive;
  throw parameter_out_of_range("unknown symbol profile '" + name + "'");
}

inline std::string to_string(SymbolProfile profile) {
  switch (profile) {
    case SymbolProfile::haar_gaussian: return "haar-gaussian";
    case SymbolProfile::indicator_mix: return "indicator-mix";
    case SymbolProfile::additive: return "additive";
  }
  return "?";
}

namespace detail {

// Heap slot 0 (mean) counts as level 0.
inline int slot_level(std::size_t slot) { return slot == 0 ? 0 : DyadicInterval::from_heap_slot(slot).level; }

// Standard normal Haar coefficients, scaled by 2^{-damping * level / 2} on every axis.
inline GridFunction haar_series(std::mt19937_64& rng, int dimension, int resolution, double damping = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  HaarCoefficients c(dimension, resolution);
  const std::size_t side = c.side();
  if (dimension == 1) {
    for (std::size_t s = 0; s < side; ++s) c.data()[s] = g(rng) * std::exp2(-0.5 * damping * slot_level(s));
  } else {
    for (std::size_t a = 0; a < side; ++a)
      for (std::size_t b = 0; b < side; ++b)
        c.data()[a * side + b] = g(rng) * std::exp2(-0.5 * damping * (slot_level(a) + slot_level(b)));
  }
  return synthesis(c);
}

}  // namespace detail

/// Deterministic random symbol. haar-gaussian draws independent normal Haar
/// coefficients damped by 2^{-level/2}; indicator-mix sums a few weighted
/// dyadic indicators; additive (2D only) is f(x1) + g(x2).
inline GridFunction random_symbol(std::uint64_t seed, int dimension, int resolution, SymbolProfile profile) {
  if (dimension != 1 && dimension != 2) throw dimension_mismatch("symbols live in dimension 1 or 2");
  std::mt19937_64 rng(seed);
  switch (profile) {
    case SymbolProfile::haar_gaussian:
      return detail::haar_series(rng, dimension, resolution);
    case SymbolProfile::indicator_mix: {
      std::normal_distribution<double> g(0.0, 1.0);
      std::uniform_int_distribution<int> level(0, resolution);
      GridFunction out(dimension, resolution);
      for (int t = 0; t < 8; ++t) {
        auto pick = [&] {
          const int k = level(rng);
          std::uniform_int_distribution<std::int64_t> idx(0, (std::int64_t{1} << k) - 1);
          return DyadicInterval{k, idx(rng)};
        };
        const double weight = g(rng);
        if (dimension == 1) {
          out += weight * GridFunction::indicator(pick(), resolution);
        } else {
          const auto first = pick();
          out += weight * GridFunction::indicator(DyadicRectangle{first, pick()}, resolution);
        }
      }
      return out;
    }
    case SymbolProfile::additive: {
      if (dimension != 2) throw parameter_out_of_range("the additive profile is two-dimensional");
      const auto f = detail::haar_series(rng, 1, resolution);
      const auto g = detail::haar_series(rng, 1, resolution);
      GridFunction out(2, resolution);
      for (std::int64_t a = 0; a < out.side(); ++a)
        for (std::int64_t b = 0; b < out.side(); ++b)
          out[static_cast<std::size_t>(a * out.side() + b)] = f[static_cast<std::size_t>(a)] + g[static_cast<std::size_t>(b)];
      return out;
    }
  }
  return GridFunction(dimension, resolution);
}

/// w = exp(s phi) for a damped random Haar series phi, with s the largest value
/// (to bisection accuracy) keeping the dyadic A_p characteristic <= target.
inline Weight random_ap_weight(std::uint64_t seed, int dimension, int resolution, double p, double target) {
  if (!(p > 1.0) || !std::isfinite(p)) throw parameter_out_of_range("A_p needs 1 < p < inf");
  if (!(target >= 1.0)) throw parameter_out_of_range("A_p target must be >= 1");
  if (target == 1.0) return Weight::constant(dimension, resolution);
  std::mt19937_64 rng(seed);
  auto phi = detail::haar_series(rng, dimension, resolution, 2.0);
  // the mean only rescales the weight
  phi += -(dimension == 1 ? average(phi, DyadicInterval{0, 0}) : average(phi, DyadicRectangle{{0, 0}, {0, 0}}));
  auto make = [&](double s) {
    GridFunction w(dimension, resolution);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(s * phi[k].real());
    return Weight(w);
  };
  auto characteristic = [&](double s) { return ap_characteristic(make(s), p); };

  double lo = 0.0, hi = 1.0;
  int doublings = 0;
  while (characteristic(hi) <= target) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 40) return make(lo);  // phi is (numerically) constant
  }
  for (int it = 0; it < 60 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (characteristic(mid) <= target ? lo : hi) = mid;
  }
  auto w = make(lo);
  const double achieved = ap_characteristic(w, p);
  if (!std::isfinite(achieved) || achieved > target) {
    throw target_unreachable("could not bring [w]_{A_p} below " + std::to_string(target));
  }
  return w;
}

}  // namespace dcl
