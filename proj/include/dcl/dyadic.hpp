#pragma once

#include <bit>
#include <cassert>
#include <cmath>
#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dcl/error.hpp"

namespace dcl {

/// Dyadic subinterval [index * 2^-level, (index + 1) * 2^-level) of [0,1).
///
/// A cell of a grid at resolution N is the interval of level N; the library
/// uses cells as "points" so that evaluation never lands on a dyadic boundary.
struct DyadicInterval {
  int level = 0;
  std::int64_t index = 0;

  constexpr DyadicInterval() = default;
  constexpr DyadicInterval(int lvl, std::int64_t idx) : level(lvl), index(idx) {
    if (lvl < 0 || lvl > 62 || idx < 0 || idx >= (std::int64_t{1} << lvl)) {
      throw parameter_out_of_range("dyadic interval (" + std::to_string(lvl) + ", " +
                                   std::to_string(idx) + ")");
    }
  }

  static constexpr DyadicInterval root() { return {}; }

  double length() const { return std::ldexp(1.0, -level); }
  double left() const { return static_cast<double>(index) * length(); }
  double right() const { return static_cast<double>(index + 1) * length(); }

  /// (I_-, I_+)
  constexpr std::pair<DyadicInterval, DyadicInterval> children() const {
    return {DyadicInterval(level + 1, 2 * index), DyadicInterval(level + 1, 2 * index + 1)};
  }
  constexpr DyadicInterval left_child() const { return children().first; }
  constexpr DyadicInterval right_child() const { return children().second; }

  constexpr DyadicInterval parent() const {
    if (level == 0) throw root_has_no_parent();
    return {level - 1, index / 2};
  }

  constexpr DyadicInterval sibling() const {
    if (level == 0) throw root_has_no_parent();
    return {level, index ^ 1};
  }

  constexpr bool is_left_child() const { return level > 0 && (index & 1) == 0; }

  /// Ancestor at the given coarser level (or the interval itself).
  constexpr DyadicInterval ancestor(int lvl) const {
    assert(lvl >= 0 && lvl <= level);
    return {lvl, index >> (level - lvl)};
  }

  constexpr bool contains(const DyadicInterval& other) const {
    return other.level >= level && (other.index >> (other.level - level)) == index;
  }

  constexpr bool strictly_contains(const DyadicInterval& other) const {
    return other.level > level && contains(other);
  }

  /// First finest cell and number of finest cells covered at resolution N.
  constexpr std::int64_t first_cell(int resolution) const { return index << (resolution - level); }
  constexpr std::int64_t cell_count(int resolution) const {
    return std::int64_t{1} << (resolution - level);
  }

  /// Slot in the heap layout of Haar coefficients: 2^level + index (slot 0 is the mean).
  constexpr std::size_t heap_slot() const {
    return static_cast<std::size_t>((std::int64_t{1} << level) + index);
  }
  static constexpr DyadicInterval from_heap_slot(std::size_t slot) {
    assert(slot >= 1);
    const int lvl = std::bit_width(slot) - 1;
    return {lvl, static_cast<std::int64_t>(slot) - (std::int64_t{1} << lvl)};
  }

  constexpr auto operator<=>(const DyadicInterval&) const = default;
};

/// The interval ch_k(I): descendants k levels below I, in left-to-right order.
inline std::vector<DyadicInterval> descendants(const DyadicInterval& interval, int depth,
                                               int resolution) {
  if (depth < 0) throw parameter_out_of_range("negative descendant depth");
  if (interval.level + depth > resolution) {
    throw resolution_exceeded("ch_" + std::to_string(depth) + " of a level-" +
                              std::to_string(interval.level) + " interval at resolution " +
                              std::to_string(resolution));
  }
  std::vector<DyadicInterval> out;
  const std::int64_t count = std::int64_t{1} << depth;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t k = 0; k < count; ++k) {
    out.emplace_back(interval.level + depth, (interval.index << depth) + k);
  }
  return out;
}

/// Smallest dyadic interval containing both cells (given at the same level).
inline DyadicInterval minimal_common_interval(const DyadicInterval& a, const DyadicInterval& b) {
  assert(a.level == b.level);
  const auto diff = static_cast<std::uint64_t>(a.index ^ b.index);
  const int up = std::bit_width(diff);
  return {a.level - up, a.index >> up};
}

/// Sign of h_I on a cell: -1 on I_-, +1 on I_+, 0 off I. The cell must be
/// finer than I.
inline int haar_sign(const DyadicInterval& interval, const DyadicInterval& cell) {
  if (cell.level <= interval.level) {
    throw resolution_exceeded("h_I is not constant on a cell of level " + std::to_string(cell.level));
  }
  if (!interval.contains(cell)) return 0;
  return ((cell.index >> (cell.level - interval.level - 1)) & 1) != 0 ? 1 : -1;
}

/// Value of the L2-normalized Haar function h_I on a cell: -1/sqrt|I| on I_-,
/// +1/sqrt|I| on I_+, zero off I.
inline double haar_value(const DyadicInterval& interval, const DyadicInterval& cell) {
  return haar_sign(interval, cell) * std::sqrt(std::ldexp(1.0, interval.level));
}

/// h_A(u) h_B(v) computed as sign * 2^{(level A + level B)/2}, exact when the
/// level sum is even.
inline double haar_product(const DyadicInterval& a, const DyadicInterval& u, const DyadicInterval& b,
                           const DyadicInterval& v) {
  const int s = haar_sign(a, u) * haar_sign(b, v);
  if (s == 0) return 0.0;
  const int levels = a.level + b.level;
  const double mag = levels % 2 == 0 ? std::ldexp(1.0, levels / 2) : std::sqrt(std::ldexp(1.0, levels));
  return s * mag;
}

/// Product of two dyadic intervals.
struct DyadicRectangle {
  DyadicInterval first;
  DyadicInterval second;

  double area() const { return first.length() * second.length(); }
  constexpr bool contains(const DyadicRectangle& other) const {
    return first.contains(other.first) && second.contains(other.second);
  }
  constexpr auto operator<=>(const DyadicRectangle&) const = default;
};

/// Cell address of a point of [0,1) at resolution N.
inline DyadicInterval cell_of(double x, int resolution) {
  if (!(x >= 0.0 && x < 1.0)) throw parameter_out_of_range("point outside [0,1)");
  return {resolution, static_cast<std::int64_t>(std::floor(std::ldexp(x, resolution)))};
}

/// Every dyadic interval of level <= max_level in (level, index) order.
inline std::vector<DyadicInterval> all_intervals(int max_level, int min_level = 0) {
  std::vector<DyadicInterval> out;
  for (int k = min_level; k <= max_level; ++k) {
    for (std::int64_t m = 0; m < (std::int64_t{1} << k); ++m) out.emplace_back(k, m);
  }
  return out;
}

inline std::string to_string(const DyadicInterval& interval) {
  return "(" + std::to_string(interval.level) + "," + std::to_string(interval.index) + ")";
}

inline std::string to_string(const DyadicRectangle& rect) {
  return to_string(rect.first) + "x" + to_string(rect.second);
}

}  // namespace dcl
