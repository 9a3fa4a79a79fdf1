#include <gtest/gtest.h>

#include <random>

#include "dcl/kernel.hpp"
#include "oracles.hpp"

using dcl::DyadicInterval;
using dcl::DyadicRectangle;
using dcl::GridFunction;
using dcl::Point2;
using dcl::ScaleWindow;

namespace {

Point2 point(double x1, double x2, int n) { return {dcl::cell_of(x1, n), dcl::cell_of(x2, n)}; }

Point2 random_point(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<std::int64_t> d(0, (std::int64_t{1} << n) - 1);
  const auto a = d(rng);
  return {{n, a}, {n, d(rng)}};
}

dcl::ShiftSpec random_spec(int i, int j, int n, std::uint64_t seed) {
  dcl::ShiftSpec spec(i, j, std::pow(2.0, -0.5 * (i + j)), 1.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& interval : dcl::all_intervals(n - 1 - std::max(i, j))) {
    for (std::size_t k = 0; k < spec.input_count(); ++k)
      for (std::size_t l = 0; l < spec.output_count(); ++l)
        spec.set_block_entry(interval, k, l, std::polar(std::abs(u(rng)), 3.0 * u(rng)));
  }
  return spec;
}

}  // namespace

TEST(TensorKernel, MinimalRectangleExample) {
  for (int n = 3; n <= 6; ++n) {
    EXPECT_DOUBLE_EQ(dcl::tensor_kernel(point(0.1, 0.1, n), point(0.3, 0.3, n)), 16.0);
  }
}

TEST(TensorKernel, EqualCoordinateIsZero) {
  EXPECT_EQ(dcl::tensor_kernel(point(0.1, 0.3, 5), point(0.3, 0.3, 5)), 0.0);
}

TEST(TensorKernel, MatchesFullSum) {
  const int n = 6;
  std::mt19937_64 rng(1);
  for (int t = 0; t < 1000; ++t) {
    const auto x = random_point(rng, n);
    const auto y = random_point(rng, n);
    const auto full = oracle::tensor_kernel_full_sum(x.x1.index, x.x2.index, y.x1.index, y.x2.index, n);
    EXPECT_LE(full.contributing, 1);
    ASSERT_DOUBLE_EQ(dcl::tensor_kernel(x, y), full.value);
  }
}

TEST(InverseTensorKernel, ReciprocalExample) {
  const int n = 4;
  const DyadicRectangle whole{DyadicInterval::root(), DyadicInterval::root()};
  EXPECT_DOUBLE_EQ(dcl::inverse_tensor_kernel(whole, point(0.1, 0.1, n), point(0.3, 0.3, n)), 1.0 / 16.0);
  EXPECT_EQ(dcl::inverse_tensor_kernel(whole, point(0.3, 0.1, n), point(0.3, 0.7, n)), 0.0);
}

TEST(InverseTensorKernel, ProductIsIndicatorExhaustive) {
  const int n = 5;
  const auto side = std::int64_t{1} << n;
  for (const DyadicRectangle rect : {DyadicRectangle{DyadicInterval::root(), DyadicInterval::root()},
                                     DyadicRectangle{DyadicInterval(1, 0), DyadicInterval(2, 1)}}) {
    for (std::int64_t a = 0; a < side * side; ++a) {
      const Point2 x{{n, a / side}, {n, a % side}};
      for (std::int64_t b = 0; b < side * side; ++b) {
        const Point2 y{{n, b / side}, {n, b % side}};
        const double k = dcl::tensor_kernel(x, y);
        const double prod = k * dcl::inverse_tensor_kernel(rect, x, y);
        const bool inside = rect.first.contains(x.x1) && rect.second.contains(x.x2) &&
                            rect.first.contains(y.x1) && rect.second.contains(y.x2);
        ASSERT_EQ(prod, (inside && k != 0.0) ? 1.0 : 0.0);
      }
    }
  }
}

TEST(TruncatedKernel, FullWindowEqualsKernel) {
  const int n = 4;
  const auto side = std::int64_t{1} << n;
  for (std::int64_t a = 0; a < side * side; ++a) {
    const Point2 x{{n, a / side}, {n, a % side}};
    for (std::int64_t b = 0; b < side * side; ++b) {
      const Point2 y{{n, b / side}, {n, b % side}};
      ASSERT_EQ(dcl::truncated_tensor_kernel(ScaleWindow{n}, x, y), dcl::tensor_kernel(x, y));
    }
  }
}

TEST(TruncatedKernel, OutsideWindowIsZero) {
  // minimal rectangle [0,1/4)^2 has side 1/4, outside the n = 0 window
  const int n = 5;
  const auto x = point(0.05, 0.05, n);
  const auto y = point(0.2, 0.2, n);
  EXPECT_NE(dcl::tensor_kernel(x, y), 0.0);
  EXPECT_EQ(dcl::truncated_tensor_kernel(ScaleWindow{0}, x, y), 0.0);
  EXPECT_EQ(dcl::truncated_tensor_kernel(ScaleWindow{2}, x, y), dcl::tensor_kernel(x, y));
}

TEST(TruncatedKernel, SupportGrowsAndAgreesOnSupport) {
  const int n = 5;
  const auto side = std::int64_t{1} << n;
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    const auto x = random_point(rng, n);
    for (std::int64_t b = 0; b < side * side; ++b) {
      const Point2 y{{n, b / side}, {n, b % side}};
      for (int w = 0; w < n; ++w) {
        const double kn = dcl::truncated_tensor_kernel(ScaleWindow{w}, x, y);
        const double kn1 = dcl::truncated_tensor_kernel(ScaleWindow{w + 1}, x, y);
        if (kn != 0.0) {
          ASSERT_NE(kn1, 0.0);
          ASSERT_EQ(kn, dcl::tensor_kernel(x, y));
        }
      }
    }
  }
}

TEST(TensorKernel, IntegrationMatchesOperator) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = oracle::random_function(seed, 2, 4, true);
    EXPECT_LT((dcl::integrate_tensor_kernel(f) - dcl::apply_tensor_shift(f)).max_abs(), 1e-10);
  }
}

TEST(GeneralKernel, SEncodingExample) {
  const int n = 6;
  const auto spec = dcl::ShiftSpec::encoding_of_S(n);
  for (double x : {0.0, 0.05, 0.12}) {
    for (double y : {0.25, 0.3, 0.37}) {
      EXPECT_NEAR(std::abs(dcl::general_kernel(spec, dcl::cell_of(x, n), dcl::cell_of(y, n)) - 4.0), 0.0, 1e-14);
    }
  }
  const auto c = dcl::cell_of(0.4, n);
  EXPECT_EQ(dcl::general_kernel(spec, c, c), dcl::scalar{});
}

TEST(GeneralKernel, MatchesFullSum) {
  const int n = 6;
  for (auto [i, j] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{0, 3}}) {
    const auto spec = random_spec(i, j, n, static_cast<std::uint64_t>(10 * i + j));
    for (std::int64_t x = 0; x < 64; ++x) {
      for (std::int64_t y = 0; y < 64; ++y) {
        const auto full = oracle::general_kernel_full_sum(spec, x, y, n);
        ASSERT_NEAR(std::abs(dcl::general_kernel_sum(spec, {n, x}, {n, y}) - full), 0.0, 1e-12);
      }
    }
  }
}

TEST(GeneralKernel, AgreesWithReducedCoefficients) {
  const int n = 6;
  for (auto [i, j] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 2}}) {
    const auto spec = random_spec(i, j, n, static_cast<std::uint64_t>(i + 7 * j));
    const auto red = dcl::reduced_coefficients(spec, n);
    int checked = 0;
    for (std::int64_t x = 0; x < 64; ++x) {
      for (std::int64_t y = 0; y < 64; ++y) {
        if (x == y) continue;
        const DyadicInterval cx{n, x}, cy{n, y};
        const auto top = dcl::minimal_common_interval(cx, cy);
        if (top.level > red.max_level()) continue;
        const auto k = static_cast<std::size_t>(cy.ancestor(top.level + i + 1).index - (top.index << (i + 1)));
        const auto l = static_cast<std::size_t>(cx.ancestor(top.level + j + 1).index - (top.index << (j + 1)));
        ASSERT_NEAR(std::abs(dcl::general_kernel(spec, cx, cy) - red.a(top, k, l)), 0.0, 1e-12);
        ++checked;
      }
    }
    EXPECT_GT(checked, 0);
  }
}

TEST(GeneralKernel, IntegrationWithDiagonalMatchesOperator) {
  const int n = 6;
  const auto spec = random_spec(2, 1, n, 3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = oracle::random_function(seed, 1, n, true);
    EXPECT_LT((dcl::integrate_general_kernel(spec, f) - dcl::apply_general_shift(spec, f)).max_abs(), 1e-10);
  }
  // for S the within-cell term vanishes
  const auto s = dcl::ShiftSpec::encoding_of_S(n);
  for (std::int64_t x = 0; x < 64; ++x) EXPECT_EQ(dcl::general_kernel_diagonal(s, {n, x}), dcl::scalar{});
}

TEST(ReducedCoefficients, SEncodingRoot) {
  const int n = 5;
  const auto red = dcl::reduced_coefficients(dcl::ShiftSpec::encoding_of_S(n), n);
  const auto root = DyadicInterval::root();
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t l = 0; l < 4; ++l) {
      const auto v = red.a(root, k, l);
      const bool same = dcl::ReducedCoefficients::same_child(root, red.k_interval(root, k), red.l_interval(root, l));
      if (same) {
        EXPECT_EQ(v, dcl::scalar{});
      } else {
        EXPECT_NEAR(std::abs(v), 2.0, 1e-14);
        EXPECT_EQ(v.imag(), 0.0);
      }
    }
  }
}

TEST(ReducedCoefficients, ZeroSpec) {
  const auto red = dcl::reduced_coefficients(dcl::ShiftSpec(1, 2, 1.0), 6);
  for (const auto& [interval, blk] : red.blocks())
    for (const auto& v : blk) EXPECT_EQ(v, dcl::scalar{});
}

TEST(ReducedCoefficients, BoundAndZeroPattern) {
  const int n = 6;
  for (auto [i, j] : {std::pair{0, 0}, std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 3}}) {
    const auto spec = random_spec(i, j, n, static_cast<std::uint64_t>(i * 3 + j));
    const auto red = dcl::reduced_coefficients(spec, n);
    EXPECT_LE(dcl::reduced_bound_ratio(spec, red), 1.0 + 1e-12);
    for (const auto& [interval, blk] : red.blocks()) {
      for (std::size_t k = 0; k < red.k_count(); ++k)
        for (std::size_t l = 0; l < red.l_count(); ++l)
          if (dcl::ReducedCoefficients::same_child(interval, red.k_interval(interval, k), red.l_interval(interval, l)))
            EXPECT_EQ(blk[k * red.l_count() + l], dcl::scalar{});
    }
  }
}

TEST(Nondegeneracy, SEncodingPasses) {
  const auto report = dcl::check_nondegeneracy(dcl::ShiftSpec::encoding_of_S(8), 8, 1.0);
  EXPECT_TRUE(report.pass());
  EXPECT_NEAR(report.worst_ratio, 2.0, 1e-12);
}

TEST(Nondegeneracy, ZeroedCoefficientIsReported) {
  const int n = 6;
  auto spec = dcl::ShiftSpec::encoding_of_S(n);
  const DyadicInterval i0(2, 1);
  spec.set(i0, i0.right_child(), i0.left_child(), 0.0);
  const auto report = dcl::check_nondegeneracy(spec, n, 1.0);
  EXPECT_FALSE(report.pass());
  ASSERT_EQ(report.counterexample_count, 4u);
  for (const auto& c : report.counterexamples) {
    EXPECT_EQ(c["I"], dcl::to_json(i0));
    EXPECT_EQ(c["value"].get<double>(), 0.0);
    const DyadicInterval k(c["K"][0].get<int>(), c["K"][1].get<std::int64_t>());
    const DyadicInterval l(c["L"][0].get<int>(), c["L"][1].get<std::int64_t>());
    EXPECT_TRUE(i0.right_child().contains(k));
    EXPECT_TRUE(i0.left_child().contains(l));
  }
}

TEST(Nondegeneracy, PurelyMixingExample) {
  const auto spec = dcl::make_purely_mixing(2, 1.2, 5, 8);
  EXPECT_TRUE(dcl::check_nondegeneracy(spec, 8, dcl::purely_mixing_constant(2, 1.2)).pass());
}

TEST(Nondegeneracy, PurelyMixingRandom) {
  std::mt19937_64 rng(99);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int i = 1 + static_cast<int>(seed % 2);
    const double upper = std::ldexp(1.0, i) / (std::ldexp(1.0, i) - 1.0);
    const double b = std::uniform_real_distribution<double>(1.0, upper)(rng);
    const auto spec = dcl::make_purely_mixing(i, b, seed, 7);
    const auto report = dcl::check_nondegeneracy(spec, 7, dcl::purely_mixing_constant(i, b));
    EXPECT_TRUE(report.pass()) << "seed " << seed << " b " << b;
  }
}

TEST(Nondegeneracy, GeneratorRanges) {
  EXPECT_THROW(dcl::make_purely_mixing(1, 2.0, 0, 5), dcl::parameter_out_of_range);
  EXPECT_THROW(dcl::make_purely_mixing(2, 0.9, 0, 5), dcl::parameter_out_of_range);
  EXPECT_NO_THROW(dcl::make_purely_mixing(1, 1.999, 0, 5));
  EXPECT_THROW(dcl::make_sliced(1, 1, 3.0, 0, 5), dcl::parameter_out_of_range);
  EXPECT_NO_THROW(dcl::make_sliced(1, 1, 2.99, 0, 5));
}

TEST(Nondegeneracy, PurelyMixingStructure) {
  const auto spec = dcl::make_purely_mixing(1, 1.0, 4, 5);
  EXPECT_DOUBLE_EQ(spec.prefactor(), 0.5);
  for (const auto& [interval, blk] : spec.blocks()) {
    EXPECT_EQ(blk[0], dcl::scalar{});
    EXPECT_EQ(blk[3], dcl::scalar{});
    EXPECT_NEAR(std::abs(blk[1]), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(blk[2]), 1.0, 1e-15);
  }
}

TEST(Nondegeneracy, SlicedCaseBounds) {
  const int n = 8;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto spec = dcl::make_sliced(0, 0, 1.0, seed, n);
    for (const auto& [interval, blk] : spec.blocks()) EXPECT_EQ(interval.level % 2, 0);
    const auto red = dcl::reduced_coefficients(spec, n);
    for (const auto& [interval, blk] : red.blocks()) {
      const double lower = (interval.level % 2 == 0 ? 1.0 : 0.5) * (1.0 - 1.0 / 3.0) / interval.length();
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l)
          if (k != l) EXPECT_GE(std::abs(blk[k * 2 + l]), lower * (1.0 - 1e-12));
    }
  }
}

TEST(Nondegeneracy, SlicedRandom) {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int i = static_cast<int>(seed % 3);
    const int j = static_cast<int>((seed / 3) % 3);
    const double b = std::uniform_real_distribution<double>(1.0, 3.0)(rng);
    const auto spec = dcl::make_sliced(i, j, b, seed, 7);
    EXPECT_TRUE(dcl::check_nondegeneracy(spec, 7, dcl::sliced_constant(b)).pass()) << seed;
  }
}

TEST(WeakNondegeneracy, ImpliedByStrong) {
  const auto spec = dcl::make_purely_mixing(2, 1.1, 3, 7);
  const double c = dcl::purely_mixing_constant(2, 1.1);
  EXPECT_TRUE(dcl::check_nondegeneracy(spec, 7, c).pass());
  EXPECT_TRUE(dcl::check_weak_nondegeneracy(spec, 7, c).pass());
}

TEST(WeakNondegeneracy, ConstructedInstanceSeparatesConditions) {
  // i = 1, j = 2: each K' in ch_1(I) talks only to the left grandchild inside the other child.
  const int n = 7;
  dcl::ShiftSpec spec(1, 2, 1.0);
  for (const auto& interval : dcl::all_intervals(n - 3)) {
    const auto [minus, plus] = interval.children();
    spec.set(interval, minus, plus.left_child(), 1.0);
    spec.set(interval, plus, minus.left_child(), 1.0);
  }
  EXPECT_TRUE(dcl::check_weak_nondegeneracy(spec, n, 1.0).pass());
  EXPECT_FALSE(dcl::check_nondegeneracy(spec, n, 1.0).pass());
}

TEST(WeakNondegeneracy, ZeroSpecFails) {
  for (double c : {1.0, 1e3, 1e9}) {
    EXPECT_FALSE(dcl::check_weak_nondegeneracy(dcl::ShiftSpec(1, 1, 1.0), 5, c).pass());
  }
}

TEST(Nondegeneracy, ReportJsonShape) {
  const auto j = dcl::check_nondegeneracy(dcl::ShiftSpec::encoding_of_S(4), 4, 1.0).to_json();
  EXPECT_EQ(j["check"], "nondegeneracy");
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_TRUE(j.contains("worst_ratio"));
  EXPECT_TRUE(j["counterexamples"].is_array());
  EXPECT_EQ(j["parameters"]["c"].get<double>(), 1.0);
}
