#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "dcl/io.hpp"
#include "dcl/kernel.hpp"
#include "dcl/random.hpp"
#include "oracles.hpp"

using dcl::GridFunction;
using dcl::SymbolProfile;
using dcl::json;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("dcl_test_" + name)).string();
}

bool identical(const GridFunction& a, const GridFunction& b) { return a.same_shape(b) && std::equal(a.values().begin(), a.values().end(), b.values().begin()); }

}  // namespace

TEST(RandomSymbol, Deterministic) {
  for (auto profile : {SymbolProfile::haar_gaussian, SymbolProfile::indicator_mix, SymbolProfile::additive}) {
    EXPECT_TRUE(identical(dcl::random_symbol(5, 2, 4, profile), dcl::random_symbol(5, 2, 4, profile)));
    EXPECT_FALSE(identical(dcl::random_symbol(5, 2, 4, profile), dcl::random_symbol(6, 2, 4, profile)));
  }
  EXPECT_TRUE(identical(dcl::random_symbol(1, 1, 8, SymbolProfile::haar_gaussian),
                        dcl::random_symbol(1, 1, 8, SymbolProfile::haar_gaussian)));
}

TEST(RandomSymbol, HaarGaussianHasNonzeroBmo) {
  const double v = dcl::bmo_norm(dcl::random_symbol(3, 1, 6, SymbolProfile::haar_gaussian), 2.0).value;
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GT(v, 0.0);
}

TEST(RandomSymbol, HaarGaussianLayerScaling) {
  // E|b_I|^2 = 2^{-level}: the summed layer energy 2^k * 2^{-k} is 1 on average
  double deep = 0.0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const auto c = dcl::analysis(dcl::random_symbol(static_cast<std::uint64_t>(t), 1, 6, SymbolProfile::haar_gaussian));
    for (std::int64_t m = 0; m < 32; ++m) deep += std::norm(c.at(dcl::DyadicInterval{5, m}));
  }
  EXPECT_NEAR(deep / trials, 1.0, 0.1);
}

TEST(RandomSymbol, AdditiveIsRectangularNull) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EXPECT_LT(dcl::rectangular_bmo_norm(dcl::random_symbol(seed, 2, 5, SymbolProfile::additive)).value, 1e-12);
  }
  EXPECT_THROW(dcl::random_symbol(1, 1, 4, SymbolProfile::additive), dcl::parameter_out_of_range);
}

TEST(RandomSymbol, ProfileNames) {
  EXPECT_EQ(dcl::parse_profile("indicator-mix"), SymbolProfile::indicator_mix);
  EXPECT_EQ(dcl::to_string(SymbolProfile::additive), "additive");
  EXPECT_THROW(dcl::parse_profile("gaussian"), dcl::parameter_out_of_range);
}

TEST(RandomWeight, TargetOneIsConstant) {
  const auto w = dcl::random_ap_weight(3, 1, 6, 2.0, 1.0);
  for (std::size_t k = 1; k < w.size(); ++k) EXPECT_EQ(w[k], w[0]);
}

TEST(RandomWeight, ReachesTarget) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto w = dcl::random_ap_weight(seed, 2, 5, 2.0, 4.0);
    const double a = dcl::ap_characteristic(w, 2.0);
    EXPECT_GE(a, 1.0);
    EXPECT_LE(a, 4.0);
    EXPECT_GT(a, 3.9);  // bisection lands close to the target
  }
  const auto w1 = dcl::random_ap_weight(1, 1, 7, 3.0, 2.0);
  EXPECT_LE(dcl::ap_characteristic(w1, 3.0), 2.0);
}

TEST(RandomWeight, DeterministicAndValidated) {
  EXPECT_EQ(dcl::random_ap_weight(4, 1, 5, 2.0, 3.0).values(), dcl::random_ap_weight(4, 1, 5, 2.0, 3.0).values());
  EXPECT_THROW(dcl::random_ap_weight(4, 1, 5, 2.0, 0.5), dcl::parameter_out_of_range);
  EXPECT_THROW(dcl::random_ap_weight(4, 1, 5, 1.0, 2.0), dcl::parameter_out_of_range);
}

TEST(GridIo, JsonRoundTrip) {
  for (bool cplx : {false, true}) {
    const auto f = oracle::random_function(2, 2, 3, cplx);
    const auto j = dcl::to_json(f);
    EXPECT_EQ(j["values"][0].is_array(), cplx);
    EXPECT_TRUE(identical(dcl::grid_function_from_json(json::parse(j.dump())), f));
  }
}

TEST(GridIo, CsvRoundTrip) {
  const auto f = oracle::random_function(3, 1, 5, true);
  EXPECT_TRUE(identical(dcl::grid_function_from_csv(dcl::to_csv(f)), f));
  EXPECT_THROW(dcl::to_csv(GridFunction(2, 2)), dcl::dimension_mismatch);
  EXPECT_THROW(dcl::grid_function_from_csv("1\n2\n3\n"), dcl::format_error);
  EXPECT_THROW(dcl::grid_function_from_csv("1\nx\n"), dcl::format_error);
}

TEST(GridIo, FilesAndErrors) {
  const auto path = temp_path("f.json");
  const auto f = oracle::random_function(9, 1, 4);
  dcl::write_text(path, dcl::to_json(f).dump());
  EXPECT_TRUE(identical(dcl::load_grid_function(path), f));
  const auto csv = temp_path("w.csv");
  dcl::write_text(csv, "1\n2\n0.5\n4\n");
  EXPECT_EQ(dcl::load_weight(csv)[2], 0.5);
  dcl::write_text(csv, "1\n2\n0\n4\n");
  EXPECT_THROW(dcl::load_weight(csv), dcl::format_error);
  dcl::write_text(path, R"({"dimension":1,"resolution":2,"values":[1,2,3]})");
  EXPECT_THROW(dcl::load_grid_function(path), dcl::format_error);
  dcl::write_text(path, "{not json");
  EXPECT_THROW(dcl::load_grid_function(path), dcl::format_error);
  EXPECT_THROW(dcl::load_grid_function(temp_path("missing.json")), dcl::format_error);
  std::remove(path.c_str());
  std::remove(csv.c_str());
}

TEST(SpecIo, RoundTripPreservesAction) {
  const int n = 6;
  const auto spec = dcl::make_sliced(1, 2, 1.5, 7, n);
  const auto back = dcl::shift_spec_from_json(json::parse(dcl::to_json(spec).dump()));
  EXPECT_EQ(back.scale_filter(), dcl::ScaleFilter::even);
  EXPECT_EQ(back.coefficient_bound(), spec.coefficient_bound());
  const auto f = oracle::random_function(1, 1, n, true);
  EXPECT_LT((dcl::apply_general_shift(spec, f) - dcl::apply_general_shift(back, f)).max_abs(), 1e-15);
}

TEST(SpecIo, ParsesHandWrittenSpec) {
  const auto spec = dcl::shift_spec_from_json(json::parse(R"({
    "complexity": [1, 1], "prefactor": 1.0, "scale_filter": "all",
    "entries": [{"I": [0, 0], "K": [1, 1], "L": [1, 0], "c": [1, 0]},
                {"I": [0, 0], "K": [1, 0], "L": [1, 1], "c": [-1, 0]}]})"));
  EXPECT_EQ(spec.coefficient({0, 0}, {1, 1}, {1, 0}), dcl::scalar(1.0));
  EXPECT_EQ(spec.coefficient_bound(), 1.0);
  EXPECT_THROW(dcl::shift_spec_from_json(json::parse(R"({"complexity":[1,1],"prefactor":1,"entries":[{"I":[0,0],"K":[2,0],"L":[1,0],"c":[1,0]}]})")),
               dcl::format_error);
  EXPECT_THROW(dcl::shift_spec_from_json(json::parse(R"({"complexity":[1],"prefactor":1,"entries":[]})")),
               dcl::format_error);
}
