#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "pbrsim/stats.hpp"

namespace pbrsim {
namespace {

TEST(SampleCounts, Degenerate) {
  const std::vector<double> p{0.25, 0.25, 0.25, 0.25};
  EXPECT_EQ(sample_counts(p, 0, std::uint64_t{1}), (std::vector<std::int64_t>{0, 0, 0, 0}));
  const std::vector<double> point{1.0, 0.0, 0.0};
  EXPECT_EQ(sample_counts(point, 1000, std::uint64_t{9}), (std::vector<std::int64_t>{1000, 0, 0}));
  const std::vector<double> last{0.0, 0.0, 1.0};
  EXPECT_EQ(sample_counts(last, 1000, std::uint64_t{9}), (std::vector<std::int64_t>{0, 0, 1000}));
}

TEST(SampleCounts, UniformWithinFourSigma) {
  const std::vector<double> p(4, 0.25);
  const auto counts = sample_counts(p, 100000, std::uint64_t{2024});
  const double sigma = std::sqrt(100000 * 0.25 * 0.75);
  for (auto c : counts) EXPECT_LT(std::abs(c - 25000.0), 4 * sigma);
  EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}), 100000);
}

TEST(SampleCounts, DeterministicPerSeedAndStream) {
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  EXPECT_EQ(sample_counts(p, 5000, std::uint64_t{7}), sample_counts(p, 5000, std::uint64_t{7}));
  EXPECT_NE(sample_counts(p, 5000, std::uint64_t{7}), sample_counts(p, 5000, std::uint64_t{8}));
  auto a = stream_engine(7, 1);
  auto b = stream_engine(7, 2);
  EXPECT_NE(a(), b());
}

TEST(SampleCounts, RejectsInvalidDistributions) {
  const std::vector<double> neg{-0.1, 1.1};
  const std::vector<double> short_sum{0.3, 0.3};
  const std::vector<double> ok{0.5, 0.5};
  EXPECT_THROW(sample_counts(neg, 10, std::uint64_t{1}), RangeError);
  EXPECT_THROW(sample_counts(short_sum, 10, std::uint64_t{1}), RangeError);
  EXPECT_THROW(sample_counts(ok, -1, std::uint64_t{1}), RangeError);
}

TEST(WilsonInterval, Examples) {
  const auto [lo0, hi0] = wilson_interval(0, 100);
  EXPECT_EQ(lo0, 0.0);
  EXPECT_NEAR(hi0, 0.0369934982069857, 1e-12);
  const auto [lo, hi] = wilson_interval(360, 100000);
  EXPECT_NEAR(lo, 0.00324737892266126, 1e-12);
  EXPECT_NEAR(hi, 0.00399075761551118, 1e-12);
  const auto [slo, shi] = wilson_interval(50, 100);
  EXPECT_NEAR(0.5 - slo, shi - 0.5, 1e-15);
  EXPECT_NEAR(slo, 0.403831530365996, 1e-12);
  const auto [flo, fhi] = wilson_interval(100, 100);
  EXPECT_EQ(fhi, 1.0);
  EXPECT_LT(flo, 1.0);
}

TEST(WilsonInterval, ConfidenceWidensInterval) {
  const auto [lo95, hi95] = wilson_interval(30, 1000, 0.95);
  const auto [lo99, hi99] = wilson_interval(30, 1000, 0.99);
  EXPECT_LT(lo99, lo95);
  EXPECT_GT(hi99, hi95);
  EXPECT_NEAR(normal_quantile(0.95), 1.95996398454005, 1e-12);
}

TEST(WilsonInterval, Errors) {
  EXPECT_THROW(wilson_interval(1, 0), RangeError);
  EXPECT_THROW(wilson_interval(5, 4), RangeError);
  EXPECT_THROW(wilson_interval(-1, 4), RangeError);
  EXPECT_THROW(wilson_interval(1, 4, 1.0), RangeError);
}

}  // namespace
}  // namespace pbrsim
