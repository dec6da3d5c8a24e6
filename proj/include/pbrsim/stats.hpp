#pragma once

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "pbrsim/errors.hpp"
#include "pbrsim/tolerances.hpp"

namespace pbrsim {

/// Engine for the stream identified by (seed, stream); independent of the
/// order in which streams are consumed.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

/// Multinomial draw of `shots` outcomes via a chain of conditional binomials.
inline std::vector<std::int64_t> sample_counts(std::span<const double> probs, std::int64_t shots,
                                               std::mt19937_64& rng) {
  if (shots < 0) throw RangeError("shots must be non-negative");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw RangeError("probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) >= tol::kNormalization) throw RangeError("probabilities must sum to 1");
  std::vector<std::int64_t> counts(probs.size(), 0);
  std::int64_t left = shots;
  double mass = total;
  for (std::size_t k = 0; k < probs.size() && left > 0; ++k) {
    if (k + 1 == probs.size()) {
      counts[k] = left;
      break;
    }
    const double q = mass > 0.0 ? std::clamp(probs[k] / mass, 0.0, 1.0) : 0.0;
    std::int64_t draw = 0;
    if (q >= 1.0) {
      draw = left;
    } else if (q > 0.0) {
      draw = std::binomial_distribution<std::int64_t>(left, q)(rng);
    }
    counts[k] = draw;
    left -= draw;
    mass -= probs[k];
  }
  return counts;
}

inline std::vector<std::int64_t> sample_counts(std::span<const double> probs, std::int64_t shots,
                                               std::uint64_t seed) {
  auto rng = stream_engine(seed, 0);
  return sample_counts(probs, shots, rng);
}

/// Two-sided standard-normal quantile for the given confidence level.
inline double normal_quantile(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw RangeError("confidence must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + confidence / 2.0);
}

/// Wilson score interval for k successes in m trials.
inline std::pair<double, double> wilson_interval(std::int64_t k, std::int64_t m, double confidence = 0.95) {
  if (m < 1 || k < 0 || k > m) throw RangeError("wilson_interval needs 0 <= k <= m and m >= 1");
  const double z = normal_quantile(confidence);
  const double n = static_cast<double>(m);
  const double phat = static_cast<double>(k) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  const double lo = k == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = k == m ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

}  // namespace pbrsim
