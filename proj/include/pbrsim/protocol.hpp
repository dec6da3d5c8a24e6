#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "pbrsim/circuit.hpp"
#include "pbrsim/errors.hpp"
#include "pbrsim/simulate.hpp"
#include "pbrsim/tolerances.hpp"

namespace pbrsim {

/// Smallest preparation angle for which n copies admit an antidistinguishing
/// measurement: 2 atan(2^{1/n} - 1).
inline double theta_min(int n) {
  if (n < 1) throw RangeError("theta_min needs n >= 1");
  return 2.0 * std::atan(std::pow(2.0, 1.0 / n) - 1.0);
}

namespace detail {

inline std::complex<double> ipow(std::complex<double> z, int n) {
  std::complex<double> r = 1.0;
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

// 1 - (1 + tan(theta/2) e^{i beta})^n; its phase is alpha at a root.
inline std::complex<double> angle_target(int n, double theta, double beta) {
  const double t = std::tan(theta / 2.0);
  return 1.0 - ipow(1.0 + t * std::polar(1.0, beta), n);
}

}  // namespace detail

/// |e^{i alpha} + (1 + e^{i beta} tan(theta/2))^n - 1|.
inline double angle_residual(int n, double theta, double alpha, double beta) {
  return std::abs(std::polar(1.0, alpha) - detail::angle_target(n, theta, beta));
}

struct MeasurementAngles {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Solves e^{i alpha} + (1 + e^{i beta} tan(theta/2))^n - 1 = 0 with
/// beta in [0, pi] and alpha in (-pi, pi].
inline MeasurementAngles solve_angles(int n, double theta) {
  if (n < 1) throw RangeError("solve_angles needs n >= 1");
  if (!(theta <= std::numbers::pi / 2.0 + 1e-15)) throw RangeError("theta must not exceed pi/2");
  // |1 - (1 + t e^{i beta})^n| - 1: >= 0 at beta = 0 iff theta >= theta_min,
  // and <= 0 at beta = pi; decreasing in between.
  auto excess = [&](double beta) { return std::abs(detail::angle_target(n, theta, beta)) - 1.0; };
  const double f0 = excess(0.0);
  // Near theta_min the root sits at beta = 0, where excess() is flat, so a
  // rounding-level positive f0 would otherwise send bisection to beta ~ 1e-8.
  constexpr double kFlat = 1e-12;
  if (f0 < -kFlat) {
    throw NoSolutionError("theta = " + std::to_string(theta) + " is below theta_min(" +
                          std::to_string(n) + ") = " + std::to_string(theta_min(n)));
  }
  double beta = 0.0;
  if (f0 > kFlat && std::abs(excess(std::numbers::pi)) <= kFlat) {
    // Same flatness at the other end (theta = pi/2).
    beta = std::numbers::pi;
  } else if (f0 > kFlat) {
    double lo = 0.0, hi = std::numbers::pi;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    beta = std::abs(excess(lo)) <= std::abs(excess(hi)) ? lo : hi;
  }
  double alpha = std::arg(detail::angle_target(n, theta, beta));
  if (alpha <= -std::numbers::pi + 1e-12) alpha += 2.0 * std::numbers::pi;
  return {alpha, beta};
}

/// (n, theta, alpha, beta) of one protocol instance.
struct PBRParams {
  int n = 2;
  double theta = std::numbers::pi / 4.0;
  double alpha = std::numbers::pi;
  double beta = 0.0;

  static PBRParams solve(int n, double theta) {
    const auto a = solve_angles(n, theta);
    PBRParams p{n, theta, a.alpha, a.beta};
    p.validate();
    return p;
  }

  double residual() const { return angle_residual(n, theta, alpha, beta); }

  void validate() const {
    if (n < 2) throw ValidationError("protocol needs n >= 2");
    if (n > tol::kMaxSimQubits) throw ValidationError("n exceeds the simulation cap");
    if (theta < theta_min(n) - 1e-12 || theta > std::numbers::pi / 2.0 + 1e-15) {
      throw ValidationError("theta outside [theta_min(n), pi/2]");
    }
    if (!(residual() < tol::kAlgebraic)) throw ValidationError("alpha/beta do not solve the angle equation");
  }
};

/// Bit j (qubit j) of an n-bit input index; qubit 0 is the most significant.
inline int input_bit(std::uint32_t x, int n, int j) { return static_cast<int>((x >> (n - 1 - j)) & 1U); }

inline std::string bitstring(std::uint32_t x, int n) {
  std::string s(n, '0');
  for (int j = 0; j < n; ++j) s[j] = input_bit(x, n, j) ? '1' : '0';
  return s;
}

inline std::uint32_t parse_bitstring(std::string_view s) {
  std::uint32_t x = 0;
  for (char ch : s) {
    if (ch != '0' && ch != '1') throw ValidationError("bitstring must contain only 0 and 1");
    x = (x << 1) | static_cast<std::uint32_t>(ch - '0');
  }
  return x;
}

/// RY(+theta) on qubit j when x_j = 0, RY(-theta) when x_j = 1.
inline Circuit build_preparation(std::uint32_t x, int n, double theta) {
  if (n < 1) throw ValidationError("preparation needs n >= 1");
  if (n < 32 && x >= (std::uint32_t{1} << n)) throw ValidationError("input index out of range");
  Circuit c(n);
  for (int j = 0; j < n; ++j) c.add(Gate::ry(j, input_bit(x, n, j) == 0 ? theta : -theta));
  return c;
}

inline Circuit build_preparation(std::string_view bits, double theta) {
  return build_preparation(parse_bitstring(bits), static_cast<int>(bits.size()), theta);
}

/// PHASE(beta) on each qubit (omitted when beta = 0), a phase e^{i alpha} on
/// |0...0>, Hadamards, then MEASURE of all qubits in order.
inline Circuit build_entangling_measurement(int n, double alpha, double beta) {
  if (n < 2) throw ValidationError("entangling measurement needs n >= 2");
  Circuit c(n);
  if (beta != 0.0)
    for (int j = 0; j < n; ++j) c.add(Gate::phase(j, beta));
  if (n == 2) {
    c.add(Gate::cphase_open(0, 1, alpha));
  } else {
    std::vector<int> qs(n);
    for (int j = 0; j < n; ++j) qs[j] = j;
    c.add(Gate::mcphase_open(std::move(qs), alpha));
  }
  for (int j = 0; j < n; ++j) c.add(Gate::h(j));
  std::vector<int> all(n);
  for (int j = 0; j < n; ++j) all[j] = j;
  c.add(Gate::measure(std::move(all)));
  return c;
}

inline Circuit build_pbr_circuit(const PBRParams& p, std::uint32_t x) {
  Circuit c = build_preparation(x, p.n, p.theta);
  c.append(build_entangling_measurement(p.n, p.alpha, p.beta));
  return c;
}

/// Input x -> the outcome quantum mechanics forbids for it.
class ForbiddenMap {
 public:
  ForbiddenMap() = default;
  explicit ForbiddenMap(std::vector<std::uint32_t> mapping) : mapping_(std::move(mapping)) {
    std::vector<bool> seen(mapping_.size(), false);
    for (auto k : mapping_) {
      if (k >= mapping_.size() || seen[k]) throw ProtocolError("forbidden map is not a bijection");
      seen[k] = true;
    }
  }

  std::size_t size() const { return mapping_.size(); }
  std::uint32_t operator[](std::uint32_t x) const { return mapping_.at(x); }
  const std::vector<std::uint32_t>& mapping() const { return mapping_; }
  bool is_identity() const {
    for (std::uint32_t x = 0; x < mapping_.size(); ++x)
      if (mapping_[x] != x) return false;
    return true;
  }

  friend bool operator==(const ForbiddenMap&, const ForbiddenMap&) = default;

 private:
  std::vector<std::uint32_t> mapping_;
};

struct ForbiddenDiscovery {
  ForbiddenMap map;
  // Ideal probability of the assigned forbidden outcome, per input.
  std::vector<double> forbidden_probability;
  // Smallest ideal probability outside each input's zero set.
  std::vector<double> smallest_allowed;
};

namespace detail {

// Kuhn's augmenting-path matching; candidates are tried in listed order.
inline bool augment(std::uint32_t x, const std::vector<std::vector<std::uint32_t>>& cand,
                    std::vector<std::int64_t>& owner, std::vector<bool>& visited) {
  for (auto k : cand[x]) {
    if (visited[k]) continue;
    visited[k] = true;
    if (owner[k] < 0 || augment(static_cast<std::uint32_t>(owner[k]), cand, owner, visited)) {
      owner[k] = x;
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Simulates the ideal circuit for every input and assigns each input one of
/// its zero-probability outcomes so that the assignment is a bijection.
inline ForbiddenDiscovery discover_forbidden_map_detailed(const PBRParams& params) {
  params.validate();
  const std::uint32_t dim = std::uint32_t{1} << params.n;
  std::vector<std::vector<double>> probs(dim);
  std::vector<std::vector<std::uint32_t>> cand(dim);
  ForbiddenDiscovery out;
  out.smallest_allowed.assign(dim, 1.0);
  for (std::uint32_t x = 0; x < dim; ++x) {
    probs[x] = outcome_distribution(build_pbr_circuit(params, x));
    for (std::uint32_t k = 0; k < dim; ++k) {
      const double p = probs[x][k];
      if (p < tol::kForbidden) {
        cand[x].push_back(k);
      } else {
        if (p < tol::kGuardBand) {
          throw ProtocolError("input " + bitstring(x, params.n) + ": outcome " +
                              bitstring(k, params.n) + " has ambiguous probability " +
                              format_double(p));
        }
        out.smallest_allowed[x] = std::min(out.smallest_allowed[x], p);
      }
    }
    if (cand[x].empty()) {
      throw ProtocolError("input " + bitstring(x, params.n) +
                          " has no forbidden outcome; check alpha/beta and gate conventions");
    }
    // Prefer the outcome equal to the input label when it is a zero.
    std::stable_partition(cand[x].begin(), cand[x].end(), [x](std::uint32_t k) { return k == x; });
  }
  std::vector<std::int64_t> owner(dim, -1);
  for (std::uint32_t x = 0; x < dim; ++x) {
    std::vector<bool> visited(dim, false);
    if (!detail::augment(x, cand, owner, visited)) {
      throw ProtocolError("zero-probability outcomes admit no one-to-one assignment");
    }
  }
  std::vector<std::uint32_t> mapping(dim);
  for (std::uint32_t k = 0; k < dim; ++k) mapping[static_cast<std::uint32_t>(owner[k])] = k;
  out.map = ForbiddenMap(std::move(mapping));
  out.forbidden_probability.resize(dim);
  for (std::uint32_t x = 0; x < dim; ++x) out.forbidden_probability[x] = probs[x][out.map[x]];
  return out;
}

inline ForbiddenMap discover_forbidden_map(const PBRParams& params) {
  return discover_forbidden_map_detailed(params).map;
}

}  // namespace pbrsim
