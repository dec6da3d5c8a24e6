#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <complex>
#include <numbers>
#include <vector>

#include "pbrsim/channels.hpp"
#include "pbrsim/noise.hpp"
#include "pbrsim/protocol.hpp"
#include "pbrsim/simulate.hpp"

namespace pbrsim {
namespace {

using std::numbers::pi;

TEST(ThetaMin, Examples) {
  EXPECT_NEAR(theta_min(2), pi / 4, 1e-15);
  EXPECT_NEAR(theta_min(1), pi / 2, 1e-15);
  EXPECT_NEAR(theta_min(5), 0.295233405445883, 1e-14);
  EXPECT_NEAR(theta_min(3), 0.508588212230161, 1e-14);
  EXPECT_THROW(theta_min(0), RangeError);
}

TEST(SolveAngles, AdjacentPairExample) {
  const auto a = solve_angles(2, pi / 4);
  EXPECT_NEAR(a.alpha, pi, 1e-9);
  EXPECT_NEAR(a.beta, 0.0, 1e-9);
}

TEST(SolveAngles, ResidualAtThresholdAndAbove) {
  for (double theta : {theta_min(5), 0.295233405445883, 0.4, 1.0, pi / 2}) {
    const auto a = solve_angles(5, theta);
    EXPECT_LT(angle_residual(5, theta, a.alpha, a.beta), 1e-10) << theta;
    EXPECT_GE(a.beta, 0.0);
    EXPECT_LE(a.beta, pi);
    EXPECT_GT(a.alpha, -pi);
    EXPECT_LE(a.alpha, pi);
  }
}

TEST(SolveAngles, BelowThreshold) {
  EXPECT_THROW(solve_angles(2, 0.1), NoSolutionError);
  EXPECT_THROW(solve_angles(5, 0.29), NoSolutionError);
  EXPECT_THROW(solve_angles(2, 2.0), RangeError);
}

TEST(SolveAngles, RightAngleNeedsNoPhase) {
  // At theta = pi/2 the preparations are |+> and |->, antidistinguished by
  // Hadamards alone.
  const auto a = solve_angles(3, pi / 2);
  EXPECT_LT(angle_residual(3, pi / 2, a.alpha, a.beta), 1e-10);
}

TEST(BuildPreparation, ProductState) {
  const auto p00 = outcome_distribution(build_preparation("00", pi / 4));
  EXPECT_NEAR(p00[0], 0.728553390593274, 1e-12);
  const auto rho = evolve(build_preparation("01", pi / 4));
  // Qubit 1 is cos(pi/8)|0> - sin(pi/8)|1>; qubit 0 is cos|0> + sin|1>.
  const double c = std::cos(pi / 8), s = std::sin(pi / 8);
  EXPECT_NEAR(rho(0, 1).real(), c * c * c * (-s), 1e-12);
  EXPECT_NEAR(rho(1, 1).real(), c * c * s * s, 1e-12);
  for (std::uint32_t x = 0; x < 8; ++x) {
    EXPECT_NEAR(outcome_distribution(build_preparation(x, 3, 0.0))[0], 1.0, 1e-15);
  }
  EXPECT_THROW(build_preparation(4, 2, 0.1), ValidationError);
  EXPECT_THROW(build_preparation("012", 0.1), ValidationError);
}

TEST(BuildPreparation, OverlapIsCosSquared) {
  for (double theta : {0.1, 0.5, pi / 4, 1.3}) {
    const auto u0 = gate_unitary(Gate::ry(0, theta));
    const auto u1 = gate_unitary(Gate::ry(0, -theta));
    const cplx overlap = std::conj(u0(0, 0)) * u1(0, 0) + std::conj(u0(1, 0)) * u1(1, 0);
    EXPECT_NEAR(std::norm(overlap), std::cos(theta) * std::cos(theta), 1e-12);
  }
}

TEST(BuildEntanglingMeasurement, PairStructure) {
  const auto c = build_entangling_measurement(2, pi, 0.0);
  ASSERT_EQ(c.size(), 4u);
  EXPECT_EQ(c.gates()[0].kind, GateKind::CPHASE_OPEN);
  EXPECT_EQ(c.gates()[1].kind, GateKind::H);
  EXPECT_EQ(c.gates()[2].kind, GateKind::H);
  EXPECT_EQ(c.gates()[3].kind, GateKind::MEASURE);
  EXPECT_EQ(gate_counts(c), (GateCounts{2, 1}));
  const auto with_phase = build_entangling_measurement(2, pi, 0.3);
  EXPECT_EQ(gate_counts(with_phase), (GateCounts{4, 1}));
}

TEST(BuildEntanglingMeasurement, FiveQubitsUseOneMultiControlledGate) {
  const auto c = build_entangling_measurement(5, 1.0, 0.5);
  int mc = 0;
  for (const auto& g : c.gates()) {
    if (g.kind == GateKind::MCPHASE_OPEN) {
      ++mc;
      EXPECT_EQ(g.arity() - 1, 4);
    }
  }
  EXPECT_EQ(mc, 1);
  EXPECT_EQ(c.measured_qubits(), (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(DiscoverForbiddenMap, AdjacentPair) {
  const auto params = PBRParams::solve(2, pi / 4);
  const auto found = discover_forbidden_map_detailed(params);
  EXPECT_TRUE(found.map.is_identity());
  for (double p : found.forbidden_probability) EXPECT_LT(p, 1e-12);
  // Independent amplitude: <00| H(x)H CPHASE_OPEN(pi) |psi_a psi_b>.
  const double c = std::cos(pi / 8), s = std::sin(pi / 8);
  for (std::uint32_t x = 0; x < 4; ++x) {
    const double b0 = (x & 2) ? -s : s;
    const double b1 = (x & 1) ? -s : s;
    const double amp00 = 0.5 * (-c * c + c * b1 + b0 * c + b0 * b1);
    EXPECT_NEAR(amp00 * amp00, outcome_distribution(build_pbr_circuit(params, x))[0], 1e-12);
  }
}

TEST(DiscoverForbiddenMap, ThreeQubitsAboveThreshold) {
  const auto params = PBRParams::solve(3, theta_min(3) + 0.05);
  const auto found = discover_forbidden_map_detailed(params);
  EXPECT_EQ(found.map.size(), 8u);
  for (double p : found.forbidden_probability) EXPECT_LT(p, 1e-10);
  for (double p : found.smallest_allowed) EXPECT_GE(p, 1e-8);
}

TEST(DiscoverForbiddenMap, GridOverThetaRange) {
  for (int n = 2; n <= 5; ++n) {
    for (int k = 0; k < 5; ++k) {
      const double theta = theta_min(n) + (pi / 2 - theta_min(n)) * k / 4.0;
      const auto params = PBRParams::solve(n, theta);
      EXPECT_LT(params.residual(), 1e-10);
      const auto found = discover_forbidden_map_detailed(params);
      for (double p : found.forbidden_probability) EXPECT_LT(p, 1e-10) << n << " " << theta;
    }
  }
}

TEST(DiscoverForbiddenMap, WrongAnglesAreRejected) {
  PBRParams p;
  p.n = 3;
  p.theta = 1.0;
  p.alpha = 0.0;
  p.beta = 0.0;
  EXPECT_THROW(discover_forbidden_map(p), ValidationError);
}

TEST(DiscoverForbiddenMap, StableUnderTinyDepolarizingNoise) {
  const auto params = PBRParams::solve(3, 0.8);
  const auto map = discover_forbidden_map(params);
  for (std::uint32_t x = 0; x < 8; ++x) {
    const Circuit ideal = build_pbr_circuit(params, x);
    Circuit noisy(3);
    for (const auto& g : ideal.gates()) {
      noisy.add(g);
      if (is_unitary_kind(g.kind) && g.arity() <= 2) noisy.add(Gate::noise(depolarizing_channel(5e-7, g.arity()), g.qubits));
    }
    const auto probs = outcome_distribution(noisy);
    const auto argmin = std::min_element(probs.begin(), probs.end()) - probs.begin();
    EXPECT_EQ(static_cast<std::uint32_t>(argmin), map[x]);
  }
}

TEST(ForbiddenMap, RejectsNonBijection) {
  EXPECT_THROW(ForbiddenMap({0, 0, 1, 2}), ProtocolError);
  EXPECT_THROW(ForbiddenMap({0, 4}), ProtocolError);
  EXPECT_FALSE(ForbiddenMap({1, 0}).is_identity());
}

TEST(Bitstrings, MostSignificantFirst) {
  EXPECT_EQ(bitstring(1, 3), "001");
  EXPECT_EQ(bitstring(6, 3), "110");
  EXPECT_EQ(parse_bitstring("110"), 6u);
  EXPECT_EQ(input_bit(4, 3, 0), 1);
  EXPECT_THROW(parse_bitstring("1a"), ValidationError);
}

}  // namespace
}  // namespace pbrsim
