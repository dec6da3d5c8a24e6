#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pbrsim/bounds.hpp"

namespace pbrsim {
namespace {

using std::numbers::pi;

CalibrationSnapshot uniform_cal(int n, double t1, double t2, double p1, double readout_s) {
  CalibrationSnapshot cal;
  for (int q = 0; q < n; ++q) cal.qubits.push_back({q, t1, t2, p1});
  for (int q = 0; q + 1 < n; ++q) cal.couplers.push_back({q, q + 1, 2.4e-3});
  cal.readout_duration = readout_s;
  return cal;
}

TEST(QuantumTraceDistance, Examples) {
  EXPECT_EQ(quantum_trace_distance(0.0), 0.0);
  EXPECT_NEAR(quantum_trace_distance(pi / 2), 1.0, 1e-15);
  EXPECT_NEAR(quantum_trace_distance(pi / 4), 0.707106781186548, 1e-15);
  EXPECT_THROW(quantum_trace_distance(-0.1), RangeError);
  EXPECT_THROW(quantum_trace_distance(2.0), RangeError);
}

TEST(EpsilonTol, Examples) {
  for (int n = 1; n <= 6; ++n) EXPECT_EQ(epsilon_tol(1.0, n), 0.0);
  EXPECT_NEAR(epsilon_tol(std::sin(pi / 4), 2), 0.0214466094067262, 1e-15);
  EXPECT_NEAR(epsilon_tol(std::sin(theta_min(5)), 5), 0.00560007714887671, 1e-15);
  EXPECT_NEAR(std::sin(theta_min(5)), 0.290963165032788, 1e-14);
  EXPECT_THROW(epsilon_tol(1.2, 2), RangeError);
  EXPECT_THROW(epsilon_tol(0.5, 0), RangeError);
}

TEST(EpsilonDep, Examples) {
  EXPECT_EQ(epsilon_dep(0.1, 0.2, 0, 0), 0.0);
  EXPECT_NEAR(epsilon_dep(2.1e-4, 0.0, 1, 0), 2.1e-4, 1e-15);
  EXPECT_NEAR(epsilon_dep(1e-3, 1e-2, 10, 5), 0.0584771699660920, 1e-14);
  EXPECT_THROW(epsilon_dep(-1e-3, 0.0, 1, 0), RangeError);
  EXPECT_THROW(epsilon_dep(1e-3, 0.0, -1, 0), RangeError);
}

TEST(NoisyOverlap, Examples) {
  EXPECT_NEAR(noisy_overlap(0.7, 0.0), std::sin(0.7), 1e-15);
  EXPECT_EQ(noisy_overlap(0.7, 1.0), 0.0);
  EXPECT_NEAR(noisy_overlap(pi / 4, 2.1e-4), 0.706958288762498, 1e-14);
  EXPECT_THROW(noisy_overlap(pi / 4, 1.5), RangeError);
}

TEST(EpsilonDec, Examples) {
  EXPECT_EQ(epsilon_dec(0, 1e-4, 1e-4), 0.0);
  EXPECT_NEAR(epsilon_dec(5, 4.2e-4, 4.2e-4), 4.2e-3, 1e-15);
  EXPECT_NEAR(epsilon_dec(2, 4.2e-4, 4.2e-4), 1.68e-3, 1e-15);
  EXPECT_EQ(epsilon_dec(5, 0.2, 0.2), 1.0);
  EXPECT_THROW(epsilon_dec(-1, 0.0, 0.0), RangeError);
}

TEST(EpsilonDec, ThermodynamicalAverages) {
  const auto d = decay_averages(192e-6, 95e-6, 36e-9, 68e-9);
  EXPECT_NEAR(epsilon_dec(5, d.p_ad_mean, d.p_phi_mean), 0.00408998828619118, 1e-15);
}

TEST(EpsilonDecCumulative, MatchesExponential) {
  EXPECT_NEAR(epsilon_dec_cumulative(2, 10, 50e-9, 100e-6), 2 * -std::expm1(-5e-7 / 1e-4), 1e-16);
  EXPECT_EQ(epsilon_dec_cumulative(2, 0, 50e-9, 100e-6), 0.0);
}

TEST(ToleranceReport, IdealCalibrationMatchesIdealBound) {
  CalibrationSnapshot cal;
  cal.qubits = {{0, 1e9, 1e9, 0.0}, {1, 1e9, 1e9, 0.0}};
  cal.couplers = {{0, 1, 0.0}};
  const auto p = PBRParams::solve(2, pi / 4);
  const auto r = tolerance_report(p, cal, build_pbr_circuit(p, 0), NoiseModel::Depolarizing);
  EXPECT_EQ(r.eps_tol_noisy, r.eps_tol_ideal);
  EXPECT_NEAR(r.eps_tol_noisy_thermo, r.eps_tol_ideal, 1e-12);
  EXPECT_EQ(tolerance_report(p, cal, build_pbr_circuit(p, 0), NoiseModel::None).eps_tol_noisy, r.eps_tol_ideal);
}

TEST(ToleranceReport, DepolarizingPreparationError) {
  const auto cal = uniform_cal(2, 100e-6, 100e-6, 2.1e-4, 1e-6);
  const auto p = PBRParams::solve(2, pi / 4);
  const auto r = tolerance_report(p, cal, build_pbr_circuit(p, 0), NoiseModel::Depolarizing);
  EXPECT_NEAR(r.eps_dep, 2.1e-4, 1e-15);
  EXPECT_NEAR(r.d_noisy, 0.706958288762498, 1e-14);
  EXPECT_NEAR(r.eps_tol_noisy, 0.0214683611312508, 1e-14);
  EXPECT_EQ(r.eps_tol_dep_spread, 0.0);
}

TEST(ToleranceReport, ThermodynamicalWithLongReadout) {
  // Device averages T1 = 192 us, T2 = 95 us with a 3 us readout.
  const auto cal2 = uniform_cal(2, 192e-6, 95e-6, 2.5e-4, 3e-6);
  const auto p2 = PBRParams::solve(2, pi / 4);
  const auto r2 = tolerance_report(p2, cal2, build_pbr_circuit(p2, 0), NoiseModel::Thermodynamical);
  EXPECT_NEAR(r2.eps_thermo, 0.0471407766097820, 1e-14);
  EXPECT_NEAR(r2.eps_tol_noisy, 0.0266059782622909, 1e-14);
  EXPECT_NEAR(r2.eps_tol_noisy, 0.0272, 0.0036);

  const auto cal5 = uniform_cal(5, 192e-6, 95e-6, 2.5e-4, 3e-6);
  const auto p5 = PBRParams::solve(5, theta_min(5));
  const auto r5 = tolerance_report(p5, cal5, build_pbr_circuit(p5, 0), NoiseModel::Thermodynamical);
  EXPECT_NEAR(r5.eps_tol_noisy, 0.00616310732480290, 1e-14);
}

TEST(ToleranceReport, SpreadAcrossQubits) {
  CalibrationSnapshot cal;
  cal.qubits = {{0, 1e-4, 1e-4, 1e-4}, {1, 1e-4, 1e-4, 3e-4}};
  cal.couplers = {{0, 1, 1e-3}};
  const auto p = PBRParams::solve(2, pi / 4);
  const auto r = tolerance_report(p, cal, build_pbr_circuit(p, 0), NoiseModel::Depolarizing);
  EXPECT_NEAR(r.eps_dep, 2e-4, 1e-16);
  EXPECT_GT(r.eps_tol_dep_spread, 0.0);
  const double t_lo = epsilon_tol(noisy_overlap(pi / 4, 1e-4), 2);
  const double t_hi = epsilon_tol(noisy_overlap(pi / 4, 3e-4), 2);
  EXPECT_NEAR(r.eps_tol_dep_spread, 0.5 * (t_hi - t_lo), 1e-15);
}

TEST(ToleranceReport, NoisyNeverBelowIdeal) {
  const auto cal = uniform_cal(3, 80e-6, 60e-6, 1e-3, 2e-6);
  const auto p = PBRParams::solve(3, 0.9);
  for (auto m : {NoiseModel::Depolarizing, NoiseModel::Thermodynamical}) {
    const auto r = tolerance_report(p, cal, build_pbr_circuit(p, 0), m);
    EXPECT_GT(r.eps_tol_noisy, r.eps_tol_ideal);
    EXPECT_LE(r.eps_tol_noisy, 1.0);
    EXPECT_GT(r.eps_dec, 0.0);
    EXPECT_GT(r.eps_dec_cumulative, 0.0);
  }
}

}  // namespace
}  // namespace pbrsim
