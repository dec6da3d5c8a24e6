#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "pbrsim/calibration.hpp"
#include "pbrsim/noise.hpp"
#include "pbrsim/protocol.hpp"
#include "pbrsim/simulate.hpp"

namespace pbrsim {
namespace {

using std::numbers::pi;

CalibrationSnapshot pair_cal() {
  CalibrationSnapshot cal;
  cal.qubits = {{1, 173e-6, 172e-6, 2.1e-4, 36e-9, 0.01, 0.01}, {2, 239e-6, 276e-6, 2.8e-4, 36e-9, 0.01, 0.01}};
  cal.couplers = {{1, 2, 2.4e-3, 68e-9}};
  return cal;
}

int count_noise(const Circuit& c) {
  int k = 0;
  for (const auto& g : c.gates()) k += g.kind == GateKind::NOISE;
  return k;
}

TEST(LoadCalibration, ParsesUnits) {
  const auto cal = parse_calibration(std::string(R"({"qubits": [{"id": 4, "t1_us": 192, "t2_us": 95, "p1": 1e-4,
      "p01": 0.02, "p10": 0.01}], "readout_us": 3})"));
  ASSERT_EQ(cal.qubits.size(), 1u);
  EXPECT_DOUBLE_EQ(cal.qubit(4).t1, 1.92e-4);
  EXPECT_DOUBLE_EQ(cal.qubit(4).t2, 9.5e-5);
  EXPECT_DOUBLE_EQ(cal.qubit(4).single_gate_duration, 36e-9);
  EXPECT_DOUBLE_EQ(cal.readout_duration, 3e-6);
  EXPECT_DOUBLE_EQ(cal.qubit(4).readout_p01, 0.02);
}

TEST(LoadCalibration, RoundTripThroughJson) {
  const auto cal = pair_cal();
  const auto back = parse_calibration(calibration_to_json(cal));
  ASSERT_EQ(back.qubits.size(), 2u);
  EXPECT_NEAR(back.qubit(2).t2, 276e-6, 1e-18);
  EXPECT_NEAR(back.coupler(2, 1).p2, 2.4e-3, 1e-18);
  EXPECT_NEAR(back.coupler(1, 2).duration, 68e-9, 1e-20);
}

TEST(LoadCalibration, DataFile) {
  const auto cal = load_calibration(std::string(PBRSIM_DATA_DIR) + "/adjacent_pair.json");
  EXPECT_DOUBLE_EQ(cal.qubit(1).t1, 173e-6);
  EXPECT_DOUBLE_EQ(cal.coupler(1, 2).p2, 2.4e-3);
}

TEST(LoadCalibration, ValidationErrorsNameTheField) {
  EXPECT_THROW(parse_calibration(std::string(R"({"qubits": []})")), ValidationError);
  try {
    parse_calibration(std::string(R"({"qubits": [{"id": 0, "t1_us": 100, "t2_us": 100, "p1": 0}],
        "couplers": [{"q0": 0, "q1": 9, "p2": 0.01}]})"));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("couplers[0]"), std::string::npos) << e.what();
  }
  try {
    parse_calibration(std::string(R"({"qubits": [{"id": 0, "t1_us": -1, "t2_us": 100, "p1": 0}]})"));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("t1_us"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_calibration(std::string(R"({"qubits": [{"id": 0, "t1_us": 1, "t2_us": 1, "p1": 2}]})")),
               ValidationError);
  EXPECT_THROW(parse_calibration(std::string(R"({"qubits": [{"id": 0, "t1_us": 1, "t2_us": 1, "p1": 0},
      {"id": 0, "t1_us": 1, "t2_us": 1, "p1": 0}]})")),
               ValidationError);
}

TEST(LoadCalibration, FormatErrors) {
  EXPECT_THROW(parse_calibration(std::string("{not json")), FormatError);
  EXPECT_THROW(parse_calibration(std::string("[]")), FormatError);
  EXPECT_THROW(parse_calibration(std::string(R"({"qubits": [{"id": 0, "t1": 1, "t2_us": 1, "p1": 0}]})")),
               FormatError);
  EXPECT_THROW(parse_calibration(std::string(R"({"qubits": [{"id": 0, "t1_us": "x", "t2_us": 1, "p1": 0}]})")),
               FormatError);
  EXPECT_THROW(parse_calibration(std::string(R"({"qubits": [], "extra": 1})")), FormatError);
  EXPECT_THROW(load_calibration("/nonexistent/calibration.json"), FormatError);
}

TEST(CalibrationSnapshot, LookupsAndMeans) {
  const auto cal = pair_cal();
  EXPECT_THROW(cal.qubit(3), CalibrationError);
  EXPECT_THROW(cal.coupler(1, 3), CalibrationError);
  EXPECT_TRUE(cal.has_qubit(2));
  EXPECT_NEAR(cal.mean_p1(), 2.45e-4, 1e-18);
  EXPECT_NEAR(cal.mean_t1(), 206e-6, 1e-18);
}

TEST(ReadoutMatrix, Examples) {
  const auto id = ReadoutMatrix::from_errors(0.0, 0.0);
  EXPECT_EQ(id.m[0][0], 1.0);
  EXPECT_EQ(id.m[0][1], 0.0);
  const auto r = ReadoutMatrix::from_errors(0.01, 0.02);
  EXPECT_DOUBLE_EQ(r.m[0][0], 0.99);
  EXPECT_DOUBLE_EQ(r.m[0][1], 0.02);
  EXPECT_DOUBLE_EQ(r.m[1][0], 0.01);
  EXPECT_DOUBLE_EQ(r.m[1][1], 0.98);
  EXPECT_TRUE(r.is_column_stochastic());
  const std::vector<double> ideal{1.0, 0.0};
  const std::vector<ReadoutMatrix> mats{r};
  const auto out = apply_readout(ideal, mats);
  EXPECT_DOUBLE_EQ(out[0], 0.99);
  EXPECT_DOUBLE_EQ(out[1], 0.01);
  EXPECT_THROW(ReadoutMatrix::from_errors(1.5, 0.0), RangeError);
}

TEST(ApplyReadout, IdentityAndUniform) {
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  const std::vector<ReadoutMatrix> ids(2);
  EXPECT_EQ(apply_readout(p, ids), p);
  const std::vector<double> uniform(4, 0.25);
  const std::vector<ReadoutMatrix> sym{ReadoutMatrix::from_errors(0.03, 0.03), ReadoutMatrix::from_errors(0.1, 0.1)};
  for (double v : apply_readout(uniform, sym)) EXPECT_NEAR(v, 0.25, 1e-15);
  EXPECT_THROW(apply_readout(p, std::vector<ReadoutMatrix>(3)), IndexError);
}

TEST(ApplyReadout, FirstMatrixActsOnMostSignificantBit) {
  const std::vector<double> p{1.0, 0.0, 0.0, 0.0};
  const std::vector<ReadoutMatrix> mats{ReadoutMatrix::from_errors(0.1, 0.0), ReadoutMatrix()};
  const auto out = apply_readout(p, mats);
  EXPECT_NEAR(out[2], 0.1, 1e-15);
  EXPECT_NEAR(out[1], 0.0, 1e-15);
}

TEST(AttachNoise, Examples) {
  const auto cal = pair_cal();
  const QubitIds ids{1, 2};
  EXPECT_TRUE(attach_noise(Circuit(2), cal, NoiseModel::Depolarizing, ids).empty());
  Circuit one(2);
  one.add(Gate::ry(0, 0.3));
  EXPECT_EQ(count_noise(attach_noise(one, cal, NoiseModel::Depolarizing, ids)), 1);
  // Preparation + measurement for n = 2: 2 RY, 2 H, 1 CPHASE_OPEN.
  const auto pbr = build_pbr_circuit(PBRParams::solve(2, pi / 4), 0);
  EXPECT_EQ(gate_counts(pbr), (GateCounts{4, 1}));
  EXPECT_EQ(count_noise(attach_noise(pbr, cal, NoiseModel::Depolarizing, ids)), 5);
  // Thermodynamical: damping + dephasing per participant, plus readout decay.
  EXPECT_EQ(count_noise(attach_noise(pbr, cal, NoiseModel::Thermodynamical, ids)), 2 * (4 + 2) + 2 * 2);
  EXPECT_EQ(count_noise(attach_noise(pbr, cal, NoiseModel::None, ids)), 0);
}

TEST(AttachNoise, UsesPerQubitValues) {
  const auto cal = pair_cal();
  Circuit c(2);
  c.add(Gate::h(0));
  const auto noisy = attach_noise(c, cal, NoiseModel::Depolarizing, {2, 1});
  EXPECT_EQ(noisy.gates()[1].channel->label, depolarizing_channel(2.8e-4, 1).label);
  EXPECT_THROW(attach_noise(c, cal, NoiseModel::Depolarizing, {5, 1}), CalibrationError);
  EXPECT_THROW(attach_noise(c, cal, NoiseModel::Depolarizing), CalibrationError);
}

TEST(AttachNoise, MultiControlledPhaseCost) {
  CalibrationSnapshot cal;
  for (int q = 0; q < 5; ++q) cal.qubits.push_back({q, 100e-6, 100e-6, 1e-4});
  for (int q = 0; q < 4; ++q) cal.couplers.push_back({q, q + 1, 1e-3});
  Circuit c(5);
  c.add(Gate::mcphase_open({0, 1, 2, 3, 4}, 1.0));
  const auto noisy = attach_noise(c, cal, NoiseModel::Depolarizing);
  EXPECT_EQ(count_noise(noisy), 6);
  const auto thermo = attach_noise(c, cal, NoiseModel::Thermodynamical);
  EXPECT_EQ(count_noise(thermo), 10);
  EXPECT_NEAR(gate_duration(c.gates()[0], cal), 6 * 68e-9, 1e-18);
}

TEST(AttachNoise, ThermodynamicalDurations) {
  const auto cal = pair_cal();
  Circuit c(2);
  c.add(Gate::cz(0, 1));
  const auto noisy = attach_noise(c, cal, NoiseModel::Thermodynamical, {1, 2});
  ASSERT_EQ(noisy.size(), 5u);
  EXPECT_EQ(noisy.gates()[1].channel->label, amplitude_damping(p_from_time(68e-9, 173e-6)).label);
  EXPECT_EQ(noisy.gates()[4].channel->label, dephasing(p_from_time(68e-9, 276e-6)).label);
}

TEST(DecayAverages, ThermodynamicalExample) {
  const auto d = decay_averages(192e-6, 95e-6, 36e-9, 68e-9);
  EXPECT_NEAR(d.p_ad_mean, 2.70793190014898e-4, 1e-16);
  EXPECT_NEAR(d.p_phi_mean, 5.47204467223339e-4, 1e-16);
}

TEST(ModelNames, RoundTrip) {
  for (auto m : {NoiseModel::None, NoiseModel::Depolarizing, NoiseModel::Thermodynamical})
    EXPECT_EQ(model_from_name(model_name(m)), m);
  EXPECT_THROW(model_from_name("amplitude"), ValidationError);
}

TEST(Simulate, NoisyRunStaysPhysical) {
  const auto cal = pair_cal();
  const auto pbr = build_pbr_circuit(PBRParams::solve(2, pi / 4), 2);
  const auto rho = evolve(attach_noise(pbr, cal, NoiseModel::Thermodynamical, {1, 2}));
  EXPECT_NO_THROW(rho.validate());
  EXPECT_LT(rho.purity(), 1.0);
}

}  // namespace
}  // namespace pbrsim
