#pragma once

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pbrsim/calibration.hpp"
#include "pbrsim/channels.hpp"
#include "pbrsim/circuit.hpp"

namespace pbrsim {

enum class NoiseModel { None, Depolarizing, Thermodynamical };

inline std::string_view model_name(NoiseModel m) {
  switch (m) {
    case NoiseModel::None: return "none";
    case NoiseModel::Depolarizing: return "dep";
    case NoiseModel::Thermodynamical: return "thermo";
  }
  return "?";
}

inline NoiseModel model_from_name(std::string_view s) {
  if (s == "none" || s == "ideal") return NoiseModel::None;
  if (s == "dep" || s == "depolarizing") return NoiseModel::Depolarizing;
  if (s == "thermo" || s == "thermodynamical") return NoiseModel::Thermodynamical;
  throw ValidationError("unknown noise model '" + std::string(s) + "'");
}

/// Column-stochastic 2x2 confusion matrix, m[observed][actual].
struct ReadoutMatrix {
  double m[2][2] = {{1.0, 0.0}, {0.0, 1.0}};

  static ReadoutMatrix from_errors(double p10, double p01) {
    detail::require_probability(p10, "p10");
    detail::require_probability(p01, "p01");
    ReadoutMatrix r;
    r.m[0][0] = 1.0 - p10;
    r.m[0][1] = p01;
    r.m[1][0] = p10;
    r.m[1][1] = 1.0 - p01;
    return r;
  }

  bool is_column_stochastic() const {
    for (int c = 0; c < 2; ++c) {
      if (m[0][c] < 0.0 || m[0][c] > 1.0 || m[1][c] < 0.0 || m[1][c] > 1.0) return false;
      if (std::abs(m[0][c] + m[1][c] - 1.0) >= tol::kStochastic) return false;
    }
    return true;
  }
};

inline ReadoutMatrix readout_matrix(const QubitCalibration& q) {
  return ReadoutMatrix::from_errors(q.readout_p10, q.readout_p01);
}

/// (M_1 (x) ... (x) M_n) probs, mats[0] acting on the most significant bit.
inline std::vector<double> apply_readout(std::span<const double> probs,
                                         std::span<const ReadoutMatrix> mats) {
  if (probs.size() != (std::size_t{1} << mats.size())) {
    throw IndexError("readout: distribution has " + std::to_string(probs.size()) +
                     " entries for " + std::to_string(mats.size()) + " qubits");
  }
  std::vector<double> cur(probs.begin(), probs.end());
  const std::size_t n = mats.size();
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t bit = std::size_t{1} << (n - 1 - j);
    const auto& m = mats[j].m;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (i & bit) continue;
      const double p0 = cur[i];
      const double p1 = cur[i | bit];
      cur[i] = m[0][0] * p0 + m[0][1] * p1;
      cur[i | bit] = m[1][0] * p0 + m[1][1] * p1;
    }
  }
  return cur;
}

namespace detail {

inline void append_decay(Circuit& out, const QubitCalibration& qc, int q, double seconds) {
  out.add(Gate::noise(amplitude_damping(p_from_time(seconds, qc.t1)), {q}));
  out.add(Gate::noise(dephasing(p_from_time(seconds, qc.t2)), {q}));
}

}  // namespace detail

/// Returns a copy of `c` with noise channels inserted.
///
/// Depolarizing: every single-qubit gate is followed by depolarizing(p1) on its
/// qubit and every two-qubit gate by a two-qubit depolarizing(p2). An
/// MCPHASE_OPEN with m >= 2 controls is followed by mcphase_cost(m) two-qubit
/// channels at the snapshot's mean p2, cycling over (control_k, target).
///
/// Thermodynamical: every unitary gate is followed by amplitude damping and
/// dephasing, computed from the gate duration, on each participating qubit;
/// the same pair computed from the readout duration precedes MEASURE.
inline Circuit attach_noise(const Circuit& c, const CalibrationSnapshot& cal, NoiseModel model,
                            const QubitIds& ids = {}, const NativeCostModel& cost = {}) {
  if (model == NoiseModel::None) return c;
  Circuit out(c.n_qubits());
  bool readout_decay_done = false;
  for (const auto& g : c.gates()) {
    if (g.kind == GateKind::NOISE) {
      out.add(g);
      continue;
    }
    if (g.kind == GateKind::MEASURE) {
      if (model == NoiseModel::Thermodynamical && !readout_decay_done) {
        for (int q : c.measured_qubits()) {
          detail::append_decay(out, cal.qubit(calibration_id(ids, q)), q, cal.readout_duration);
        }
        readout_decay_done = true;
      }
      out.add(g);
      continue;
    }
    out.add(g);
    if (model == NoiseModel::Depolarizing) {
      if (g.arity() == 1) {
        const auto& qc = cal.qubit(calibration_id(ids, g.qubits[0]));
        out.add(Gate::noise(depolarizing_channel(qc.p1, 1), g.qubits));
      } else if (g.kind == GateKind::MCPHASE_OPEN && g.arity() > 2) {
        for (int q : g.qubits) cal.qubit(calibration_id(ids, q));
        const int controls = g.arity() - 1;
        const int target = g.qubits.back();
        const double p2 = cal.mean_p2();
        for (int k = 0; k < cost.mcphase_cost(controls); ++k) {
          out.add(Gate::noise(depolarizing_channel(p2, 2), {g.qubits[k % controls], target}));
        }
      } else {
        const auto& cc =
            cal.coupler(calibration_id(ids, g.qubits[0]), calibration_id(ids, g.qubits[1]));
        out.add(Gate::noise(depolarizing_channel(cc.p2, 2), g.qubits));
      }
    } else {
      const double d = gate_duration(g, cal, ids, cost);
      for (int q : g.qubits) detail::append_decay(out, cal.qubit(calibration_id(ids, q)), q, d);
    }
  }
  return out;
}

/// Per-gate decay probabilities and their unweighted single/two-qubit mean.
struct DecayAverages {
  double p_ad_single = 0.0;
  double p_ad_two = 0.0;
  double p_phi_single = 0.0;
  double p_phi_two = 0.0;
  double p_ad_mean = 0.0;
  double p_phi_mean = 0.0;
};

inline DecayAverages decay_averages(double t1, double t2, double single_seconds,
                                    double two_seconds) {
  DecayAverages d;
  d.p_ad_single = p_from_time(single_seconds, t1);
  d.p_ad_two = p_from_time(two_seconds, t1);
  d.p_phi_single = p_from_time(single_seconds, t2);
  d.p_phi_two = p_from_time(two_seconds, t2);
  d.p_ad_mean = 0.5 * (d.p_ad_single + d.p_ad_two);
  d.p_phi_mean = 0.5 * (d.p_phi_single + d.p_phi_two);
  return d;
}

/// Snapshot-averaged values: mean T1, T2, single-qubit and coupler durations.
inline DecayAverages decay_averages(const CalibrationSnapshot& cal) {
  const double two = cal.couplers.empty() ? kDefaultTwoQubitGateSeconds : cal.mean_coupler_duration();
  return decay_averages(cal.mean_t1(), cal.mean_t2(), cal.mean_single_duration(), two);
}

}  // namespace pbrsim
