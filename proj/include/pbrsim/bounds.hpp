#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "pbrsim/calibration.hpp"
#include "pbrsim/circuit.hpp"
#include "pbrsim/errors.hpp"
#include "pbrsim/noise.hpp"
#include "pbrsim/protocol.hpp"

namespace pbrsim {

namespace detail {

inline void require_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw RangeError(std::string(what) + " must lie in [0, 1]");
}

inline void require_theta(double theta) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2.0 + 1e-15)) {
    throw RangeError("theta must lie in [0, pi/2]");
  }
}

}  // namespace detail

/// Trace distance of RY(+theta)|0> and RY(-theta)|0>: sqrt(1 - cos^2 theta).
inline double quantum_trace_distance(double theta) {
  detail::require_theta(theta);
  return std::sin(theta);
}

/// Largest forbidden-outcome probability a maximally psi-epistemic model with
/// trace distance d can produce over n systems: (1 - d)^n / 2^n.
inline double epsilon_tol(double d, int n) {
  detail::require_unit(d, "trace distance");
  if (n < 1) throw RangeError("epsilon_tol needs n >= 1");
  return std::pow((1.0 - d) / 2.0, n);
}

/// 1 - (1 - p1)^g1 (1 - p2)^g2.
inline double epsilon_dep(double p1, double p2, int g1, int g2) {
  detail::require_unit(p1, "p1");
  detail::require_unit(p2, "p2");
  if (g1 < 0 || g2 < 0) throw RangeError("gate counts must be non-negative");
  return 1.0 - std::pow(1.0 - p1, g1) * std::pow(1.0 - p2, g2);
}

/// Trace distance after mixing both preparations with I/2 at rate eps.
inline double noisy_overlap(double theta, double eps) {
  detail::require_unit(eps, "error probability");
  return (1.0 - eps) * quantum_trace_distance(theta);
}

/// Linearized decoherence error n (p_ad + p_phi), capped at 1.
inline double epsilon_dec(int n, double p_ad, double p_phi) {
  if (n < 0) throw RangeError("qubit count must be non-negative");
  detail::require_unit(p_ad, "p_ad");
  detail::require_unit(p_phi, "p_phi");
  return std::min(1.0, n * (p_ad + p_phi));
}

/// Cumulative form n (1 - exp(-N t_g / T1)), capped at 1.
inline double epsilon_dec_cumulative(int n, int total_gates, double gate_seconds, double t1) {
  if (n < 0 || total_gates < 0) throw RangeError("counts must be non-negative");
  return std::min(1.0, n * p_from_time(total_gates * gate_seconds, t1));
}

struct ToleranceReport {
  double d_quantum = 0.0;
  double eps_tol_ideal = 0.0;

  // Depolarizing: one RY per qubit, so eps = p1 (mean over the used qubits).
  double eps_dep = 0.0;
  double d_noisy_dep = 0.0;
  double eps_tol_noisy_dep = 0.0;
  double eps_tol_dep_spread = 0.0;

  // Thermodynamical: p_ad + p_phi over the preparation gate and readout.
  double eps_thermo = 0.0;
  double d_noisy_thermo = 0.0;
  double eps_tol_noisy_thermo = 0.0;
  double eps_tol_thermo_spread = 0.0;

  // Whole-circuit decoherence estimates.
  double eps_dec = 0.0;
  double eps_dec_cumulative = 0.0;

  // Values for the selected model (ideal values for NoiseModel::None).
  NoiseModel model = NoiseModel::None;
  double d_noisy = 0.0;
  double eps_tol_noisy = 0.0;
};

namespace detail {

inline double population_stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace detail

/// Preparation-error probability of one qubit under the thermodynamical model.
inline double thermo_preparation_error(const QubitCalibration& q, double readout_seconds) {
  const double t = q.single_gate_duration + readout_seconds;
  return std::min(1.0, p_from_time(t, q.t1) + p_from_time(t, q.t2));
}

/// Noise-aware tolerances. Only preparation noise enters the bound; noise in
/// the measurement circuit is left to simulation. `ids` maps the n logical
/// qubits to calibration ids (identity when empty); `circuit_ids` does the
/// same for the circuit's register when it differs (routed circuits).
inline ToleranceReport tolerance_report(const PBRParams& params, const CalibrationSnapshot& cal,
                                        const Circuit& circuit, NoiseModel model,
                                        const QubitIds& ids = {}, const NativeCostModel& cost = {},
                                        const std::optional<QubitIds>& circuit_ids = std::nullopt) {
  const QubitIds& cids = circuit_ids ? *circuit_ids : ids;
  ToleranceReport r;
  r.model = model;
  r.d_quantum = quantum_trace_distance(params.theta);
  r.eps_tol_ideal = epsilon_tol(r.d_quantum, params.n);

  std::vector<double> dep_tol, thermo_tol;
  double dep_sum = 0.0, thermo_sum = 0.0;
  for (int j = 0; j < params.n; ++j) {
    const auto& q = cal.qubit(calibration_id(ids, j));
    const double e_dep = epsilon_dep(q.p1, 0.0, 1, 0);
    const double e_th = thermo_preparation_error(q, cal.readout_duration);
    dep_sum += e_dep;
    thermo_sum += e_th;
    dep_tol.push_back(epsilon_tol(noisy_overlap(params.theta, e_dep), params.n));
    thermo_tol.push_back(epsilon_tol(noisy_overlap(params.theta, e_th), params.n));
  }
  r.eps_dep = dep_sum / params.n;
  r.d_noisy_dep = noisy_overlap(params.theta, r.eps_dep);
  r.eps_tol_noisy_dep = epsilon_tol(r.d_noisy_dep, params.n);
  r.eps_tol_dep_spread = detail::population_stddev(dep_tol);

  r.eps_thermo = thermo_sum / params.n;
  r.d_noisy_thermo = noisy_overlap(params.theta, r.eps_thermo);
  r.eps_tol_noisy_thermo = epsilon_tol(r.d_noisy_thermo, params.n);
  r.eps_tol_thermo_spread = detail::population_stddev(thermo_tol);

  // Decoherence estimate from the circuit: unweighted mean of the single- and
  // two-qubit class averages of p_ad and p_phi.
  double ad[2] = {0, 0}, phi[2] = {0, 0};
  int cnt[2] = {0, 0};
  int total_gates = 0;
  double total_time = 0.0, t1_sum = 0.0;
  int t1_count = 0;
  for (const auto& g : circuit.gates()) {
    if (!is_unitary_kind(g.kind)) continue;
    const double d = gate_duration(g, cal, cids, cost);
    const int cls = g.arity() == 1 ? 0 : 1;
    for (int q : g.qubits) {
      const auto& qc = cal.qubit(calibration_id(cids, q));
      ad[cls] += p_from_time(d, qc.t1);
      phi[cls] += p_from_time(d, qc.t2);
      ++cnt[cls];
      t1_sum += qc.t1;
      ++t1_count;
    }
    ++total_gates;
    total_time += d;
  }
  double ad_mean = 0.0, phi_mean = 0.0;
  int classes = 0;
  for (int c = 0; c < 2; ++c) {
    if (cnt[c] == 0) continue;
    ad_mean += ad[c] / cnt[c];
    phi_mean += phi[c] / cnt[c];
    ++classes;
  }
  if (classes > 0) {
    ad_mean /= classes;
    phi_mean /= classes;
    r.eps_dec = epsilon_dec(params.n, ad_mean, phi_mean);
    r.eps_dec_cumulative = epsilon_dec_cumulative(params.n, total_gates, total_time / total_gates,
                                                  t1_sum / t1_count);
  }

  switch (model) {
    case NoiseModel::None:
      r.d_noisy = r.d_quantum;
      r.eps_tol_noisy = r.eps_tol_ideal;
      break;
    case NoiseModel::Depolarizing:
      r.d_noisy = r.d_noisy_dep;
      r.eps_tol_noisy = r.eps_tol_noisy_dep;
      break;
    case NoiseModel::Thermodynamical:
      r.d_noisy = r.d_noisy_thermo;
      r.eps_tol_noisy = r.eps_tol_noisy_thermo;
      break;
  }
  return r;
}

}  // namespace pbrsim
