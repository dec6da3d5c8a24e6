#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pbrsim/bounds.hpp"
#include "pbrsim/calibration.hpp"
#include "pbrsim/circuit.hpp"
#include "pbrsim/noise.hpp"
#include "pbrsim/protocol.hpp"
#include "pbrsim/routing.hpp"
#include "pbrsim/simulate.hpp"
#include "pbrsim/stats.hpp"

namespace pbrsim {

struct ExperimentConfig {
  int n = 2;
  // Explicit angle; when unset, theta = theta_multiplier * theta_min(n).
  std::optional<double> theta;
  double theta_multiplier = 1.0;
  NoiseModel model = NoiseModel::Depolarizing;
  CalibrationSnapshot calibration;
  // Calibration ids of the logical qubits; defaults to the first n listed.
  QubitIds qubits;
  std::optional<CouplingMap> coupling_map;
  std::optional<std::pair<int, int>> placement;
  std::int64_t shots = 100000;
  std::uint64_t seed = 1;
  int cap = tol::kMaxSimQubits;
  double confidence = 0.95;
  bool apply_readout = true;
  // Skip simulation and report analytic predictions only.
  bool analytic = false;
  NativeCostModel cost;

  double resolved_theta() const { return theta ? *theta : theta_multiplier * theta_min(n); }

  void validate() const {
    if (n < 2) throw ValidationError("n must be >= 2");
    if (shots < 1) throw ValidationError("shots must be >= 1");
    if (cap < n) throw ValidationError("simulation cap must be >= n");
    if (cap > tol::kMaxSimQubits) {
      throw ValidationError("simulation cap cannot exceed " + std::to_string(tol::kMaxSimQubits));
    }
    if (!(confidence > 0.0 && confidence < 1.0)) throw ValidationError("confidence must lie in (0, 1)");
    if (placement && !coupling_map) throw ValidationError("a placement needs a coupling map");
    if (placement && n != 2) throw ValidationError("routing is only supported for n = 2");
    if (!qubits.empty() && static_cast<int>(qubits.size()) != n) {
      throw ValidationError("qubit list must name exactly n qubits");
    }
    calibration.validate();
  }
};

struct InputResult {
  std::uint32_t input = 0;
  std::uint32_t forbidden_outcome = 0;
  double exact_probability = 0.0;
  std::vector<std::int64_t> counts;
  std::int64_t forbidden_count = 0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool pass = false;
};

struct RoutingInfo {
  int span = 0;
  int swap_count = 0;
  GateCounts extra;
  std::vector<int> path;          // empty in analytic-only reports
  std::vector<int> final_layout;  // physical ids read as logical bits 0, 1
};

struct AggregateVerdict {
  int n_inputs = 0;
  int n_pass = 0;
  double pass_fraction = 0.0;
  bool passed = false;
};

struct ExperimentReport {
  PBRParams params;
  NoiseModel model = NoiseModel::None;
  std::int64_t shots = 0;
  std::uint64_t seed = 0;
  double confidence = 0.95;
  bool readout_applied = true;
  int cap = tol::kMaxSimQubits;
  std::vector<int> logical_qubits;  // calibration ids of the logical qubits

  ForbiddenMap forbidden_map;
  std::vector<InputResult> inputs;
  ToleranceReport tolerance;
  GateCounts gate_counts;
  // Whole-circuit depolarizing synthesis error from gate_counts.
  double eps_dep_circuit = 0.0;
  std::optional<RoutingInfo> routing;

  bool analytic_only = false;
  // Analytic forbidden-probability prediction (analytic-only reports).
  double predicted_forbidden = 0.0;

  AggregateVerdict verdict;
};

/// Per-input verdicts (strict CI-upper-bound < tolerance) and their aggregate.
/// The experiment passes iff every input passes.
inline AggregateVerdict evaluate_pass(const ExperimentReport& r) {
  AggregateVerdict v;
  if (r.analytic_only) {
    v.passed = r.predicted_forbidden < r.tolerance.eps_tol_noisy;
    v.pass_fraction = v.passed ? 1.0 : 0.0;
    return v;
  }
  v.n_inputs = static_cast<int>(r.inputs.size());
  for (const auto& in : r.inputs)
    if (in.ci_high < r.tolerance.eps_tol_noisy) ++v.n_pass;
  v.pass_fraction = v.n_inputs > 0 ? static_cast<double>(v.n_pass) / v.n_inputs : 0.0;
  v.passed = v.n_inputs > 0 && v.n_pass == v.n_inputs;
  return v;
}

namespace detail {

// Snapshot of n identical qubits carrying the snapshot means, chained by
// couplers at the mean coupler values. Used where physical qubits are unknown.
inline CalibrationSnapshot mean_snapshot(const CalibrationSnapshot& cal, int n) {
  CalibrationSnapshot m;
  double p01 = 0.0, p10 = 0.0;
  for (const auto& q : cal.qubits) {
    p01 += q.readout_p01;
    p10 += q.readout_p10;
  }
  for (int i = 0; i < n; ++i) {
    QubitCalibration q;
    q.id = i;
    q.t1 = cal.mean_t1();
    q.t2 = cal.mean_t2();
    q.p1 = cal.mean_p1();
    q.single_gate_duration = cal.mean_single_duration();
    q.readout_p01 = p01 / cal.qubits.size();
    q.readout_p10 = p10 / cal.qubits.size();
    m.qubits.push_back(q);
  }
  const double p2 = cal.couplers.empty() ? 0.0 : cal.mean_p2();
  const double d2 = cal.couplers.empty() ? kDefaultTwoQubitGateSeconds : cal.mean_coupler_duration();
  for (int i = 0; i + 1 < n; ++i) m.couplers.push_back({i, i + 1, p2, d2});
  m.readout_duration = cal.readout_duration;
  return m;
}

inline double mean_coupler_p2(const Circuit& c, const CalibrationSnapshot& cal, const QubitIds& ids) {
  double sum = 0.0;
  int count = 0;
  for (const auto& g : c.gates()) {
    if (!is_unitary_kind(g.kind) || g.arity() != 2) continue;
    sum += cal.coupler(calibration_id(ids, g.qubits[0]), calibration_id(ids, g.qubits[1])).p2;
    ++count;
  }
  if (count == 0) return cal.couplers.empty() ? 0.0 : cal.mean_p2();
  return sum / count;
}

inline double mean_p1(const Circuit& c, const CalibrationSnapshot& cal, const QubitIds& ids) {
  double sum = 0.0;
  int count = 0;
  for (const auto& g : c.gates()) {
    if (!is_unitary_kind(g.kind) || g.arity() != 1) continue;
    sum += cal.qubit(calibration_id(ids, g.qubits[0])).p1;
    ++count;
  }
  return count == 0 ? 0.0 : sum / count;
}

inline QubitIds default_logical_ids(const ExperimentConfig& cfg) {
  if (!cfg.qubits.empty()) return cfg.qubits;
  if (static_cast<int>(cfg.calibration.qubits.size()) < cfg.n) {
    throw CalibrationError("calibration covers " + std::to_string(cfg.calibration.qubits.size()) +
                           " qubits but the experiment needs " + std::to_string(cfg.n));
  }
  QubitIds ids;
  for (int j = 0; j < cfg.n; ++j) ids.push_back(cfg.calibration.qubits[j].id);
  return ids;
}

inline ExperimentReport report_skeleton(const ExperimentConfig& cfg, const PBRParams& params) {
  ExperimentReport r;
  r.params = params;
  r.model = cfg.model;
  r.shots = cfg.shots;
  r.seed = cfg.seed;
  r.confidence = cfg.confidence;
  r.readout_applied = cfg.apply_readout;
  r.cap = cfg.cap;
  return r;
}

}  // namespace detail

/// Analytic-only report for a 2-logical-qubit test routed over `span` edges
/// (span 1 = adjacent), using snapshot-mean calibration values.
inline ExperimentReport analytic_report(const ExperimentConfig& cfg, int span) {
  cfg.validate();
  const PBRParams params = PBRParams::solve(cfg.n, cfg.resolved_theta());
  ExperimentReport r = detail::report_skeleton(cfg, params);
  r.analytic_only = true;
  r.forbidden_map = discover_forbidden_map(params);
  const CalibrationSnapshot mean_cal = detail::mean_snapshot(cfg.calibration, cfg.n);
  const Circuit base = build_pbr_circuit(params, 0);
  r.tolerance = tolerance_report(params, mean_cal, base, cfg.model, {}, cfg.cost);
  r.gate_counts = gate_counts(base, cfg.cost);
  if (cfg.n == 2) {
    RoutingInfo info;
    info.span = span;
    info.swap_count = span - 1;
    info.extra = routed_gate_overhead(span);
    r.gate_counts.g1 += info.extra.g1;
    r.gate_counts.g2 += info.extra.g2;
    r.routing = info;
  }
  const double p2 = mean_cal.couplers.empty() ? 0.0 : mean_cal.mean_p2();
  r.eps_dep_circuit = epsilon_dep(mean_cal.mean_p1(), p2, r.gate_counts.g1, r.gate_counts.g2);
  const double mean_gate = 0.5 * (mean_cal.mean_single_duration() +
                                  (mean_cal.couplers.empty() ? kDefaultTwoQubitGateSeconds
                                                             : mean_cal.mean_coupler_duration()));
  r.tolerance.eps_dec_cumulative =
      epsilon_dec_cumulative(cfg.n, r.gate_counts.g1 + r.gate_counts.g2, mean_gate, mean_cal.mean_t1());
  switch (cfg.model) {
    case NoiseModel::None: r.predicted_forbidden = 0.0; break;
    case NoiseModel::Depolarizing: r.predicted_forbidden = r.eps_dep_circuit; break;
    case NoiseModel::Thermodynamical: r.predicted_forbidden = r.tolerance.eps_dec_cumulative; break;
  }
  r.verdict = evaluate_pass(r);
  return r;
}

/// Builds, routes, adds noise to, and simulates the protocol circuit for every
/// input, then samples shots and applies the tolerance test. Deterministic
/// for a given seed: input x draws from stream (seed, x).
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::optional<std::vector<int>> path;
  if (cfg.placement) {
    path = cfg.coupling_map->shortest_path(cfg.placement->first, cfg.placement->second);
  }
  const int sim_qubits = path ? static_cast<int>(path->size()) : cfg.n;
  if (cfg.analytic) return analytic_report(cfg, path ? static_cast<int>(path->size()) - 1 : 1);
  if (sim_qubits > cfg.cap) {
    throw CapError("configuration needs " + std::to_string(sim_qubits) +
                   " simulated qubits, above the cap of " + std::to_string(cfg.cap) +
                   "; rerun in analytic mode");
  }

  const PBRParams params = PBRParams::solve(cfg.n, cfg.resolved_theta());
  ExperimentReport r = detail::report_skeleton(cfg, params);
  r.forbidden_map = discover_forbidden_map(params);

  const QubitIds logical_ids =
      path ? QubitIds{path->front(), path->back()} : detail::default_logical_ids(cfg);
  r.logical_qubits = logical_ids;

  const std::uint32_t dim = std::uint32_t{1} << cfg.n;
  for (std::uint32_t x = 0; x < dim; ++x) {
    Circuit physical = build_pbr_circuit(params, x);
    QubitIds ids = logical_ids;
    QubitIds measured_ids = logical_ids;
    if (path) {
      RoutedCircuit rc = route_linear(physical, *cfg.coupling_map, *cfg.placement);
      if (x == 0) {
        RoutingInfo info;
        info.span = rc.span;
        info.swap_count = rc.swap_count;
        info.extra = routed_gate_overhead(rc.span);
        info.path = rc.physical_qubits;
        info.final_layout = rc.final_physical_layout();
        r.routing = info;
      }
      ids = rc.physical_qubits;
      measured_ids = rc.final_physical_layout();
      physical = std::move(rc.circuit);
    }
    if (x == 0) {
      r.tolerance = tolerance_report(params, cfg.calibration, physical, cfg.model, logical_ids, cfg.cost, ids);
      r.gate_counts = gate_counts(physical, cfg.cost);
      r.eps_dep_circuit = epsilon_dep(detail::mean_p1(physical, cfg.calibration, ids),
                                      detail::mean_coupler_p2(physical, cfg.calibration, ids),
                                      r.gate_counts.g1, r.gate_counts.g2);
    }
    const Circuit noisy = attach_noise(physical, cfg.calibration, cfg.model, ids, cfg.cost);
    std::vector<double> probs = outcome_distribution(noisy);
    if (cfg.apply_readout) {
      std::vector<ReadoutMatrix> mats;
      for (int id : measured_ids) mats.push_back(readout_matrix(cfg.calibration.qubit(id)));
      probs = apply_readout(probs, mats);
    }

    InputResult in;
    in.input = x;
    in.forbidden_outcome = r.forbidden_map[x];
    in.exact_probability = probs[in.forbidden_outcome];
    auto rng = stream_engine(cfg.seed, x);
    in.counts = sample_counts(probs, cfg.shots, rng);
    in.forbidden_count = in.counts[in.forbidden_outcome];
    in.estimate = static_cast<double>(in.forbidden_count) / static_cast<double>(cfg.shots);
    std::tie(in.ci_low, in.ci_high) = wilson_interval(in.forbidden_count, cfg.shots, cfg.confidence);
    in.pass = in.ci_high < r.tolerance.eps_tol_noisy;
    r.inputs.push_back(std::move(in));
  }
  r.verdict = evaluate_pass(r);
  return r;
}

/// One report per span for a pair anchored at the placement's first qubit
/// (qubit 0 of a chain when no map is configured). Spans whose path would
/// exceed the simulation cap get analytic-only reports.
inline std::vector<ExperimentReport> sweep_distance(const ExperimentConfig& cfg, const std::vector<int>& spans) {
  if (cfg.n != 2) throw ValidationError("distance sweeps use n = 2");
  for (int s : spans)
    if (s < 1) throw RangeError("spans must be >= 1");
  int max_routable = 0;
  for (int s : spans)
    if (s + 1 <= cfg.cap) max_routable = std::max(max_routable, s);
  const CouplingMap map = cfg.coupling_map ? *cfg.coupling_map : chain_map(max_routable + 1);
  const int anchor = cfg.placement ? cfg.placement->first : 0;

  std::vector<ExperimentReport> out;
  for (int s : spans) {
    if (s + 1 > cfg.cap) {
      out.push_back(analytic_report(cfg, s));
      continue;
    }
    const auto dist = map.distances_from(anchor);
    const auto it = std::find(dist.begin(), dist.end(), s);
    if (it == dist.end()) {
      throw PathError("no qubit at span " + std::to_string(s) + " from qubit " + std::to_string(anchor));
    }
    ExperimentConfig c = cfg;
    c.coupling_map = map;
    c.placement = std::make_pair(anchor, static_cast<int>(it - dist.begin()));
    out.push_back(run_experiment(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json tolerance_to_json(const ToleranceReport& t) {
  return {{"model", model_name(t.model)},
          {"d_quantum", t.d_quantum},
          {"d_noisy", t.d_noisy},
          {"eps_tol_ideal", t.eps_tol_ideal},
          {"eps_tol_noisy", t.eps_tol_noisy},
          {"depolarizing",
           {{"eps_dep", t.eps_dep},
            {"d_noisy", t.d_noisy_dep},
            {"eps_tol_noisy", t.eps_tol_noisy_dep},
            {"eps_tol_spread", t.eps_tol_dep_spread}}},
          {"thermodynamical",
           {{"eps_prep", t.eps_thermo},
            {"d_noisy", t.d_noisy_thermo},
            {"eps_tol_noisy", t.eps_tol_noisy_thermo},
            {"eps_tol_spread", t.eps_tol_thermo_spread}}},
          {"eps_dec", t.eps_dec},
          {"eps_dec_cumulative", t.eps_dec_cumulative},
          {"note", "noisy tolerances use preparation noise only; measurement-circuit noise enters the simulation"}};
}

inline nlohmann::json report_to_json(const ExperimentReport& r) {
  using nlohmann::json;
  const int n = r.params.n;
  json doc;
  doc["header"] = {{"bit_order", "qubit 0 is the most significant bit of every bitstring"},
                   {"distance_convention", "span = shortest-path edge count between the placed qubits"},
                   {"pass_rule", "input passes iff the Wilson upper bound is strictly below eps_tol_noisy"}};
  doc["params"] = {{"n", n}, {"theta", r.params.theta}, {"alpha", r.params.alpha}, {"beta", r.params.beta}};
  doc["config"] = {{"model", model_name(r.model)},
                   {"shots", r.shots},
                   {"seed", r.seed},
                   {"confidence", r.confidence},
                   {"readout_applied", r.readout_applied},
                   {"cap", r.cap},
                   {"logical_qubits", r.logical_qubits}};
  json fmap = json::object();
  for (std::uint32_t x = 0; x < r.forbidden_map.size(); ++x) {
    fmap[bitstring(x, n)] = bitstring(r.forbidden_map[x], n);
  }
  doc["forbidden_map"] = fmap;
  doc["tolerance"] = tolerance_to_json(r.tolerance);
  doc["gate_counts"] = {{"g1", r.gate_counts.g1}, {"g2", r.gate_counts.g2}};
  doc["eps_dep_circuit"] = r.eps_dep_circuit;
  if (r.routing) {
    doc["routing"] = {{"span", r.routing->span},
                      {"swap_count", r.routing->swap_count},
                      {"extra_g1", r.routing->extra.g1},
                      {"extra_g2", r.routing->extra.g2},
                      {"path", r.routing->path},
                      {"final_layout", r.routing->final_layout}};
  } else {
    doc["routing"] = nullptr;
  }
  doc["analytic_only"] = r.analytic_only;
  if (r.analytic_only) doc["predicted_forbidden"] = r.predicted_forbidden;
  json inputs = json::array();
  for (const auto& in : r.inputs) {
    inputs.push_back({{"input", bitstring(in.input, n)},
                      {"forbidden_outcome", bitstring(in.forbidden_outcome, n)},
                      {"exact_probability", in.exact_probability},
                      {"forbidden_count", in.forbidden_count},
                      {"counts", in.counts},
                      {"estimate", in.estimate},
                      {"ci_low", in.ci_low},
                      {"ci_high", in.ci_high},
                      {"pass", in.pass}});
  }
  doc["inputs"] = inputs;
  doc["verdict"] = {{"n_inputs", r.verdict.n_inputs},
                    {"n_pass", r.verdict.n_pass},
                    {"pass_fraction", r.verdict.pass_fraction},
                    {"passed", r.verdict.passed}};
  return doc;
}

inline std::string csv_header() {
  return "span,input,forbidden_outcome,exact_probability,forbidden_count,shots,estimate,ci_low,ci_high,"
         "eps_tol_ideal,eps_tol_noisy_dep,eps_tol_noisy_thermo,eps_tol_noisy,verdict\n";
}

/// One row per input; a single "analytic" row for analytic-only reports.
inline std::string report_to_csv_rows(const ExperimentReport& r) {
  auto num = [](double v) { return format_double(v); };
  const int n = r.params.n;
  const std::string span = r.routing ? std::to_string(r.routing->span) : "";
  const auto& t = r.tolerance;
  const std::string tol_cols =
      num(t.eps_tol_ideal) + "," + num(t.eps_tol_noisy_dep) + "," + num(t.eps_tol_noisy_thermo) + "," + num(t.eps_tol_noisy);
  std::ostringstream out;
  if (r.analytic_only) {
    out << span << ",analytic,," << num(r.predicted_forbidden) << ",," << r.shots << ",,,," << tol_cols << ','
        << (r.verdict.passed ? "pass" : "fail") << '\n';
    return out.str();
  }
  for (const auto& in : r.inputs) {
    out << span << ',' << bitstring(in.input, n) << ',' << bitstring(in.forbidden_outcome, n) << ','
        << num(in.exact_probability) << ',' << in.forbidden_count << ',' << r.shots << ',' << num(in.estimate) << ','
        << num(in.ci_low) << ',' << num(in.ci_high) << ',' << tol_cols << ',' << (in.pass ? "pass" : "fail") << '\n';
  }
  return out.str();
}

inline std::string report_to_csv(const ExperimentReport& r) { return csv_header() + report_to_csv_rows(r); }

/// Mean exact forbidden-outcome probability over inputs.
inline double mean_forbidden_probability(const ExperimentReport& r) {
  if (r.inputs.empty()) return r.predicted_forbidden;
  double s = 0.0;
  for (const auto& in : r.inputs) s += in.exact_probability;
  return s / static_cast<double>(r.inputs.size());
}

}  // namespace pbrsim
