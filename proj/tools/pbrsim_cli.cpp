// Command-line front end for the PBR test simulator.
//
// Exit codes: 0 = experiment passed, 1 = experiment failed, 2 = error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pbrsim/pbrsim.hpp"

namespace {

using nlohmann::json;
using namespace pbrsim;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

// Accepts a plain number, "pi", "pi/K" or "K*pi".
double parse_angle(const std::string& text) {
  const auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ValidationError("cannot parse angle '" + text + "'");
    }
    if (used != s.size()) throw ValidationError("cannot parse angle '" + text + "'");
    return v;
  };
  if (text == "pi") return std::numbers::pi;
  if (text.rfind("pi/", 0) == 0) return std::numbers::pi / number(text.substr(3));
  if (text.size() > 3 && text.ends_with("*pi")) return number(text.substr(0, text.size() - 3)) * std::numbers::pi;
  return number(text);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    try {
      if (dots != std::string::npos) {
        const int lo = std::stoi(item.substr(0, dots));
        const int hi = std::stoi(item.substr(dots + 2));
        if (hi < lo) throw ValidationError("empty range '" + item + "'");
        for (int v = lo; v <= hi; ++v) out.push_back(v);
      } else {
        out.push_back(std::stoi(item));
      }
    } catch (const std::logic_error&) {
      throw ValidationError("cannot parse integer list '" + text + "'");
    }
  }
  if (out.empty()) throw ValidationError("empty integer list");
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
}

void emit_json(const json& doc, const std::string& out_path) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text(out_path, text);
  }
}

struct Options {
  int n = 2;
  std::string theta;
  double theta_mult = 1.0;
  std::string calib;
  std::string model = "dep";
  std::string qubits;
  std::int64_t shots = 100000;
  std::uint64_t seed = 1;
  std::string map;
  std::string place;
  int cap = tol::kMaxSimQubits;
  double confidence = 0.95;
  bool no_readout = false;
  bool analytic = false;
  std::string out;
  std::string csv;
  std::string spans = "1..8";
};

void add_angle_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--n", o.n, "Number of qubits")->capture_default_str();
  cmd->add_option("--theta", o.theta, "Preparation angle: number, pi/K or K*pi (default: multiple of theta_min)");
  cmd->add_option("--theta-mult", o.theta_mult, "Multiplier of theta_min(n) when --theta is absent")
      ->capture_default_str();
}

void add_noise_options(CLI::App* cmd, Options& o, bool calib_required) {
  auto* c = cmd->add_option("--calib", o.calib, "Calibration snapshot (JSON)")->check(CLI::ExistingFile);
  if (calib_required) c->required();
  cmd->add_option("--model", o.model, "Noise model")
      ->check(CLI::IsMember({"none", "dep", "thermo"}))
      ->capture_default_str();
  cmd->add_option("--qubits", o.qubits, "Calibration ids of the logical qubits, comma separated");
}

void add_run_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--shots", o.shots, "Shots per input")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  cmd->add_option("--map", o.map, "Coupling map (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--cap", o.cap, "Maximum number of simulated qubits")->capture_default_str();
  cmd->add_option("--confidence", o.confidence, "Confidence level of the Wilson interval")->capture_default_str();
  cmd->add_flag("--no-readout", o.no_readout, "Skip readout-error matrices");
  cmd->add_flag("--analytic", o.analytic, "Report analytic predictions without simulating");
  cmd->add_option("--out", o.out, "Write the report document here instead of stdout");
  cmd->add_option("--csv", o.csv, "Also write a CSV table (one row per input)");
}

ExperimentConfig make_config(const Options& o) {
  ExperimentConfig cfg;
  cfg.n = o.n;
  if (!o.theta.empty()) cfg.theta = parse_angle(o.theta);
  cfg.theta_multiplier = o.theta_mult;
  cfg.model = model_from_name(o.model);
  cfg.calibration = load_calibration(o.calib);
  if (!o.qubits.empty()) cfg.qubits = parse_int_list(o.qubits);
  cfg.shots = o.shots;
  cfg.seed = o.seed;
  if (!o.map.empty()) cfg.coupling_map = load_coupling_map(o.map);
  if (!o.place.empty()) {
    const auto ids = parse_int_list(o.place);
    if (ids.size() != 2) throw ValidationError("--place needs exactly two qubit ids");
    cfg.placement = std::make_pair(ids[0], ids[1]);
  }
  cfg.cap = o.cap;
  cfg.confidence = o.confidence;
  cfg.apply_readout = !o.no_readout;
  cfg.analytic = o.analytic;
  return cfg;
}

double resolve_theta(const Options& o) { return o.theta.empty() ? o.theta_mult * theta_min(o.n) : parse_angle(o.theta); }

int cmd_solve_angles(const Options& o) {
  const double theta = resolve_theta(o);
  const auto p = PBRParams::solve(o.n, theta);
  const auto found = discover_forbidden_map_detailed(p);
  json fmap = json::object();
  for (std::uint32_t x = 0; x < found.map.size(); ++x) fmap[bitstring(x, o.n)] = bitstring(found.map[x], o.n);
  json doc = {{"n", p.n},
              {"theta", p.theta},
              {"theta_min", theta_min(p.n)},
              {"alpha", p.alpha},
              {"beta", p.beta},
              {"residual", p.residual()},
              {"forbidden_map", fmap},
              {"forbidden_probability", found.forbidden_probability}};
  emit_json(doc, o.out);
  return kExitPass;
}

int cmd_tolerance(const Options& o) {
  ExperimentConfig cfg = make_config(o);
  cfg.validate();
  const auto p = PBRParams::solve(cfg.n, cfg.resolved_theta());
  const QubitIds ids = detail::default_logical_ids(cfg);
  const Circuit c = build_pbr_circuit(p, 0);
  const auto t = tolerance_report(p, cfg.calibration, c, cfg.model, ids, cfg.cost);
  const auto counts = gate_counts(c, cfg.cost);
  json doc = {{"n", p.n},
              {"theta", p.theta},
              {"logical_qubits", ids},
              {"gate_counts", {{"g1", counts.g1}, {"g2", counts.g2}}},
              {"tolerance", tolerance_to_json(t)}};
  emit_json(doc, o.out);
  return kExitPass;
}

int cmd_run(const Options& o) {
  const auto report = run_experiment(make_config(o));
  emit_json(report_to_json(report), o.out);
  if (!o.csv.empty()) write_text(o.csv, report_to_csv(report));
  return report.verdict.passed ? kExitPass : kExitFail;
}

int cmd_sweep(const Options& o) {
  const auto reports = sweep_distance(make_config(o), parse_int_list(o.spans));
  json doc = json::array();
  std::string csv = csv_header();
  bool all_pass = true;
  for (const auto& r : reports) {
    json entry = report_to_json(r);
    entry["mean_forbidden_probability"] = mean_forbidden_probability(r);
    doc.push_back(std::move(entry));
    csv += report_to_csv_rows(r);
    all_pass = all_pass && r.verdict.passed;
  }
  emit_json(doc, o.out);
  if (!o.csv.empty()) write_text(o.csv, csv);
  return all_pass ? kExitPass : kExitFail;
}

struct MapOptions {
  std::string kind = "heavy-hex";
  int size = 10;
  int rows = 8;
  int row_length = 16;
  std::string out;
};

int cmd_gen_map(const MapOptions& m) {
  const CouplingMap map = m.kind == "chain" ? chain_map(m.size) : heavy_hex_like(m.rows, m.row_length);
  emit_json(coupling_map_to_json(map), m.out);
  return kExitPass;
}

struct CalibOptions {
  int size = 10;
  double t1_us = 192.0;
  double t2_us = 95.0;
  double p1 = 2.5e-4;
  double p2 = 2.4e-3;
  double readout_error = 0.01;
  double readout_us = kDefaultReadoutSeconds * 1e6;
  std::string map;
  std::string out;
};

// Uniform snapshot over a chain, or over every qubit and edge of a map.
int cmd_gen_calib(const CalibOptions& g) {
  const CouplingMap map = g.map.empty() ? chain_map(g.size) : load_coupling_map(g.map);
  CalibrationSnapshot cal;
  for (int q = 0; q < map.n_vertices(); ++q) {
    QubitCalibration qc;
    qc.id = q;
    qc.t1 = g.t1_us * 1e-6;
    qc.t2 = g.t2_us * 1e-6;
    qc.p1 = g.p1;
    qc.readout_p01 = g.readout_error;
    qc.readout_p10 = g.readout_error;
    cal.qubits.push_back(qc);
  }
  for (auto [a, b] : map.edges()) cal.couplers.push_back({a, b, g.p2, kDefaultTwoQubitGateSeconds});
  cal.readout_duration = g.readout_us * 1e-6;
  cal.validate();
  emit_json(calibration_to_json(cal), g.out);
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy-simulation harness for the preparation-independence no-go test"};
  app.require_subcommand(1);

  Options o;
  auto* solve = app.add_subcommand("solve-angles", "Solve alpha, beta and list the forbidden outcomes");
  add_angle_options(solve, o);
  solve->add_option("--out", o.out, "Write output here instead of stdout");

  auto* tolerance = app.add_subcommand("tolerance", "Ideal and noise-aware epistemic tolerances");
  add_angle_options(tolerance, o);
  add_noise_options(tolerance, o, true);
  tolerance->add_option("--out", o.out, "Write output here instead of stdout");

  auto* run = app.add_subcommand("run", "Simulate every input and test the tolerance");
  add_angle_options(run, o);
  add_noise_options(run, o, true);
  add_run_options(run, o);
  run->add_option("--place", o.place, "Physical qubits A,B for the two logical qubits (needs --map)");

  auto* sweep = app.add_subcommand("sweep-distance", "Run n = 2 tests over increasing qubit separation");
  add_angle_options(sweep, o);
  add_noise_options(sweep, o, true);
  add_run_options(sweep, o);
  sweep->add_option("--spans", o.spans, "Spans as a list or range, e.g. 1..8 or 1,2,154")->capture_default_str();
  sweep->add_option("--place", o.place, "Anchor qubit A,B; only A is used");

  MapOptions m;
  auto* gen_map = app.add_subcommand("gen-map", "Write a coupling map");
  gen_map->add_option("--kind", m.kind, "Lattice kind")
      ->check(CLI::IsMember({"heavy-hex", "chain"}))
      ->capture_default_str();
  gen_map->add_option("--size", m.size, "Chain length")->capture_default_str();
  gen_map->add_option("--rows", m.rows, "Heavy-hex rows")->capture_default_str();
  gen_map->add_option("--row-length", m.row_length, "Heavy-hex row length")->capture_default_str();
  gen_map->add_option("--out", m.out, "Write output here instead of stdout");

  CalibOptions g;
  auto* gen_calib = app.add_subcommand("gen-calib", "Write a uniform calibration snapshot");
  gen_calib->add_option("--size", g.size, "Chain length when no map is given")->capture_default_str();
  gen_calib->add_option("--map", g.map, "Cover every qubit and edge of this coupling map")->check(CLI::ExistingFile);
  gen_calib->add_option("--t1-us", g.t1_us, "T1 in microseconds")->capture_default_str();
  gen_calib->add_option("--t2-us", g.t2_us, "T2 in microseconds")->capture_default_str();
  gen_calib->add_option("--p1", g.p1, "Single-qubit depolarizing error")->capture_default_str();
  gen_calib->add_option("--p2", g.p2, "Two-qubit depolarizing error")->capture_default_str();
  gen_calib->add_option("--readout-error", g.readout_error, "Readout flip probability")->capture_default_str();
  gen_calib->add_option("--readout-us", g.readout_us, "Readout duration in microseconds")->capture_default_str();
  gen_calib->add_option("--out", g.out, "Write output here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitError;
  }

  try {
    if (*solve) return cmd_solve_angles(o);
    if (*tolerance) return cmd_tolerance(o);
    if (*run) return cmd_run(o);
    if (*sweep) return cmd_sweep(o);
    if (*gen_map) return cmd_gen_map(m);
    if (*gen_calib) return cmd_gen_calib(g);
  } catch (const pbrsim::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
