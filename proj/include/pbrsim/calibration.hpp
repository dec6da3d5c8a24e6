#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pbrsim/errors.hpp"

namespace pbrsim {

inline constexpr double kDefaultSingleGateSeconds = 36e-9;
inline constexpr double kDefaultTwoQubitGateSeconds = 68e-9;
inline constexpr double kDefaultReadoutSeconds = 1e-6;

struct QubitCalibration {
  int id = 0;
  double t1 = 0.0;  // seconds
  double t2 = 0.0;  // seconds
  double p1 = 0.0;  // single-qubit gate error
  double single_gate_duration = kDefaultSingleGateSeconds;
  double readout_p01 = 0.0;  // P(0 | 1)
  double readout_p10 = 0.0;  // P(1 | 0)
};

struct CouplerCalibration {
  int q0 = 0;
  int q1 = 0;
  double p2 = 0.0;  // CZ error
  double duration = kDefaultTwoQubitGateSeconds;
};

/// Device calibration taken at one point in time.
class CalibrationSnapshot {
 public:
  std::vector<QubitCalibration> qubits;
  std::vector<CouplerCalibration> couplers;
  double readout_duration = kDefaultReadoutSeconds;

  /// Throws ValidationError naming the first offending field.
  void validate() const {
    if (qubits.empty()) throw ValidationError("qubits: calibration lists no qubits");
    std::set<int> ids;
    for (std::size_t i = 0; i < qubits.size(); ++i) {
      const auto& q = qubits[i];
      const std::string at = "qubits[" + std::to_string(i) + "].";
      if (!ids.insert(q.id).second) throw ValidationError(at + "id: duplicate id " + std::to_string(q.id));
      if (!(q.t1 > 0.0) || !std::isfinite(q.t1)) throw ValidationError(at + "t1_us must be > 0");
      if (!(q.t2 > 0.0) || !std::isfinite(q.t2)) throw ValidationError(at + "t2_us must be > 0");
      require_probability(q.p1, at + "p1");
      require_probability(q.readout_p01, at + "p01");
      require_probability(q.readout_p10, at + "p10");
      if (!(q.single_gate_duration >= 0.0)) throw ValidationError(at + "single_ns must be >= 0");
    }
    for (std::size_t i = 0; i < couplers.size(); ++i) {
      const auto& c = couplers[i];
      const std::string at = "couplers[" + std::to_string(i) + "].";
      if (c.q0 == c.q1) throw ValidationError(at + "q1: coupler endpoints must differ");
      if (!ids.contains(c.q0)) throw ValidationError(at + "q0: unknown qubit id " + std::to_string(c.q0));
      if (!ids.contains(c.q1)) throw ValidationError(at + "q1: unknown qubit id " + std::to_string(c.q1));
      require_probability(c.p2, at + "p2");
      if (!(c.duration >= 0.0)) throw ValidationError(at + "duration_ns must be >= 0");
    }
    if (!(readout_duration >= 0.0)) throw ValidationError("readout_us must be >= 0");
  }

  const QubitCalibration& qubit(int id) const {
    auto it = std::find_if(qubits.begin(), qubits.end(), [id](const auto& q) { return q.id == id; });
    if (it == qubits.end()) throw CalibrationError("no calibration for qubit " + std::to_string(id));
    return *it;
  }

  bool has_qubit(int id) const {
    return std::any_of(qubits.begin(), qubits.end(), [id](const auto& q) { return q.id == id; });
  }

  const CouplerCalibration& coupler(int a, int b) const {
    auto it = std::find_if(couplers.begin(), couplers.end(), [a, b](const auto& c) {
      return (c.q0 == a && c.q1 == b) || (c.q0 == b && c.q1 == a);
    });
    if (it == couplers.end()) {
      throw CalibrationError("no coupler calibration for pair (" + std::to_string(a) + ", " +
                             std::to_string(b) + ")");
    }
    return *it;
  }

  double mean_p1() const { return mean_of(qubits, [](const auto& q) { return q.p1; }); }
  double mean_t1() const { return mean_of(qubits, [](const auto& q) { return q.t1; }); }
  double mean_t2() const { return mean_of(qubits, [](const auto& q) { return q.t2; }); }
  double mean_single_duration() const {
    return mean_of(qubits, [](const auto& q) { return q.single_gate_duration; });
  }

  double mean_p2() const {
    require_couplers();
    return mean_of(couplers, [](const auto& c) { return c.p2; });
  }
  double mean_coupler_duration() const {
    require_couplers();
    return mean_of(couplers, [](const auto& c) { return c.duration; });
  }

 private:
  static void require_probability(double p, const std::string& field) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(field + " must lie in [0, 1]");
  }

  void require_couplers() const {
    if (couplers.empty()) throw CalibrationError("calibration lists no couplers");
  }

  template <typename Range, typename Fn>
  static double mean_of(const Range& r, Fn fn) {
    if (r.empty()) return 0.0;
    double s = 0.0;
    for (const auto& e : r) s += fn(e);
    return s / static_cast<double>(r.size());
  }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw FormatError(where + ": unknown key '" + key + "'");
    }
  }
}

inline double number_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw FormatError(where + ": missing key '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw FormatError(where + "." + key + ": expected a number");
  return v.get<double>();
}

inline int int_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw FormatError(where + ": missing key '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw FormatError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

inline double optional_number(const nlohmann::json& obj, const char* key, double fallback,
                              const std::string& where) {
  return obj.contains(key) ? number_field(obj, key, where) : fallback;
}

}  // namespace detail

/// Parses a calibration document. Units follow the key names (us, ns).
inline CalibrationSnapshot parse_calibration(const nlohmann::json& doc) {
  using detail::int_field;
  using detail::number_field;
  using detail::optional_number;
  if (!doc.is_object()) throw FormatError("calibration: top level must be an object");
  detail::reject_unknown_keys(doc, {"qubits", "couplers", "readout_us"}, "calibration");
  if (!doc.contains("qubits") || !doc["qubits"].is_array()) {
    throw FormatError("calibration: 'qubits' must be a list");
  }
  CalibrationSnapshot snap;
  for (std::size_t i = 0; i < doc["qubits"].size(); ++i) {
    const auto& q = doc["qubits"][i];
    const std::string where = "qubits[" + std::to_string(i) + "]";
    if (!q.is_object()) throw FormatError(where + ": expected an object");
    detail::reject_unknown_keys(q, {"id", "t1_us", "t2_us", "p1", "single_ns", "p01", "p10"}, where);
    QubitCalibration qc;
    qc.id = int_field(q, "id", where);
    qc.t1 = number_field(q, "t1_us", where) * 1e-6;
    qc.t2 = number_field(q, "t2_us", where) * 1e-6;
    qc.p1 = number_field(q, "p1", where);
    qc.single_gate_duration = optional_number(q, "single_ns", kDefaultSingleGateSeconds * 1e9, where) * 1e-9;
    qc.readout_p01 = optional_number(q, "p01", 0.0, where);
    qc.readout_p10 = optional_number(q, "p10", 0.0, where);
    snap.qubits.push_back(qc);
  }
  if (doc.contains("couplers")) {
    if (!doc["couplers"].is_array()) throw FormatError("calibration: 'couplers' must be a list");
    for (std::size_t i = 0; i < doc["couplers"].size(); ++i) {
      const auto& c = doc["couplers"][i];
      const std::string where = "couplers[" + std::to_string(i) + "]";
      if (!c.is_object()) throw FormatError(where + ": expected an object");
      detail::reject_unknown_keys(c, {"q0", "q1", "p2", "duration_ns"}, where);
      CouplerCalibration cc;
      cc.q0 = int_field(c, "q0", where);
      cc.q1 = int_field(c, "q1", where);
      cc.p2 = number_field(c, "p2", where);
      cc.duration = optional_number(c, "duration_ns", kDefaultTwoQubitGateSeconds * 1e9, where) * 1e-9;
      snap.couplers.push_back(cc);
    }
  }
  snap.readout_duration =
      optional_number(doc, "readout_us", kDefaultReadoutSeconds * 1e6, "calibration") * 1e-6;
  snap.validate();
  return snap;
}

inline CalibrationSnapshot parse_calibration(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("calibration: ") + e.what());
  }
  return parse_calibration(doc);
}

inline CalibrationSnapshot load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open calibration file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_calibration(ss.str());
}

inline nlohmann::json calibration_to_json(const CalibrationSnapshot& snap) {
  nlohmann::json doc;
  doc["qubits"] = nlohmann::json::array();
  for (const auto& q : snap.qubits) {
    doc["qubits"].push_back({{"id", q.id},
                             {"t1_us", q.t1 * 1e6},
                             {"t2_us", q.t2 * 1e6},
                             {"p1", q.p1},
                             {"single_ns", q.single_gate_duration * 1e9},
                             {"p01", q.readout_p01},
                             {"p10", q.readout_p10}});
  }
  doc["couplers"] = nlohmann::json::array();
  for (const auto& c : snap.couplers) {
    doc["couplers"].push_back(
        {{"q0", c.q0}, {"q1", c.q1}, {"p2", c.p2}, {"duration_ns", c.duration * 1e9}});
  }
  doc["readout_us"] = snap.readout_duration * 1e6;
  return doc;
}

}  // namespace pbrsim
