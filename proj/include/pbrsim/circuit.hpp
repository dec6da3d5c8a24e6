#pragma once

#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pbrsim/calibration.hpp"
#include "pbrsim/channels.hpp"
#include "pbrsim/density_matrix.hpp"
#include "pbrsim/errors.hpp"

namespace pbrsim {

enum class GateKind {
  H,
  X,
  SX,
  RY,
  RZ,
  PHASE,
  CZ,
  SWAP,
  CPHASE_OPEN,
  MCPHASE_OPEN,
  NOISE,
  MEASURE,
};

inline std::string_view kind_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::SX: return "SX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::PHASE: return "PHASE";
    case GateKind::CZ: return "CZ";
    case GateKind::SWAP: return "SWAP";
    case GateKind::CPHASE_OPEN: return "CPHASE_OPEN";
    case GateKind::MCPHASE_OPEN: return "MCPHASE_OPEN";
    case GateKind::NOISE: return "NOISE";
    case GateKind::MEASURE: return "MEASURE";
  }
  return "?";
}

inline std::optional<GateKind> kind_from_name(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(GateKind::MEASURE); ++i) {
    const auto k = static_cast<GateKind>(i);
    if (kind_name(k) == s) return k;
  }
  return std::nullopt;
}

inline bool has_angle(GateKind k) {
  return k == GateKind::RY || k == GateKind::RZ || k == GateKind::PHASE ||
         k == GateKind::CPHASE_OPEN || k == GateKind::MCPHASE_OPEN;
}

inline bool is_unitary_kind(GateKind k) { return k != GateKind::NOISE && k != GateKind::MEASURE; }

struct Gate {
  GateKind kind = GateKind::H;
  double angle = 0.0;
  std::vector<int> qubits;
  // Unset means "take the calibrated duration".
  std::optional<double> duration;
  std::shared_ptr<const KrausChannel> channel;

  static Gate single(GateKind k, int q, double angle = 0.0) { return checked({k, angle, {q}}); }
  static Gate h(int q) { return single(GateKind::H, q); }
  static Gate x(int q) { return single(GateKind::X, q); }
  static Gate sx(int q) { return single(GateKind::SX, q); }
  static Gate ry(int q, double theta) { return single(GateKind::RY, q, theta); }
  static Gate rz(int q, double lambda) { return single(GateKind::RZ, q, lambda); }
  static Gate phase(int q, double lambda) { return single(GateKind::PHASE, q, lambda); }
  static Gate cz(int a, int b) { return checked({GateKind::CZ, 0.0, {a, b}}); }
  static Gate swap(int a, int b) { return checked({GateKind::SWAP, 0.0, {a, b}}); }
  static Gate cphase_open(int a, int b, double alpha) {
    return checked({GateKind::CPHASE_OPEN, alpha, {a, b}});
  }
  /// Phase e^{i alpha} on the all-zeros state of `qubits`; the last listed
  /// qubit is the nominal target.
  static Gate mcphase_open(std::vector<int> qubits, double alpha) {
    return checked({GateKind::MCPHASE_OPEN, alpha, std::move(qubits)});
  }
  static Gate noise(KrausChannel ch, std::vector<int> qubits) {
    Gate g{GateKind::NOISE, 0.0, std::move(qubits)};
    g.channel = std::make_shared<const KrausChannel>(std::move(ch));
    return checked(std::move(g));
  }
  static Gate measure(std::vector<int> qubits) {
    return checked({GateKind::MEASURE, 0.0, std::move(qubits)});
  }

  Gate with_duration(double seconds) const {
    Gate g = *this;
    g.duration = seconds;
    return checked(std::move(g));
  }

  int arity() const { return static_cast<int>(qubits.size()); }

  /// Throws ValidationError if the gate is malformed.
  void validate() const {
    if (!std::isfinite(angle)) throw ValidationError(std::string(kind_name(kind)) + ": angle not finite");
    if (duration && !(*duration >= 0.0)) throw ValidationError(std::string(kind_name(kind)) + ": negative duration");
    const int a = arity();
    bool ok = false;
    switch (kind) {
      case GateKind::H:
      case GateKind::X:
      case GateKind::SX:
      case GateKind::RY:
      case GateKind::RZ:
      case GateKind::PHASE: ok = a == 1; break;
      case GateKind::CZ:
      case GateKind::SWAP:
      case GateKind::CPHASE_OPEN: ok = a == 2; break;
      case GateKind::MCPHASE_OPEN: ok = a >= 2; break;
      case GateKind::NOISE: ok = channel && channel->arity == a; break;
      case GateKind::MEASURE: ok = a >= 1; break;
    }
    if (!ok) throw ValidationError(std::string(kind_name(kind)) + ": wrong number of qubits");
    for (std::size_t i = 0; i < qubits.size(); ++i) {
      if (qubits[i] < 0) throw ValidationError("negative qubit index");
      for (std::size_t j = 0; j < i; ++j)
        if (qubits[i] == qubits[j]) throw ValidationError("repeated qubit in gate");
    }
  }

 private:
  static Gate checked(Gate g) {
    g.validate();
    return g;
  }
};

/// Ordered gate list on a fixed register. MEASURE gates, if any, come last.
class Circuit {
 public:
  explicit Circuit(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1) throw ValidationError("circuit needs at least one qubit");
  }

  int n_qubits() const { return n_qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }
  bool empty() const { return gates_.empty(); }
  std::size_t size() const { return gates_.size(); }

  Circuit& add(Gate g) {
    g.validate();
    for (int q : g.qubits) {
      if (q >= n_qubits_) {
        throw IndexError("gate qubit " + std::to_string(q) + " outside " +
                         std::to_string(n_qubits_) + "-qubit circuit");
      }
    }
    if (g.kind != GateKind::MEASURE && !gates_.empty() && gates_.back().kind == GateKind::MEASURE) {
      throw ValidationError("only MEASURE gates may follow a MEASURE");
    }
    gates_.push_back(std::move(g));
    return *this;
  }

  Circuit& append(const Circuit& other) {
    if (other.n_qubits_ != n_qubits_) throw IndexError("appending circuit of different width");
    for (const auto& g : other.gates_) add(g);
    return *this;
  }

  /// Qubits read by the trailing MEASURE gates, in order; empty if none.
  std::vector<int> measured_qubits() const {
    std::vector<int> out;
    for (const auto& g : gates_)
      if (g.kind == GateKind::MEASURE) out.insert(out.end(), g.qubits.begin(), g.qubits.end());
    return out;
  }

 private:
  int n_qubits_;
  std::vector<Gate> gates_;
};

/// Two-qubit-equivalent cost assigned to MCPHASE_OPEN for error accounting.
/// One open control costs a single CZ; m >= 2 controls cost
/// cz_per_extra_control * (m - 1).
struct NativeCostModel {
  int cz_per_extra_control = 2;

  int mcphase_cost(int controls) const {
    return controls <= 1 ? 1 : cz_per_extra_control * (controls - 1);
  }
};

/// Unitary of a gate on its own qubits (first listed qubit most significant).
inline ComplexMatrix gate_unitary(const Gate& g) {
  using std::numbers::pi;
  const cplx i{0.0, 1.0};
  const double a = g.angle;
  switch (g.kind) {
    case GateKind::H: {
      const double r = 1.0 / std::numbers::sqrt2;
      return ComplexMatrix{{r, r}, {r, -r}};
    }
    case GateKind::X: return ComplexMatrix{{0, 1}, {1, 0}};
    case GateKind::SX:
      return ComplexMatrix{{cplx{0.5, 0.5}, cplx{0.5, -0.5}}, {cplx{0.5, -0.5}, cplx{0.5, 0.5}}};
    case GateKind::RY: {
      const double c = std::cos(a / 2.0), s = std::sin(a / 2.0);
      return ComplexMatrix{{c, -s}, {s, c}};
    }
    case GateKind::RZ: return ComplexMatrix{{std::exp(-i * a / 2.0), 0}, {0, std::exp(i * a / 2.0)}};
    case GateKind::PHASE: return ComplexMatrix{{1, 0}, {0, std::exp(i * a)}};
    case GateKind::CZ: return ComplexMatrix{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, -1}};
    case GateKind::SWAP: return ComplexMatrix{{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}};
    case GateKind::CPHASE_OPEN:
    case GateKind::MCPHASE_OPEN: {
      ComplexMatrix u = ComplexMatrix::identity(std::size_t{1} << g.arity());
      u(0, 0) = std::exp(i * a);
      return u;
    }
    case GateKind::NOISE:
    case GateKind::MEASURE: break;
  }
  throw KindError(std::string(kind_name(g.kind)) + " has no unitary");
}

/// SWAP(a, b) as three alternating CNOTs, each written H . CZ . H.
inline std::vector<Gate> decompose_swap(int a = 0, int b = 1) {
  return {Gate::h(b), Gate::cz(a, b), Gate::h(b),   //
          Gate::h(a), Gate::cz(a, b), Gate::h(a),   //
          Gate::h(b), Gate::cz(a, b), Gate::h(b)};
}

struct GateCounts {
  int g1 = 0;
  int g2 = 0;
  friend bool operator==(const GateCounts&, const GateCounts&) = default;
};

inline GateCounts gate_counts(const Circuit& c, const NativeCostModel& cost = {}) {
  GateCounts n;
  for (const auto& g : c.gates()) {
    if (!is_unitary_kind(g.kind)) continue;
    if (g.kind == GateKind::MCPHASE_OPEN) {
      n.g2 += cost.mcphase_cost(g.arity() - 1);
    } else if (g.arity() == 1) {
      ++n.g1;
    } else {
      ++n.g2;
    }
  }
  return n;
}

/// Maps circuit qubit indices to calibration qubit ids. Empty means identity.
using QubitIds = std::vector<int>;

inline int calibration_id(const QubitIds& ids, int q) {
  if (ids.empty()) return q;
  if (q < 0 || q >= static_cast<int>(ids.size())) {
    throw CalibrationError("no calibration id for circuit qubit " + std::to_string(q));
  }
  return ids[q];
}

/// Wall-clock duration of one gate; explicit durations win over calibration.
inline double gate_duration(const Gate& g, const CalibrationSnapshot& cal, const QubitIds& ids = {},
                            const NativeCostModel& cost = {}) {
  if (g.kind == GateKind::NOISE) return 0.0;
  if (g.duration) return *g.duration;
  if (g.kind == GateKind::MEASURE) return cal.readout_duration;
  if (g.arity() == 1) return cal.qubit(calibration_id(ids, g.qubits[0])).single_gate_duration;
  if (g.kind == GateKind::MCPHASE_OPEN && g.arity() > 2) {
    return cost.mcphase_cost(g.arity() - 1) * cal.mean_coupler_duration();
  }
  const double d2 =
      cal.coupler(calibration_id(ids, g.qubits[0]), calibration_id(ids, g.qubits[1])).duration;
  return g.kind == GateKind::SWAP ? 3.0 * d2 : d2;
}

/// Per-qubit busy time in seconds: the sum of durations of gates touching it.
inline std::vector<double> circuit_duration(const Circuit& c, const CalibrationSnapshot& cal,
                                            const QubitIds& ids = {},
                                            const NativeCostModel& cost = {}) {
  std::vector<double> busy(c.n_qubits(), 0.0);
  for (const auto& g : c.gates()) {
    if (g.kind == GateKind::NOISE) continue;
    for (int q : g.qubits) cal.qubit(calibration_id(ids, q));
    const double d = gate_duration(g, cal, ids, cost);
    for (int q : g.qubits) busy[q] += d;
  }
  return busy;
}

// ---------------------------------------------------------------------------
// Line-oriented text form:
//   QUBITS <n>
//   <KIND> [angle | channel-label] <qubit>... [dur=<seconds>]
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_text(const Circuit& c) {
  std::ostringstream out;
  out << "QUBITS " << c.n_qubits() << '\n';
  for (const auto& g : c.gates()) {
    out << kind_name(g.kind);
    if (has_angle(g.kind)) out << ' ' << format_double(g.angle);
    if (g.kind == GateKind::NOISE) out << ' ' << g.channel->label;
    for (int q : g.qubits) out << ' ' << q;
    if (g.duration) out << " dur=" << format_double(*g.duration);
    out << '\n';
  }
  return out.str();
}

inline Circuit circuit_from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<Circuit> circuit;
  int line_no = 0;
  auto fail = [&](const std::string& why) -> FormatError {
    return FormatError("line " + std::to_string(line_no) + ": " + why);
  };
  auto to_double = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw fail("bad number '" + s + "'");
    }
  };
  auto to_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw fail("bad qubit index '" + s + "'");
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty() || tok[0].starts_with('#')) continue;
    if (!circuit) {
      if (tok.size() != 2 || tok[0] != "QUBITS") throw fail("expected 'QUBITS <n>' header");
      circuit.emplace(to_int(tok[1]));
      continue;
    }
    const auto kind = kind_from_name(tok[0]);
    if (!kind) throw fail("unknown gate kind '" + tok[0] + "'");
    std::size_t pos = 1;
    Gate g;
    g.kind = *kind;
    std::string label;
    if (has_angle(g.kind)) {
      if (pos >= tok.size()) throw fail("missing angle");
      g.angle = to_double(tok[pos++]);
    } else if (g.kind == GateKind::NOISE) {
      if (pos >= tok.size()) throw fail("missing channel label");
      label = tok[pos++];
    }
    for (; pos < tok.size(); ++pos) {
      if (tok[pos].starts_with("dur=")) {
        if (pos + 1 != tok.size()) throw fail("dur= must be the last field");
        g.duration = to_double(tok[pos].substr(4));
      } else {
        g.qubits.push_back(to_int(tok[pos]));
      }
    }
    if (g.kind == GateKind::NOISE) {
      g.channel = std::make_shared<const KrausChannel>(channel_from_label(label, g.arity()));
    }
    try {
      circuit->add(std::move(g));
    } catch (const Error& e) {
      throw fail(e.what());
    }
  }
  if (!circuit) throw FormatError("empty circuit text");
  return std::move(*circuit);
}

}  // namespace pbrsim
