#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>

#include "pbrsim/density_matrix.hpp"
#include "pbrsim/errors.hpp"

namespace pbrsim {

namespace detail {

inline void require_probability(double p, std::string_view what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw RangeError(std::string(what) + " must lie in [0, 1], got " + std::to_string(p));
  }
}

inline std::string format_label(std::string_view name, double p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "(%.17g)", p);
  return std::string(name) + buf;
}

inline const std::array<ComplexMatrix, 4>& paulis() {
  static const std::array<ComplexMatrix, 4> kPaulis = {
      ComplexMatrix{{1, 0}, {0, 1}},
      ComplexMatrix{{0, 1}, {1, 0}},
      ComplexMatrix{{0, cplx{0, -1}}, {cplx{0, 1}, 0}},
      ComplexMatrix{{1, 0}, {0, -1}},
  };
  return kPaulis;
}

}  // namespace detail

/// rho -> (1 - p) rho + p I / 2^arity, as a uniform Pauli mixture.
inline KrausChannel depolarizing_channel(double p, int arity) {
  detail::require_probability(p, "depolarizing probability");
  if (arity != 1 && arity != 2) throw RangeError("depolarizing arity must be 1 or 2");
  const auto& pauli = detail::paulis();
  KrausChannel ch;
  ch.arity = arity;
  ch.label = detail::format_label("depolarizing", p);
  const double terms = arity == 1 ? 4.0 : 16.0;
  const double w_identity = std::sqrt(1.0 - p * (terms - 1.0) / terms);
  const double w_pauli = std::sqrt(p / terms);
  if (arity == 1) {
    ch.operators.push_back(pauli[0] * w_identity);
    if (p > 0.0)
      for (int i = 1; i < 4; ++i) ch.operators.push_back(pauli[i] * w_pauli);
  } else {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        if (a == 0 && b == 0) {
          ch.operators.push_back(kron(pauli[0], pauli[0]) * w_identity);
        } else if (p > 0.0) {
          ch.operators.push_back(kron(pauli[a], pauli[b]) * w_pauli);
        }
      }
  }
  return ch;
}

/// T1 relaxation: the |1> population decays by (1 - p_ad).
inline KrausChannel amplitude_damping(double p_ad) {
  detail::require_probability(p_ad, "amplitude damping probability");
  KrausChannel ch;
  ch.arity = 1;
  ch.label = detail::format_label("amplitude_damping", p_ad);
  ch.operators.push_back(ComplexMatrix{{1, 0}, {0, std::sqrt(1.0 - p_ad)}});
  if (p_ad > 0.0) ch.operators.push_back(ComplexMatrix{{0, std::sqrt(p_ad)}, {0, 0}});
  return ch;
}

/// Phase flip; off-diagonal coherence is multiplied by (1 - p_phi).
inline KrausChannel dephasing(double p_phi) {
  detail::require_probability(p_phi, "dephasing probability");
  KrausChannel ch;
  ch.arity = 1;
  ch.label = detail::format_label("dephasing", p_phi);
  ch.operators.push_back(detail::paulis()[0] * std::sqrt(1.0 - p_phi / 2.0));
  if (p_phi > 0.0) ch.operators.push_back(detail::paulis()[3] * std::sqrt(p_phi / 2.0));
  return ch;
}

/// Decay probability 1 - exp(-t / T) for a gate of duration t.
inline double p_from_time(double t, double time_constant) {
  if (!(time_constant > 0.0)) throw RangeError("time constant must be positive");
  if (!(t >= 0.0)) throw RangeError("duration must be non-negative");
  return -std::expm1(-t / time_constant);
}

/// Rebuilds a channel from its label and arity (inverse of the factories).
inline KrausChannel channel_from_label(std::string_view label, int arity) {
  const auto open = label.find('(');
  if (open == std::string_view::npos || label.back() != ')') {
    throw FormatError("malformed channel label '" + std::string(label) + "'");
  }
  const std::string name(label.substr(0, open));
  const std::string arg(label.substr(open + 1, label.size() - open - 2));
  double p = 0.0;
  try {
    std::size_t used = 0;
    p = std::stod(arg, &used);
    if (used != arg.size()) throw std::invalid_argument(arg);
  } catch (const std::exception&) {
    throw FormatError("malformed channel parameter '" + arg + "'");
  }
  if (name == "depolarizing") return depolarizing_channel(p, arity);
  if (arity != 1) throw FormatError("channel '" + name + "' acts on one qubit");
  if (name == "amplitude_damping") return amplitude_damping(p);
  if (name == "dephasing") return dephasing(p);
  throw FormatError("unknown channel '" + name + "'");
}

}  // namespace pbrsim
