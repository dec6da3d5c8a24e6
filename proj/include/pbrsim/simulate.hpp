#pragma once

#include <numeric>
#include <vector>

#include "pbrsim/circuit.hpp"
#include "pbrsim/density_matrix.hpp"

namespace pbrsim {

/// Evolves |0...0> through every unitary and NOISE gate; MEASURE is ignored.
inline DensityMatrix evolve(const Circuit& c) {
  DensityMatrix rho = DensityMatrix::ground(c.n_qubits());
  for (const auto& g : c.gates()) {
    if (g.kind == GateKind::MEASURE) continue;
    if (g.kind == GateKind::NOISE) {
      rho = apply_channel(rho, *g.channel, g.qubits);
    } else {
      rho = apply_unitary(rho, gate_unitary(g), g.qubits);
    }
  }
  return rho;
}

/// Outcome distribution over the measured qubits, in MEASURE order (first
/// measured qubit is the most significant bit). Measures every qubit when the
/// circuit has no MEASURE.
inline std::vector<double> outcome_distribution(const Circuit& c) {
  const DensityMatrix rho = evolve(c);
  const auto full = measurement_probs(rho);
  auto measured = c.measured_qubits();
  if (measured.empty()) {
    measured.resize(c.n_qubits());
    std::iota(measured.begin(), measured.end(), 0);
  }
  return marginal_probs(full, c.n_qubits(), measured);
}

}  // namespace pbrsim
