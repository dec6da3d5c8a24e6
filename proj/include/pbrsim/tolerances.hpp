#pragma once

namespace pbrsim::tol {

// Algebraic checks: unitarity, Hermiticity, trace, Kraus completeness.
inline constexpr double kAlgebraic = 1e-10;
// Spectral checks: smallest admissible eigenvalue is -kSpectral.
inline constexpr double kSpectral = 1e-9;
// Probability vectors must sum to one within this.
inline constexpr double kNormalization = 1e-9;
// Readout matrix column sums.
inline constexpr double kStochastic = 1e-12;

// Outcome counted as forbidden below this probability.
inline constexpr double kForbidden = 1e-10;
// Outcomes in [kForbidden, kGuardBand) are ambiguous.
inline constexpr double kGuardBand = 1e-8;

// Hard cap on simulated register size (dense 2^n x 2^n density matrix).
inline constexpr int kMaxSimQubits = 12;

}  // namespace pbrsim::tol
