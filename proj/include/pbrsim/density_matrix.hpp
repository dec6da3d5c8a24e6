#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pbrsim/linalg.hpp"
#include "pbrsim/tolerances.hpp"

namespace pbrsim {

/// Completely positive map given by Kraus operators acting on `arity` qubits.
/// Completeness is not enforced at construction so that malformed channels
/// can be represented and rejected at application time.
struct KrausChannel {
  int arity = 1;
  std::vector<ComplexMatrix> operators;
  // Round-trippable description such as "depolarizing(0.001)".
  std::string label;

  /// max |sum K^dag K - I|.
  double completeness_error() const {
    const std::size_t dim = std::size_t{1} << arity;
    ComplexMatrix sum(dim, dim);
    for (const auto& k : operators) {
      if (k.rows() != dim || k.cols() != dim) return INFINITY;
      sum += k.adjoint() * k;
    }
    return max_abs_diff(sum, ComplexMatrix::identity(dim));
  }

  bool is_complete() const { return completeness_error() < tol::kAlgebraic; }
};

namespace detail {

// Index arithmetic for embedding a k-qubit operator into an n-qubit register.
// Qubit q occupies bit (n - 1 - q) of the basis index; targets[0] is the most
// significant bit of the local operator index.
struct Embedding {
  std::vector<std::size_t> offsets;  // local index -> global bit pattern
  std::vector<std::size_t> bases;    // global indices with all target bits clear

  Embedding(int n_qubits, std::span<const int> targets) {
    const std::size_t k = targets.size();
    const std::size_t dim = std::size_t{1} << n_qubits;
    offsets.assign(std::size_t{1} << k, 0);
    std::size_t mask = 0;
    for (std::size_t local = 0; local < offsets.size(); ++local) {
      std::size_t g = 0;
      for (std::size_t j = 0; j < k; ++j) {
        if ((local >> (k - 1 - j)) & 1U) g |= std::size_t{1} << (n_qubits - 1 - targets[j]);
      }
      offsets[local] = g;
    }
    for (int t : targets) mask |= std::size_t{1} << (n_qubits - 1 - t);
    bases.reserve(dim >> k);
    for (std::size_t i = 0; i < dim; ++i)
      if ((i & mask) == 0) bases.push_back(i);
  }
};

// rho <- K rho K^dag, in place, on a dim x dim row-major buffer.
inline void conjugate_in_place(std::span<cplx> rho, std::size_t dim, const ComplexMatrix& op,
                               const Embedding& emb) {
  const std::size_t local = emb.offsets.size();
  std::vector<cplx> in(local), out(local);
  // Left multiply.
  for (std::size_t c = 0; c < dim; ++c) {
    for (std::size_t b : emb.bases) {
      for (std::size_t l = 0; l < local; ++l) in[l] = rho[(b + emb.offsets[l]) * dim + c];
      for (std::size_t l = 0; l < local; ++l) {
        cplx acc = 0.0;
        for (std::size_t m = 0; m < local; ++m) acc += op(l, m) * in[m];
        out[l] = acc;
      }
      for (std::size_t l = 0; l < local; ++l) rho[(b + emb.offsets[l]) * dim + c] = out[l];
    }
  }
  // Right multiply by the adjoint.
  for (std::size_t r = 0; r < dim; ++r) {
    cplx* row = rho.data() + r * dim;
    for (std::size_t b : emb.bases) {
      for (std::size_t m = 0; m < local; ++m) in[m] = row[b + emb.offsets[m]];
      for (std::size_t l = 0; l < local; ++l) {
        cplx acc = 0.0;
        for (std::size_t m = 0; m < local; ++m) acc += in[m] * std::conj(op(l, m));
        out[l] = acc;
      }
      for (std::size_t l = 0; l < local; ++l) row[b + emb.offsets[l]] = out[l];
    }
  }
}

inline void check_targets(int n_qubits, std::span<const int> targets) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= n_qubits) {
      throw IndexError("target qubit " + std::to_string(targets[i]) + " out of range for " +
                       std::to_string(n_qubits) + " qubits");
    }
    for (std::size_t j = 0; j < i; ++j)
      if (targets[i] == targets[j]) throw IndexError("duplicate target qubit");
  }
}

}  // namespace detail

/// Density matrix of an n-qubit register. Qubit 0 is the most significant bit
/// of the basis index.
class DensityMatrix {
 public:
  /// |0...0><0...0|.
  static DensityMatrix ground(int n_qubits) {
    check_size(n_qubits);
    const std::size_t dim = std::size_t{1} << n_qubits;
    ComplexMatrix m(dim, dim);
    m(0, 0) = 1.0;
    return DensityMatrix(n_qubits, std::move(m));
  }

  /// Validating constructor: Hermitian, unit trace, positive semidefinite.
  static DensityMatrix from_matrix(ComplexMatrix m) {
    if (!m.square() || !is_power_of_two(m.rows())) {
      throw IndexError("density matrix must be 2^n x 2^n");
    }
    const int n = log2_exact(m.rows());
    check_size(n);
    DensityMatrix rho(n, std::move(m));
    rho.validate();
    return rho;
  }

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  cplx operator()(std::size_t r, std::size_t c) const { return matrix_(r, c); }

  double trace() const { return matrix_.trace().real(); }

  double purity() const {
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    double p = 0.0;
    for (const auto& z : matrix_.data()) p += std::norm(z);
    return p;
  }

  double min_eigenvalue() const {
    const auto d = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXcd m(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) m(r, c) = matrix_(r, c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
  }

  /// Throws ValidationError when an invariant fails.
  void validate() const {
    if (!matrix_.is_finite()) throw ValidationError("density matrix has non-finite entries");
    if (!is_hermitian(matrix_)) throw ValidationError("density matrix is not Hermitian");
    if (std::abs(matrix_.trace() - cplx{1.0}) >= tol::kAlgebraic) {
      throw ValidationError("density matrix trace is not 1");
    }
    if (min_eigenvalue() < -tol::kSpectral) {
      throw ValidationError("density matrix is not positive semidefinite");
    }
  }

 private:
  DensityMatrix(int n, ComplexMatrix m) : n_qubits_(n), matrix_(std::move(m)) {}

  static void check_size(int n) {
    if (n < 1) throw IndexError("density matrix needs at least one qubit");
    if (n > tol::kMaxSimQubits) {
      throw CapError("register of " + std::to_string(n) + " qubits exceeds the " +
                     std::to_string(tol::kMaxSimQubits) + "-qubit simulation cap");
    }
  }

  friend DensityMatrix pure_density(std::span<const cplx> amplitudes);
  friend DensityMatrix apply_unitary(const DensityMatrix&, const ComplexMatrix&,
                                     std::span<const int>);
  friend DensityMatrix apply_channel(const DensityMatrix&, const KrausChannel&,
                                     std::span<const int>);

  int n_qubits_ = 0;
  ComplexMatrix matrix_;
};

/// |psi><psi| from a normalized amplitude vector.
inline DensityMatrix pure_density(std::span<const cplx> amplitudes) {
  if (!is_power_of_two(amplitudes.size())) {
    throw IndexError("amplitude vector length must be a power of two");
  }
  double norm2 = 0.0;
  for (const auto& a : amplitudes) norm2 += std::norm(a);
  if (std::abs(std::sqrt(norm2) - 1.0) >= tol::kAlgebraic) {
    throw NormalizationError("amplitude vector norm is " + std::to_string(std::sqrt(norm2)));
  }
  const std::size_t dim = amplitudes.size();
  const int n = log2_exact(dim);
  DensityMatrix::check_size(n);
  ComplexMatrix m(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) m(r, c) = amplitudes[r] * std::conj(amplitudes[c]);
  return DensityMatrix(n, std::move(m));
}

inline DensityMatrix pure_density(std::initializer_list<cplx> amplitudes) {
  return pure_density(std::span<const cplx>(amplitudes.begin(), amplitudes.size()));
}

/// (U (x) I) rho (U (x) I)^dag with U acting on `targets`.
inline DensityMatrix apply_unitary(const DensityMatrix& state, const ComplexMatrix& u,
                                   std::span<const int> targets) {
  detail::check_targets(state.n_qubits(), targets);
  const std::size_t local = std::size_t{1} << targets.size();
  if (u.rows() != local || u.cols() != local) {
    throw IndexError("unitary dimension does not match target count");
  }
  if (!is_unitary(u)) throw UnitarityError("operator is not unitary");
  DensityMatrix out = state;
  const detail::Embedding emb(state.n_qubits(), targets);
  detail::conjugate_in_place(out.matrix_.data(), out.dim(), u, emb);
  return out;
}

inline DensityMatrix apply_unitary(const DensityMatrix& state, const ComplexMatrix& u,
                                   std::initializer_list<int> targets) {
  return apply_unitary(state, u, std::span<const int>(targets.begin(), targets.size()));
}

/// sum_i K_i rho K_i^dag with the channel acting on `targets`.
inline DensityMatrix apply_channel(const DensityMatrix& state, const KrausChannel& ch,
                                   std::span<const int> targets) {
  detail::check_targets(state.n_qubits(), targets);
  if (static_cast<int>(targets.size()) != ch.arity) {
    throw IndexError("channel arity does not match target count");
  }
  if (ch.operators.empty() || !ch.is_complete()) {
    throw ChannelError("Kraus operators of '" + ch.label + "' are not complete");
  }
  const detail::Embedding emb(state.n_qubits(), targets);
  const std::size_t dim = state.dim();
  const std::size_t local = emb.offsets.size();
  const std::size_t block = local * local;
  // Superoperator on a local block: S[(l,m),(a,b)] = sum_k K[l,a] conj(K[m,b]).
  std::vector<cplx> super(block * block, 0.0);
  for (const auto& k : ch.operators)
    for (std::size_t l = 0; l < local; ++l)
      for (std::size_t m = 0; m < local; ++m)
        for (std::size_t a = 0; a < local; ++a)
          for (std::size_t b = 0; b < local; ++b)
            super[(l * local + m) * block + a * local + b] += k(l, a) * std::conj(k(m, b));
  ComplexMatrix acc = state.matrix_;
  auto rho = acc.data();
  std::vector<cplx> in(block), out(block);
  for (std::size_t br : emb.bases) {
    for (std::size_t bc : emb.bases) {
      for (std::size_t a = 0; a < local; ++a)
        for (std::size_t b = 0; b < local; ++b)
          in[a * local + b] = rho[(br + emb.offsets[a]) * dim + bc + emb.offsets[b]];
      for (std::size_t i = 0; i < block; ++i) {
        cplx v = 0.0;
        const cplx* srow = super.data() + i * block;
        for (std::size_t j = 0; j < block; ++j) v += srow[j] * in[j];
        out[i] = v;
      }
      for (std::size_t a = 0; a < local; ++a)
        for (std::size_t b = 0; b < local; ++b)
          rho[(br + emb.offsets[a]) * dim + bc + emb.offsets[b]] = out[a * local + b];
    }
  }
  return DensityMatrix(state.n_qubits(), std::move(acc));
}

inline DensityMatrix apply_channel(const DensityMatrix& state, const KrausChannel& ch,
                                   std::initializer_list<int> targets) {
  return apply_channel(state, ch, std::span<const int>(targets.begin(), targets.size()));
}

/// Computational-basis outcome probabilities, clamped to [0, 1].
inline std::vector<double> measurement_probs(const DensityMatrix& state) {
  std::vector<double> p(state.dim());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::clamp(state(k, k).real(), 0.0, 1.0);
  return p;
}

/// Marginal distribution over `qubits`, with qubits[0] as the most significant
/// bit of the returned index.
inline std::vector<double> marginal_probs(std::span<const double> probs, int n_qubits,
                                          std::span<const int> qubits) {
  if (probs.size() != (std::size_t{1} << n_qubits)) {
    throw IndexError("distribution size does not match qubit count");
  }
  detail::check_targets(n_qubits, qubits);
  const std::size_t k = qubits.size();
  std::vector<double> out(std::size_t{1} << k, 0.0);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    std::size_t idx = 0;
    for (std::size_t j = 0; j < k; ++j) {
      idx = (idx << 1) | ((i >> (n_qubits - 1 - qubits[j])) & 1U);
    }
    out[idx] += probs[i];
  }
  return out;
}

}  // namespace pbrsim
