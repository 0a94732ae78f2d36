#pragma once

// Quantum state algebra in a fixed incoherent (energy) basis: density
// matrices, diagonal filters, and the energy / coherence measures.

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cforge/errors.hpp"

namespace cforge {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

namespace tol {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-12;
inline constexpr double kPsdFloor = -1e-10;
inline constexpr double kKraus = 1e-12;
// Eigenvalues below this are exact zeros for 0 log 0.
inline constexpr double kEntropyZero = 1e-14;
}  // namespace tol

/// Ordered energy eigenvalues E_0 <= E_1 <= ... defining the incoherent basis.
class EnergySpectrum {
public:
  explicit EnergySpectrum(std::vector<double> levels);

  /// Two-qubit spectrum (0, 1, 1, 2) in units of the level spacing.
  static EnergySpectrum two_qubit(double spacing = 1.0);

  std::size_t dim() const { return levels_.size(); }
  double operator[](std::size_t j) const { return levels_[j]; }
  const std::vector<double>& levels() const { return levels_; }

private:
  std::vector<double> levels_;
};

/// Density matrix of a d-level system. Always Hermitian, unit trace, PSD.
class QState {
public:
  /// Validates and symmetrizes; eigenvalues in [-1e-10, 0) are clamped to 0.
  explicit QState(CMatrix rho);

  static QState pure(const CVector& amplitudes);
  static QState basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }
  const CMatrix& matrix() const { return rho_; }
  Complex operator()(std::size_t j, std::size_t k) const {
    return rho_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
  }

  RVector populations() const { return rho_.diagonal().real(); }
  double purity() const;
  bool is_pure(double tolerance = 1e-9) const { return purity() > 1.0 - tolerance; }
  bool is_diagonal(double tolerance = 1e-10) const;

private:
  CMatrix rho_;
};

/// Diagonal Kraus operator M = sum_j m_j |j><j| with |m_j| <= 1.
class DiagonalFilter {
public:
  explicit DiagonalFilter(CVector coeffs);
  explicit DiagonalFilter(const std::vector<double>& real_coeffs);

  static DiagonalFilter identity(std::size_t dim);
  /// Builds a filter from transmission probabilities M_j = |m_j|^2 (real, nonnegative amplitudes).
  static DiagonalFilter from_transmissions(const RVector& transmissions);

  std::size_t dim() const { return static_cast<std::size_t>(coeffs_.size()); }
  const CVector& coeffs() const { return coeffs_; }
  Complex operator[](std::size_t j) const { return coeffs_(static_cast<Eigen::Index>(j)); }
  /// |m_j|^2.
  RVector transmissions() const { return coeffs_.cwiseAbs2(); }
  CMatrix matrix() const { return coeffs_.asDiagonal(); }

private:
  CVector coeffs_;
};

/// Single-qubit state parameters (excited population p, off-diagonal scale eta).
struct QubitParams {
  double p = 0.0;
  double eta = 1.0;

  void validate() const;
};

QState dephase(const QState& state);
double mean_energy(const QState& state, const EnergySpectrum& spectrum);

/// Shannon entropy (nats) of a probability vector, 0 log 0 = 0.
double shannon_entropy(const RVector& probabilities);
/// von Neumann entropy (nats).
double von_neumann_entropy(const QState& state);

/// Relative-entropy coherence S(rho_D) - S(rho), in nats.
double coherence(const QState& state);
/// Tsallis-2 coherence Tr(rho^2) - Tr(rho_D^2).
double coherence_tsallis(const QState& state);

double success_probability(const QState& state, const DiagonalFilter& filter);

struct Filtered {
  QState state;
  double p_success;
};

/// rho -> M rho M^dagger / P_S. Throws DomainError when P_S vanishes.
Filtered apply_filter(const QState& state, const DiagonalFilter& filter);

/// (sqrt(1-p)|0> + sqrt(p)|1>)^{(x) n}
QState product_pure_state(double p, int n_qubits);
/// Tensor power of [[1-p, eta sqrt(p(1-p))], [eta sqrt(p(1-p)), p]].
QState mixed_qubit_product(const QubitParams& params, int n_qubits);

QState tensor(const QState& a, const QState& b);
DiagonalFilter tensor_filter(const DiagonalFilter& a, const DiagonalFilter& b);

/// Kronecker product of two dense matrices (A outer, B inner index).
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Converts a value in nats to the requested logarithm base.
double nats_to_base(double nats, double base);

}  // namespace cforge
