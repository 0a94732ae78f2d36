#include "cforge/statecore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "detail/measures.hpp"

namespace cforge {

EnergySpectrum::EnergySpectrum(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.size() < 2) {
    throw DomainError("energy spectrum needs at least two levels");
  }
  for (std::size_t j = 0; j < levels_.size(); ++j) {
    if (!std::isfinite(levels_[j])) {
      throw DomainError("energy spectrum contains a non-finite level");
    }
    if (j > 0 && levels_[j] < levels_[j - 1]) {
      throw DomainError("energy levels must be ordered nondecreasingly");
    }
  }
}

EnergySpectrum EnergySpectrum::two_qubit(double spacing) {
  return EnergySpectrum({0.0, spacing, spacing, 2.0 * spacing});
}

QState::QState(CMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() == 0 || rho_.rows() != rho_.cols()) {
    throw DimensionError("density matrix must be square and nonempty");
  }
  if (!rho_.allFinite()) {
    throw DomainError("density matrix has non-finite entries");
  }
  const double asym = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol::kHermitian) {
    throw DomainError("density matrix is not Hermitian (deviation " + std::to_string(asym) + ")");
  }
  rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
  const double trace = rho_.trace().real();
  if (std::abs(trace - 1.0) > tol::kTrace) {
    throw DomainError("density matrix trace is " + std::to_string(trace) + ", expected 1");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho_);
  const RVector& ev = eig.eigenvalues();
  if (ev.minCoeff() < tol::kPsdFloor) {
    throw DomainError("density matrix is not positive semidefinite (eigenvalue " +
                      std::to_string(ev.minCoeff()) + ")");
  }
  if (ev.minCoeff() < 0.0) {
    const RVector clamped = ev.cwiseMax(0.0);
    rho_ = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().adjoint();
    rho_ /= rho_.trace().real();
  }
}

QState QState::pure(const CVector& amplitudes) {
  const double norm = amplitudes.norm();
  if (norm == 0.0 || !std::isfinite(norm)) {
    throw DomainError("pure state amplitudes must have nonzero finite norm");
  }
  const CVector psi = amplitudes / norm;
  return QState(psi * psi.adjoint());
}

QState QState::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) {
    throw DimensionError("basis index out of range");
  }
  CMatrix rho = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  rho(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
  return QState(std::move(rho));
}

double QState::purity() const { return (rho_ * rho_).trace().real(); }

bool QState::is_diagonal(double tolerance) const {
  CMatrix off = rho_;
  off.diagonal().setZero();
  return off.cwiseAbs().maxCoeff() <= tolerance;
}

DiagonalFilter::DiagonalFilter(CVector coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() == 0) {
    throw DimensionError("filter must have at least one coefficient");
  }
  for (Eigen::Index j = 0; j < coeffs_.size(); ++j) {
    const double mag = std::abs(coeffs_(j));
    if (!std::isfinite(mag) || mag > 1.0 + tol::kKraus) {
      throw DomainError("filter coefficient " + std::to_string(j) + " has magnitude " +
                        std::to_string(mag) + " > 1");
    }
  }
}

DiagonalFilter::DiagonalFilter(const std::vector<double>& real_coeffs)
    : DiagonalFilter(CVector(Eigen::Map<const RVector>(real_coeffs.data(),
                                                       static_cast<Eigen::Index>(real_coeffs.size()))
                                 .cast<Complex>())) {}

DiagonalFilter DiagonalFilter::identity(std::size_t dim) {
  return DiagonalFilter(CVector::Ones(static_cast<Eigen::Index>(dim)));
}

DiagonalFilter DiagonalFilter::from_transmissions(const RVector& transmissions) {
  return DiagonalFilter(transmissions.cwiseMax(0.0).cwiseSqrt().cast<Complex>().eval());
}

void QubitParams::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("population p must lie in [0, 1]");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw DomainError("eta must lie in [0, 1]");
  }
}

QState dephase(const QState& state) {
  CMatrix diag = CMatrix::Zero(state.matrix().rows(), state.matrix().cols());
  diag.diagonal() = state.matrix().diagonal();
  return QState(std::move(diag));
}

double mean_energy(const QState& state, const EnergySpectrum& spectrum) {
  if (state.dim() != spectrum.dim()) {
    throw DimensionError("state and spectrum dimensions differ");
  }
  const RVector pops = state.populations();
  double sum = 0.0;
  for (std::size_t j = 0; j < spectrum.dim(); ++j) {
    sum += spectrum[j] * pops(static_cast<Eigen::Index>(j));
  }
  return sum;
}

double shannon_entropy(const RVector& probabilities) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < probabilities.size(); ++j) {
    const double q = probabilities(j);
    if (q > tol::kEntropyZero) {
      s -= q * std::log(q);
    }
  }
  return s;
}

double von_neumann_entropy(const QState& state) { return detail::von_neumann_entropy(state.matrix()); }

double coherence(const QState& state) { return detail::coherence(state.matrix()); }

double coherence_tsallis(const QState& state) { return detail::coherence_tsallis(state.matrix()); }

double success_probability(const QState& state, const DiagonalFilter& filter) {
  if (state.dim() != filter.dim()) {
    throw DimensionError("state and filter dimensions differ");
  }
  return filter.transmissions().dot(state.populations());
}

Filtered apply_filter(const QState& state, const DiagonalFilter& filter) {
  const double ps = success_probability(state, filter);
  if (!(ps > 0.0)) {
    throw DomainError("filter annihilates the state (zero success probability)");
  }
  return {QState(detail::filter_unnormalized(state.matrix(), filter.coeffs()) / ps), ps};
}

namespace {

CMatrix qubit_matrix(const QubitParams& params) {
  params.validate();
  const double off = params.eta * std::sqrt(params.p * (1.0 - params.p));
  CMatrix rho(2, 2);
  rho << 1.0 - params.p, off, off, params.p;
  return rho;
}

CMatrix tensor_power(const CMatrix& single, int n) {
  if (n < 1) {
    throw DomainError("number of qubits must be at least 1");
  }
  CMatrix out = single;
  for (int k = 1; k < n; ++k) {
    out = kron(out, single);
  }
  return out;
}

}  // namespace

QState product_pure_state(double p, int n_qubits) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("population p must lie in [0, 1]");
  }
  CVector phi(2);
  phi << std::sqrt(1.0 - p), std::sqrt(p);
  CVector psi = phi;
  if (n_qubits < 1) {
    throw DomainError("number of qubits must be at least 1");
  }
  for (int k = 1; k < n_qubits; ++k) {
    psi = kron(psi, phi);
  }
  return QState(psi * psi.adjoint());
}

QState mixed_qubit_product(const QubitParams& params, int n_qubits) {
  return QState(tensor_power(qubit_matrix(params), n_qubits));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

QState tensor(const QState& a, const QState& b) { return QState(kron(a.matrix(), b.matrix())); }

DiagonalFilter tensor_filter(const DiagonalFilter& a, const DiagonalFilter& b) {
  return DiagonalFilter(CVector(kron(a.coeffs(), b.coeffs())));
}

double nats_to_base(double nats, double base) {
  if (!(base > 0.0) || base == 1.0) {
    throw DomainError("logarithm base must be positive and different from 1");
  }
  return nats / std::log(base);
}

}  // namespace cforge
