#pragma once

// Matrix-level measures shared by the validated value types and the hot
// loops (oracle enumeration) that must not pay for QState validation.

#include <cmath>

#include <Eigen/Dense>

#include "cforge/statecore.hpp"

namespace cforge::detail {

inline double entropy_of_eigenvalues(const RVector& ev) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < ev.size(); ++j) {
    if (ev(j) > tol::kEntropyZero) {
      s -= ev(j) * std::log(ev(j));
    }
  }
  return s;
}

inline double von_neumann_entropy(const CMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho, Eigen::EigenvaluesOnly);
  return entropy_of_eigenvalues(eig.eigenvalues());
}

// rho is assumed normalized.
inline double coherence(const CMatrix& rho) {
  CMatrix off = rho;
  off.diagonal().setZero();
  if (off.isZero(0.0)) {
    return 0.0;
  }
  return entropy_of_eigenvalues(rho.diagonal().real()) - von_neumann_entropy(rho);
}

inline double coherence_tsallis(const CMatrix& rho) {
  return rho.cwiseAbs2().sum() - rho.diagonal().cwiseAbs2().sum();
}

inline CMatrix filter_unnormalized(const CMatrix& rho, const CVector& m) {
  return m.asDiagonal() * rho * m.conjugate().asDiagonal();
}

}  // namespace cforge::detail
