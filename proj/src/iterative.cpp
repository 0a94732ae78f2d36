#include "cforge/iterative.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "detail/measures.hpp"

namespace cforge {

KrausSet::KrausSet(std::vector<CVector> diagonals) : ops_(std::move(diagonals)) {
  if (ops_.empty()) {
    throw DimensionError("Kraus set must not be empty");
  }
  dim_ = static_cast<std::size_t>(ops_.front().size());
  for (const auto& w : ops_) {
    if (static_cast<std::size_t>(w.size()) != dim_) {
      throw DimensionError("Kraus operators differ in dimension");
    }
  }
  const double excess = completeness().maxCoeff() - 1.0;
  if (excess > kKrausSetTolerance) {
    throw DomainError("Kraus set is not trace decreasing (sum W^dagger W exceeds I by " + std::to_string(excess) +
                      ")");
  }
}

RVector KrausSet::completeness() const {
  RVector total = RVector::Zero(static_cast<Eigen::Index>(dim_));
  for (const auto& w : ops_) {
    total += w.cwiseAbs2();
  }
  return total;
}

CMatrix KrausSet::apply(const CMatrix& rho) const {
  if (static_cast<std::size_t>(rho.rows()) != dim_) {
    throw DimensionError("state dimension does not match the Kraus set");
  }
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& w : ops_) {
    out += detail::filter_unnormalized(rho, w);
  }
  return out;
}

KrausSet reduced_kraus(const DiagonalFilter& filter2q, const QState& partner) {
  const std::size_t d = partner.dim();
  if (filter2q.dim() != d * d) {
    throw DimensionError("two-system filter must have dimension d^2 = " + std::to_string(d * d));
  }
  const RVector weights = partner.populations();
  std::vector<CVector> ops;
  ops.reserve(d);
  for (std::size_t j = 0; j < d; ++j) {
    CVector k(static_cast<Eigen::Index>(d));
    for (std::size_t a = 0; a < d; ++a) {
      k(static_cast<Eigen::Index>(a)) = filter2q[a * d + j];
    }
    ops.push_back(std::sqrt(std::max(0.0, weights(static_cast<Eigen::Index>(j)))) * k);
  }
  return KrausSet(std::move(ops));
}

Composition compose_iteration(const DiagonalFilter& stage1, const DiagonalFilter& stage2, const QState& input) {
  const std::size_t d = input.dim();
  if (stage1.dim() != d * d || stage2.dim() != d * d) {
    throw DimensionError("stage filters must have dimension d^2 = " + std::to_string(d * d));
  }
  // Each reduced operator already carries its sqrt(rho_jj) weight.
  const KrausSet first = reduced_kraus(stage1, input);
  std::vector<CVector> ops;
  ops.reserve(d * d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      ops.push_back(stage2.coeffs().cwiseProduct(kron(first.diagonal(j), first.diagonal(k))));
    }
  }
  KrausSet kraus(std::move(ops));
  CMatrix sigma = kraus.apply(kron(input.matrix(), input.matrix()));
  return {std::move(kraus), std::move(sigma)};
}

SequentialPovm sequential_povm(const KrausSet& kraus) {
  const auto d = static_cast<Eigen::Index>(kraus.dim());
  SequentialPovm povm;
  RVector consumed = RVector::Zero(d);
  for (const auto& w : kraus.diagonals()) {
    CVector plus(d);
    CVector minus(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double remaining = 1.0 - consumed(i);
      const double inv_sqrt = remaining < kPseudoInverseCutoff ? 0.0 : 1.0 / std::sqrt(remaining);
      plus(i) = w(i) * inv_sqrt;
      double rest = 1.0 - std::norm(plus(i));
      if (rest < -kKrausSetTolerance) {
        throw DomainError("sequential measurement stage exceeds the identity");
      }
      minus(i) = std::sqrt(std::max(0.0, rest));
    }
    consumed += w.cwiseAbs2();
    povm.stages.push_back({std::move(plus), std::move(minus)});
  }
  return povm;
}

SequentialOutcome simulate_sequential(const SequentialPovm& povm, const QState& input) {
  if (povm.stages.empty() || povm.dim() != input.dim()) {
    throw DimensionError("measurement sequence and state dimensions differ");
  }
  const auto d = static_cast<Eigen::Index>(input.dim());
  SequentialOutcome out;
  out.unnormalized = CMatrix::Zero(d, d);
  // Product of the minus operators of all earlier stages.
  CVector history = CVector::Ones(d);
  for (const auto& stage : povm.stages) {
    const CMatrix branch = detail::filter_unnormalized(input.matrix(), stage.plus.cwiseProduct(history));
    const double prob = branch.trace().real();
    out.branch_probs.push_back(prob);
    out.unnormalized += branch;
    out.p_total += prob;
    history = history.cwiseProduct(stage.minus);
  }
  out.p_failure = history.cwiseAbs2().dot(input.populations());
  if (out.p_total > 0.0) {
    out.mixture.emplace(out.unnormalized / out.unnormalized.trace().real());
  }
  return out;
}

}  // namespace cforge
