#pragma once

// Iterative (two-copy) filtering protocols reduced to mixtures of diagonal
// single-copy filters, and their realization as a sequence of commuting
// two-outcome measurements that stops at the first "plus" outcome.

#include <optional>
#include <vector>

#include "cforge/statecore.hpp"

namespace cforge {

inline constexpr double kKrausSetTolerance = 1e-10;
inline constexpr double kPseudoInverseCutoff = 1e-12;

/// Diagonal Kraus operators W_l stored as their diagonals.
class KrausSet {
public:
  /// Throws DomainError when sum_l W_l^dagger W_l exceeds the identity by more than 1e-10.
  explicit KrausSet(std::vector<CVector> diagonals);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ops_.size(); }
  const CVector& diagonal(std::size_t l) const { return ops_[l]; }
  CMatrix matrix(std::size_t l) const { return ops_[l].asDiagonal(); }
  const std::vector<CVector>& diagonals() const { return ops_; }

  /// Diagonal of sum_l W_l^dagger W_l.
  RVector completeness() const;
  /// sum_l W_l rho W_l^dagger (not normalized).
  CMatrix apply(const CMatrix& rho) const;

private:
  std::size_t dim_ = 0;
  std::vector<CVector> ops_;
};

struct PovmStage {
  CVector plus;   // diagonal of M_{+,l}
  CVector minus;  // diagonal of M_{-,l}
};

struct SequentialPovm {
  std::vector<PovmStage> stages;

  std::size_t dim() const { return stages.empty() ? 0 : static_cast<std::size_t>(stages.front().plus.size()); }
};

/// Operators sqrt(sigma_jj) K_j with K_j = sum_k m_{kj} |k><k|: system A
/// conditioned on filtering the pair (A, partner) with `filter2q`.
/// Index convention |kj> -> k * d + j (A first).
KrausSet reduced_kraus(const DiagonalFilter& filter2q, const QState& partner);

struct Composition {
  KrausSet kraus;  // W_jk = sqrt(rho_jj rho_kk) M'(K_j (x) K_k), row-major in (j, k)
  CMatrix sigma;   // non-normalized two-system output; trace = overall success probability
};

/// Two stages: pairs filtered by `stage1`, one system of each of two pairs
/// re-paired and filtered by `stage2`.
Composition compose_iteration(const DiagonalFilter& stage1, const DiagonalFilter& stage2, const QState& input);

/// M_{+,l} = W_l (I - sum_{m<l} W_m^dagger W_m)^{-1/2} (pseudoinverse),
/// M_{-,l} = (I - M_{+,l}^dagger M_{+,l})^{1/2}.
SequentialPovm sequential_povm(const KrausSet& kraus);

struct SequentialOutcome {
  CMatrix unnormalized;          // sum over plus branches
  std::optional<QState> mixture; // success-conditioned state, absent when p_total = 0
  double p_total = 0.0;
  double p_failure = 0.0;        // probability that every stage returns minus
  std::vector<double> branch_probs;
};

SequentialOutcome simulate_sequential(const SequentialPovm& povm, const QState& input);

}  // namespace cforge
