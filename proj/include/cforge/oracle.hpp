#pragma once

// Brute-force reference optimizer over diagonal filters. Independent of the
// synthesis routines: it only evaluates filters, never constructs them from
// optimality conditions.

#include <cstdint>
#include <vector>

#include "cforge/statecore.hpp"
#include "cforge/synthesis.hpp"

namespace cforge {

struct OracleOptions {
  double grid_step = 0.02;
  // Admissible |P_S - target| for grid candidates.
  double tolerance = 1e-3;
  // Refinement stops once the move size drops below this.
  double refine_to = 1e-6;
  bool refine = true;
  unsigned threads = 0;
};

struct OracleResult {
  DiagonalFilter filter;       // after refinement
  DiagonalFilter grid_filter;  // best grid point, transmissions on multiples of grid_step
  double objective = 0.0;
  double p_success = 0.0;
  double grid_step = 0.0;
};

/// Output objective of `filter` on `state`: mean energy, coherence (nats) or Tsallis coherence.
double filter_objective(const QState& state, const EnergySpectrum& spectrum, FilterTarget target,
                        const DiagonalFilter& filter);

/// Exhaustive search over transmissions M_j in {0, step, ..., 1}^d within the
/// P_S tolerance band, followed by constraint-preserving coordinate descent.
/// Requires d <= 6. Throws DomainError when no grid point is feasible.
OracleResult grid_search(const QState& state, const EnergySpectrum& spectrum, FilterTarget target, double p_success,
                         const OracleOptions& options = {});

struct VerifySample {
  std::size_t index = 0;
  double p_success = 0.0;
  double synthesized = 0.0;
  double oracle = 0.0;
  double shortfall = 0.0;
};

struct VerifyReport {
  std::vector<VerifySample> samples;
  double max_shortfall = 0.0;
  bool pass = true;
};

inline constexpr double kShortfallTolerance = 1e-3;

/// Re-optimizes randomly chosen frontier points with the grid oracle and
/// reports how far the frontier filters fall short of it.
VerifyReport verify_frontier(const std::vector<FrontierPoint>& points, const QState& state,
                             const EnergySpectrum& spectrum, FilterTarget target, std::size_t samples,
                             const OracleOptions& options = {}, std::uint64_t seed = 20211);

}  // namespace cforge
