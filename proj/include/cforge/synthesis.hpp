#pragma once

// Optimal diagonal filters at fixed success probability, trade-off frontiers,
// the two-qubit closed forms and the thermal maximum-coherence benchmark.

#include <string>
#include <vector>

#include "cforge/statecore.hpp"

namespace cforge {

enum class FilterTarget { Energy, Coherence, CoherenceTsallis };
enum class Family { Optimal, Factorized };

std::string to_string(FilterTarget target);
std::string to_string(Family family);
FilterTarget parse_target(const std::string& text);
Family parse_family(const std::string& text);

struct FrontierPoint {
  double p_success = 0.0;
  double coherence = 0.0;  // nats
  double mean_energy = 0.0;
  DiagonalFilter filter;
  Family family = Family::Optimal;
};

/// Two-qubit filter a|00><00| + b(|01><01| + |10><10|) + |11><11|.
struct TwoQubitFilterParams {
  double a = 1.0;
  double b = 1.0;

  DiagonalFilter filter() const { return DiagonalFilter(std::vector<double>{a, b, b, 1.0}); }
};

// Energy classes are degenerate when their levels differ by less than this.
inline constexpr double kDegeneracyTolerance = 1e-9;
// Levels with population below this are left untouched (m_j = 1).
inline constexpr double kZeroPopulation = 1e-14;

/// Smallest P_S the energy-optimal family reaches: population of the
/// highest occupied energy class.
double energy_filter_min_success(const QState& state, const EnergySpectrum& spectrum);

/// Removes the lowest energy classes first: m = 0 below a cut energy, one
/// shared fractional value at the cut, m = 1 above.
DiagonalFilter energy_optimal_filter(const QState& state, const EnergySpectrum& spectrum, double p_success);

/// Smallest P_S of the clipping family (full equalization): n * min_j p_j over occupied levels.
double coherence_filter_min_success(const QState& state);

/// Pure-state coherence optimum M_j = min(K / p_j, 1), K fixed by P_S.
DiagonalFilter coherence_optimal_filter_pure(const QState& state, double p_success);

/// Closed forms for the state (sqrt(1-p)|0> + sqrt(p)|1>)^{(x)2}, p < 1/2.
/// Energy: p^2 <= P_S <= 1. Coherence: 4p^2 <= P_S <= 1.
TwoQubitFilterParams two_qubit_closed_form(double p, double p_success, FilterTarget target);

/// Threshold P_th = p(2 - p) at which the |00> amplitude reaches zero.
inline double two_qubit_threshold(double p) { return p * (2.0 - p); }

/// Maximizes Tr(rho^2) - Tr(rho_D^2) of the output at fixed P_S by
/// enumerating boundary patterns {0, 1, free} and solving the stationarity
/// system for the free transmissions. Supports up to 12 occupied levels.
DiagonalFilter tsallis_optimal_filter(const QState& state, double p_success);

struct ThermalBenchmark {
  QState state;
  double beta = 0.0;
};

/// Pure state with Gibbs populations e^{-beta E_j} / Z at the requested mean energy.
ThermalBenchmark thermal_benchmark_state(const EnergySpectrum& spectrum, double mean_energy);

/// Filters `state` and records the output measures.
FrontierPoint evaluate_filter(const QState& state, const EnergySpectrum& spectrum, const DiagonalFilter& filter,
                              Family family);

/// Samples the trade-off curve on `grid` points sorted by P_S. The optimal
/// family is uniform in P_S over the reachable range; the factorized family
/// is uniform in the single-qubit amplitude b in [0, 1].
std::vector<FrontierPoint> trace_frontier(const QState& state, const EnergySpectrum& spectrum,
                                          FilterTarget target, Family family, int grid, unsigned threads = 0);

struct MixedScanRow {
  double p = 0.0;
  double eta = 0.0;
  double coherence = 0.0;
  double mean_energy = 0.0;
  double b_opt = 0.0;
  double input_coherence = 0.0;
  double input_energy = 0.0;
};

/// Best output coherence of the a = 0 family (0, b, b, 1) on the product of
/// two mixed qubits with parameters (p, eta).
MixedScanRow optimize_a0_family(double eta, double p);

std::vector<MixedScanRow> mixed_scan(double eta, const std::vector<double>& p_values, unsigned threads = 0);

/// Smallest p above which b = 1 is optimal within the a = 0 family.
double mixed_scan_threshold(double eta);

}  // namespace cforge
