#include "cforge/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "cforge/parallel.hpp"
#include "detail/measures.hpp"

namespace cforge {

namespace {

constexpr double kPsSlack = 1e-12;

void require_success_probability(double ps) {
  if (!(ps > 0.0) || ps > 1.0 + kPsSlack) {
    throw DomainError("success probability must lie in (0, 1]");
  }
}

// Indices of occupied levels grouped into degenerate energy classes, lowest energy first.
std::vector<std::vector<std::size_t>> energy_classes(const RVector& pops, const EnergySpectrum& spectrum) {
  std::vector<std::vector<std::size_t>> classes;
  double class_energy = 0.0;
  for (std::size_t j = 0; j < spectrum.dim(); ++j) {
    if (classes.empty() || spectrum[j] - class_energy > kDegeneracyTolerance) {
      classes.emplace_back();
      class_energy = spectrum[j];
    }
    if (pops(static_cast<Eigen::Index>(j)) >= kZeroPopulation) {
      classes.back().push_back(j);
    }
  }
  std::erase_if(classes, [](const auto& c) { return c.empty(); });
  return classes;
}

double class_population(const RVector& pops, const std::vector<std::size_t>& cls) {
  double s = 0.0;
  for (auto j : cls) {
    s += pops(static_cast<Eigen::Index>(j));
  }
  return s;
}

std::vector<double> occupied_populations(const RVector& pops) {
  std::vector<double> out;
  for (Eigen::Index j = 0; j < pops.size(); ++j) {
    if (pops(j) >= kZeroPopulation) {
      out.push_back(pops(j));
    }
  }
  return out;
}

}  // namespace

std::string to_string(FilterTarget target) {
  switch (target) {
    case FilterTarget::Energy:
      return "energy";
    case FilterTarget::Coherence:
      return "coherence";
    case FilterTarget::CoherenceTsallis:
      return "tsallis";
  }
  return "?";
}

std::string to_string(Family family) { return family == Family::Optimal ? "optimal" : "factorized"; }

FilterTarget parse_target(const std::string& text) {
  if (text == "energy") return FilterTarget::Energy;
  if (text == "coherence") return FilterTarget::Coherence;
  if (text == "tsallis" || text == "coherence-tsallis") return FilterTarget::CoherenceTsallis;
  throw DomainError("unknown target '" + text + "' (energy, coherence, tsallis)");
}

Family parse_family(const std::string& text) {
  if (text == "optimal") return Family::Optimal;
  if (text == "factorized") return Family::Factorized;
  throw DomainError("unknown family '" + text + "' (optimal, factorized)");
}

double energy_filter_min_success(const QState& state, const EnergySpectrum& spectrum) {
  if (state.dim() != spectrum.dim()) {
    throw DimensionError("state and spectrum dimensions differ");
  }
  const RVector pops = state.populations();
  const auto classes = energy_classes(pops, spectrum);
  return class_population(pops, classes.back());
}

DiagonalFilter energy_optimal_filter(const QState& state, const EnergySpectrum& spectrum, double p_success) {
  require_success_probability(p_success);
  const double minimum = energy_filter_min_success(state, spectrum);
  if (p_success < minimum - kPsSlack) {
    throw DomainError("P_S " + std::to_string(p_success) + " below the energy-family minimum " +
                      std::to_string(minimum));
  }
  const RVector pops = state.populations();
  const auto classes = energy_classes(pops, spectrum);

  RVector transmissions = RVector::Ones(static_cast<Eigen::Index>(state.dim()));
  double kept = 0.0;
  bool cut = false;
  for (auto it = classes.rbegin(); it != classes.rend(); ++it) {
    const double pc = class_population(pops, *it);
    double value = 1.0;
    if (cut) {
      value = 0.0;
    } else if (p_success <= kept + pc + kPsSlack) {
      value = std::clamp((p_success - kept) / pc, 0.0, 1.0);
      cut = true;
    }
    kept += pc;
    for (auto j : *it) {
      transmissions(static_cast<Eigen::Index>(j)) = value;
    }
  }
  return DiagonalFilter::from_transmissions(transmissions);
}

double coherence_filter_min_success(const QState& state) {
  const auto occ = occupied_populations(state.populations());
  return static_cast<double>(occ.size()) * *std::min_element(occ.begin(), occ.end());
}

DiagonalFilter coherence_optimal_filter_pure(const QState& state, double p_success) {
  require_success_probability(p_success);
  if (!state.is_pure()) {
    throw DomainError("closed-form coherence optimum needs a pure input; use the Tsallis optimizer for mixed states");
  }
  const RVector pops = state.populations();
  std::vector<double> sorted = occupied_populations(pops);
  if (sorted.size() < 2) {
    throw DomainError("input occupies a single level and carries no coherence");
  }
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const std::size_t n = sorted.size();
  const double minimum = static_cast<double>(n) * sorted.back();
  if (p_success < minimum - kPsSlack) {
    throw DomainError("P_S " + std::to_string(p_success) + " below full equalization at " + std::to_string(minimum));
  }

  // P_S(K) = sum_j min(K, p_j) is piecewise linear; with the i largest
  // populations clipped, K = (P_S - tail) / i on [p_(i+1), p_(i)].
  double tail = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  double level = sorted.front();
  for (std::size_t i = 1; i <= n; ++i) {
    tail -= sorted[i - 1];
    const double k = (p_success - tail) / static_cast<double>(i);
    const double lower = i < n ? sorted[i] : 0.0;
    if (k >= lower - kPsSlack || i == n) {
      level = std::clamp(k, lower, sorted[i - 1]);
      break;
    }
  }

  RVector transmissions = RVector::Ones(pops.size());
  for (Eigen::Index j = 0; j < pops.size(); ++j) {
    if (pops(j) >= kZeroPopulation) {
      transmissions(j) = std::min(level / pops(j), 1.0);
    }
  }
  return DiagonalFilter::from_transmissions(transmissions);
}

TwoQubitFilterParams two_qubit_closed_form(double p, double p_success, FilterTarget target) {
  if (!(p > 0.0 && p < 0.5)) {
    throw DomainError("closed forms require 0 < p < 0.5");
  }
  if (!(p_success <= 1.0 + kPsSlack)) {
    throw DomainError("P_S above 1");
  }
  const double q = 1.0 - p;
  const double threshold = two_qubit_threshold(p);
  switch (target) {
    case FilterTarget::Energy: {
      if (p_success < p * p - kPsSlack) {
        throw DomainError("P_S below p² = " + std::to_string(p * p));
      }
      if (p_success >= threshold) {
        return {std::sqrt(p_success - threshold) / q, 1.0};
      }
      return {0.0, std::sqrt(std::max(0.0, p_success - p * p) / (2.0 * p * q))};
    }
    case FilterTarget::Coherence: {
      if (p_success < 4.0 * p * p - kPsSlack) {
        throw DomainError("P_S below 4p² = " + std::to_string(4.0 * p * p));
      }
      if (p_success >= threshold + p * q) {
        return {std::sqrt(p_success - threshold) / q, 1.0};
      }
      const double b = std::sqrt(std::max(0.0, p_success - p * p) / (3.0 * p * q));
      return {b * std::sqrt(p / q), b};
    }
    case FilterTarget::CoherenceTsallis:
      break;
  }
  throw DomainError("no two-qubit closed form for the Tsallis target");
}

DiagonalFilter tsallis_optimal_filter(const QState& state, double p_success) {
  require_success_probability(p_success);
  if (state.is_diagonal()) {
    throw DomainError("input is incoherent; no coherence to enhance");
  }
  const RVector pops = state.populations();
  std::vector<Eigen::Index> occ;
  for (Eigen::Index j = 0; j < pops.size(); ++j) {
    if (pops(j) >= kZeroPopulation) {
      occ.push_back(j);
    }
  }
  const auto n = static_cast<Eigen::Index>(occ.size());
  if (n > 12) {
    throw DomainError("Tsallis optimizer supports at most 12 occupied levels");
  }

  // Objective numerator P_S^2 * C~ = M^T A M with A_jk = |rho_jk|^2 off the diagonal.
  Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(n, n);
  RVector r(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    r(a) = pops(occ[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a != b) {
        coupling(a, b) = std::norm(state(static_cast<std::size_t>(occ[static_cast<std::size_t>(a)]),
                                         static_cast<std::size_t>(occ[static_cast<std::size_t>(b)])));
      }
    }
  }

  long patterns = 1;
  for (Eigen::Index k = 0; k < n; ++k) patterns *= 3;

  RVector best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (long pattern = 0; pattern < patterns; ++pattern) {
    long rest = pattern;
    std::vector<Eigen::Index> free;
    RVector m = RVector::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const int c = static_cast<int>(rest % 3);
      rest /= 3;
      if (c == 1) {
        m(k) = 1.0;
      } else if (c == 2) {
        free.push_back(k);
      }
    }
    const double remaining = p_success - r.dot(m);
    if (free.empty()) {
      if (std::abs(remaining) > kPsSlack) continue;
    } else {
      // Stationarity 2 (A M)_j - lambda r_j = 0 on the free set, plus the P_S constraint.
      const auto f = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(f + 1, f + 1);
      RVector rhs = RVector::Zero(f + 1);
      const RVector fixed_field = coupling * m;
      for (Eigen::Index a = 0; a < f; ++a) {
        for (Eigen::Index b = 0; b < f; ++b) {
          kkt(a, b) = 2.0 * coupling(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
        }
        kkt(a, f) = -r(free[static_cast<std::size_t>(a)]);
        kkt(f, a) = r(free[static_cast<std::size_t>(a)]);
        rhs(a) = -2.0 * fixed_field(free[static_cast<std::size_t>(a)]);
      }
      rhs(f) = remaining;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
      RVector sol;
      if (lu.isInvertible()) {
        sol = lu.solve(rhs);
      } else {
        // Objective is constant on the affine solution set; the minimum-norm point represents it.
        sol = kkt.completeOrthogonalDecomposition().solve(rhs);
        if ((kkt * sol - rhs).norm() > 1e-10) continue;
      }
      bool feasible = true;
      for (Eigen::Index a = 0; a < f; ++a) {
        const double v = sol(a);
        if (v < -1e-12 || v > 1.0 + 1e-12) {
          feasible = false;
          break;
        }
        m(free[static_cast<std::size_t>(a)]) = std::clamp(v, 0.0, 1.0);
      }
      if (!feasible) continue;
    }
    const double value = m.dot(coupling * m);
    if (value > best_value + 1e-15) {
      best_value = value;
      best = m;
    }
  }
  if (best.size() == 0) {
    throw DomainError("no feasible filter reaches P_S " + std::to_string(p_success));
  }
  RVector transmissions = RVector::Ones(pops.size());
  for (Eigen::Index a = 0; a < n; ++a) {
    transmissions(occ[static_cast<std::size_t>(a)]) = best(a);
  }
  return DiagonalFilter::from_transmissions(transmissions);
}

ThermalBenchmark thermal_benchmark_state(const EnergySpectrum& spectrum, double mean_energy) {
  const auto& levels = spectrum.levels();
  const double e_min = levels.front();
  const double e_max = levels.back();
  if (!(mean_energy > e_min && mean_energy < e_max)) {
    throw DomainError("mean energy must lie strictly between the lowest and highest level");
  }
  auto weights = [&](double beta) {
    // Shift by the dominant level to keep the exponentials bounded.
    const double shift = beta >= 0.0 ? e_min : e_max;
    RVector w(static_cast<Eigen::Index>(levels.size()));
    for (std::size_t j = 0; j < levels.size(); ++j) {
      w(static_cast<Eigen::Index>(j)) = std::exp(-beta * (levels[j] - shift));
    }
    return RVector(w / w.sum());
  };
  auto energy_at = [&](double beta) {
    return weights(beta).dot(Eigen::Map<const RVector>(levels.data(), static_cast<Eigen::Index>(levels.size())));
  };
  auto residual = [&](double beta) { return energy_at(beta) - mean_energy; };

  // Mean energy decreases monotonically in beta.
  double lo = -1.0;
  double hi = 1.0;
  while (residual(lo) < 0.0) {
    hi = lo;
    lo *= 2.0;
    if (lo < -1e8) throw DomainError("mean energy too close to the top level");
  }
  while (residual(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) throw DomainError("mean energy too close to the ground level");
  }
  double beta = 0.0;
  if (residual(0.0) == 0.0) {
    beta = 0.0;
  } else {
    std::uintmax_t iterations = 200;
    const auto bracket = boost::math::tools::toms748_solve(
        residual, lo, hi, boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2),
        iterations);
    beta = 0.5 * (bracket.first + bracket.second);
  }
  const RVector p = weights(beta);
  return {QState::pure(p.cwiseSqrt().cast<Complex>()), beta};
}

FrontierPoint evaluate_filter(const QState& state, const EnergySpectrum& spectrum, const DiagonalFilter& filter,
                              Family family) {
  const auto out = apply_filter(state, filter);
  return {out.p_success, coherence(out.state), mean_energy(out.state, spectrum), filter, family};
}

std::vector<FrontierPoint> trace_frontier(const QState& state, const EnergySpectrum& spectrum, FilterTarget target,
                                          Family family, int grid, unsigned threads) {
  if (grid < 2) {
    throw DomainError("frontier grid needs at least 2 points");
  }
  if (state.dim() != spectrum.dim()) {
    throw DimensionError("state and spectrum dimensions differ");
  }
  const auto count = static_cast<std::size_t>(grid);
  std::vector<FrontierPoint> points;

  if (family == Family::Factorized) {
    std::size_t n_qubits = 0;
    for (std::size_t d = state.dim(); d > 1; d /= 2) {
      if (d % 2 != 0) throw DimensionError("factorized family needs a multi-qubit state (dimension 2^n)");
      ++n_qubits;
    }
    auto build = [&](std::size_t i) -> std::optional<FrontierPoint> {
      const double b = static_cast<double>(i) / static_cast<double>(count - 1);
      DiagonalFilter single(std::vector<double>{b, 1.0});
      DiagonalFilter f = single;
      for (std::size_t k = 1; k < n_qubits; ++k) f = tensor_filter(f, single);
      if (!(success_probability(state, f) > 0.0)) return std::nullopt;
      return evaluate_filter(state, spectrum, f, Family::Factorized);
    };
    for (auto& p : parallel_map(count, threads, build)) {
      if (p) points.push_back(std::move(*p));
    }
  } else {
    double lo = 0.0;
    switch (target) {
      case FilterTarget::Energy:
        lo = energy_filter_min_success(state, spectrum);
        break;
      case FilterTarget::Coherence:
      case FilterTarget::CoherenceTsallis:
        lo = coherence_filter_min_success(state);
        break;
    }
    if (1.0 - lo < 1e-12) {
      throw DomainError("empty reachable P_S range for this target");
    }
    auto build = [&](std::size_t i) {
      const double ps = i + 1 == count ? 1.0 : lo + (1.0 - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
      switch (target) {
        case FilterTarget::Energy:
          return evaluate_filter(state, spectrum, energy_optimal_filter(state, spectrum, ps), Family::Optimal);
        case FilterTarget::Coherence:
          return evaluate_filter(state, spectrum, coherence_optimal_filter_pure(state, ps), Family::Optimal);
        case FilterTarget::CoherenceTsallis:
          break;
      }
      return evaluate_filter(state, spectrum, tsallis_optimal_filter(state, ps), Family::Optimal);
    };
    points = parallel_map(count, threads, build);
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const FrontierPoint& x, const FrontierPoint& y) { return x.p_success < y.p_success; });
  return points;
}

namespace {

double a0_family_coherence(const QState& state, double b) {
  CVector m(4);
  m << 0.0, b, b, 1.0;
  const CMatrix out = detail::filter_unnormalized(state.matrix(), m);
  return detail::coherence(out / out.trace().real());
}

}  // namespace

MixedScanRow optimize_a0_family(double eta, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("p must lie in (0, 1)");
  }
  const QState input = mixed_qubit_product({p, eta}, 2);
  const EnergySpectrum spectrum = EnergySpectrum::two_qubit();

  // Coarse scan from b = 1 downwards (ties keep the larger P_S), then a
  // bracketed Brent refinement around the best sample.
  constexpr int kCoarse = 200;
  int best_i = kCoarse;
  double best_c = a0_family_coherence(input, 1.0);
  for (int i = kCoarse - 1; i >= 0; --i) {
    const double c = a0_family_coherence(input, static_cast<double>(i) / kCoarse);
    if (c > best_c + 1e-14) {
      best_c = c;
      best_i = i;
    }
  }
  double b_opt = static_cast<double>(best_i) / kCoarse;
  if (best_i > 0 && best_i < kCoarse) {
    std::uintmax_t iterations = 500;
    const auto found = boost::math::tools::brent_find_minima(
        [&](double b) { return -a0_family_coherence(input, b); }, static_cast<double>(best_i - 1) / kCoarse,
        static_cast<double>(best_i + 1) / kCoarse, std::numeric_limits<double>::digits / 2 + 2, iterations);
    if (-found.second > best_c) {
      b_opt = found.first;
    }
  } else if (best_i == kCoarse) {
    std::uintmax_t iterations = 500;
    const auto found = boost::math::tools::brent_find_minima(
        [&](double b) { return -a0_family_coherence(input, b); }, 1.0 - 1.0 / kCoarse, 1.0,
        std::numeric_limits<double>::digits / 2 + 2, iterations);
    if (-found.second > best_c + 1e-15) {
      b_opt = found.first;
    }
  }
  const auto out = apply_filter(input, DiagonalFilter(std::vector<double>{0.0, b_opt, b_opt, 1.0}));
  return {p,
          eta,
          coherence(out.state),
          mean_energy(out.state, spectrum),
          b_opt,
          coherence(input),
          mean_energy(input, spectrum)};
}

std::vector<MixedScanRow> mixed_scan(double eta, const std::vector<double>& p_values, unsigned threads) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw DomainError("eta must lie in [0, 1]");
  }
  return parallel_map(p_values.size(), threads, [&](std::size_t i) { return optimize_a0_family(eta, p_values[i]); });
}

double mixed_scan_threshold(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw DomainError("eta must lie in [0, 1]");
  }
  // b = 1 is optimal once the coherence stops increasing towards b = 1.
  constexpr double kStep = 1e-7;
  auto saturated = [&](double p) {
    const QState input = mixed_qubit_product({p, eta}, 2);
    return a0_family_coherence(input, 1.0) >= a0_family_coherence(input, 1.0 - kStep);
  };
  double lo = 1e-3;
  double hi = 1.0 - 1e-3;
  if (saturated(lo)) return lo;
  if (!saturated(hi)) return hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (saturated(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace cforge
