#include "cforge/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "cforge/parallel.hpp"
#include "detail/measures.hpp"

namespace cforge {

namespace {

struct Evaluator {
  const CMatrix& rho;
  RVector pops;
  RVector energies;
  FilterTarget target;

  // Objective of the normalized output for transmissions M (amplitudes sqrt(M)).
  double operator()(const RVector& m) const {
    const CVector amp = m.cwiseMax(0.0).cwiseSqrt().cast<Complex>();
    const CMatrix out = detail::filter_unnormalized(rho, amp);
    const double ps = out.trace().real();
    if (!(ps > 0.0)) return -std::numeric_limits<double>::infinity();
    switch (target) {
      case FilterTarget::Energy:
        return out.diagonal().real().dot(energies) / ps;
      case FilterTarget::Coherence:
        return detail::coherence(out / ps);
      case FilterTarget::CoherenceTsallis:
        break;
    }
    return detail::coherence_tsallis(out / ps);
  }
};

struct Candidate {
  double objective = -std::numeric_limits<double>::infinity();
  std::vector<int> index;

  bool better_than(const Candidate& other) const {
    if (objective != other.objective) return objective > other.objective;
    return !index.empty() && (other.index.empty() || index < other.index);
  }
};

// Depth-first enumeration of grid indices with P_S band pruning.
class GridWalker {
public:
  GridWalker(const Evaluator& eval, const std::vector<double>& values, double lo, double hi)
      : eval_(eval), values_(values), lo_(lo), hi_(hi) {
    const auto d = static_cast<std::size_t>(eval.pops.size());
    suffix_.assign(d + 1, 0.0);
    for (std::size_t j = d; j-- > 0;) {
      suffix_[j] = suffix_[j + 1] + eval.pops(static_cast<Eigen::Index>(j));
    }
    index_.assign(d, 0);
    m_ = RVector::Zero(static_cast<Eigen::Index>(d));
  }

  Candidate run(int first) {
    index_[0] = first;
    m_(0) = values_[static_cast<std::size_t>(first)];
    walk(1, m_(0) * eval_.pops(0));
    return best_;
  }

private:
  void walk(std::size_t depth, double partial) {
    const auto d = index_.size();
    if (partial > hi_ || partial + suffix_[depth] < lo_) return;
    if (depth == d) {
      Candidate c{eval_(m_), index_};
      if (c.better_than(best_)) best_ = std::move(c);
      return;
    }
    const double p = eval_.pops(static_cast<Eigen::Index>(depth));
    for (std::size_t k = 0; k < values_.size(); ++k) {
      index_[depth] = static_cast<int>(k);
      m_(static_cast<Eigen::Index>(depth)) = values_[k];
      walk(depth + 1, partial + values_[k] * p);
    }
  }

  const Evaluator& eval_;
  const std::vector<double>& values_;
  double lo_;
  double hi_;
  std::vector<double> suffix_;
  std::vector<int> index_;
  RVector m_;
  Candidate best_;
};

// Moves the deficit onto the coordinate with the largest population that can absorb it.
bool project(RVector& m, const RVector& pops, double target) {
  const double deficit = target - m.dot(pops);
  int pick = -1;
  for (Eigen::Index j = 0; j < m.size(); ++j) {
    if (pops(j) < kZeroPopulation) continue;
    const double v = m(j) + deficit / pops(j);
    if (v < 0.0 || v > 1.0) continue;
    if (pick < 0 || pops(j) > pops(pick)) pick = static_cast<int>(j);
  }
  if (pick < 0) return false;
  m(pick) += deficit / pops(pick);
  m(pick) = std::clamp(m(pick), 0.0, 1.0);
  return true;
}

// Pairwise moves (M_i += h, M_j -= h p_i / p_j) keep P_S fixed exactly.
void refine(RVector& m, double& value, const Evaluator& eval, double start, double stop) {
  const auto d = m.size();
  for (double h = start; h >= stop; h *= 0.5) {
    for (int pass = 0; pass < 100; ++pass) {
      bool improved = false;
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
          if (i == j || eval.pops(j) < kZeroPopulation) continue;
          for (double s : {h, -h}) {
            RVector trial = m;
            trial(i) += s;
            trial(j) -= s * eval.pops(i) / eval.pops(j);
            if (trial(i) < 0.0 || trial(i) > 1.0 || trial(j) < 0.0 || trial(j) > 1.0) continue;
            const double v = eval(trial);
            if (v > value + 1e-15) {
              m = trial;
              value = v;
              improved = true;
            }
          }
        }
      }
      if (!improved) break;
    }
  }
}

}  // namespace

double filter_objective(const QState& state, const EnergySpectrum& spectrum, FilterTarget target,
                        const DiagonalFilter& filter) {
  const auto out = apply_filter(state, filter);
  switch (target) {
    case FilterTarget::Energy:
      return mean_energy(out.state, spectrum);
    case FilterTarget::Coherence:
      return coherence(out.state);
    case FilterTarget::CoherenceTsallis:
      break;
  }
  return coherence_tsallis(out.state);
}

OracleResult grid_search(const QState& state, const EnergySpectrum& spectrum, FilterTarget target, double p_success,
                         const OracleOptions& options) {
  const std::size_t d = state.dim();
  if (d != spectrum.dim()) throw DimensionError("state and spectrum dimensions differ");
  if (d > 6) throw DomainError("grid oracle supports at most 6 levels");
  if (!(options.grid_step > 0.0 && options.grid_step <= 0.5)) throw DomainError("grid step must lie in (0, 0.5]");
  if (!(options.tolerance > 0.0)) throw DomainError("P_S tolerance must be positive");
  if (!(p_success > 0.0 && p_success <= 1.0)) throw DomainError("success probability must lie in (0, 1]");

  std::vector<double> values;
  const auto steps = static_cast<int>(std::floor(1.0 / options.grid_step + 1e-9));
  for (int k = 0; k <= steps; ++k) values.push_back(std::min(1.0, k * options.grid_step));
  if (values.back() < 1.0 - 1e-12) values.push_back(1.0);
  values.back() = 1.0;

  Evaluator eval{state.matrix(), state.populations(),
                 Eigen::Map<const RVector>(spectrum.levels().data(), static_cast<Eigen::Index>(d)), target};
  const double lo = p_success - options.tolerance;
  const double hi = p_success + options.tolerance;

  auto partials = parallel_map(values.size(), options.threads, [&](std::size_t first) {
    return GridWalker(eval, values, lo, hi).run(static_cast<int>(first));
  });
  Candidate best;
  for (auto& c : partials) {
    if (c.better_than(best)) best = std::move(c);
  }
  if (best.index.empty()) {
    throw DomainError("no grid point within the P_S tolerance; widen the tolerance or refine the grid");
  }

  RVector grid_m(static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j) grid_m(static_cast<Eigen::Index>(j)) = values[static_cast<std::size_t>(best.index[j])];

  RVector m = grid_m;
  double value = best.objective;
  if (options.refine && project(m, eval.pops, p_success)) {
    value = eval(m);
    refine(m, value, eval, 0.5 * options.grid_step, options.refine_to);
  } else {
    m = grid_m;
  }
  return {DiagonalFilter::from_transmissions(m), DiagonalFilter::from_transmissions(grid_m), value,
          m.dot(eval.pops), options.grid_step};
}

VerifyReport verify_frontier(const std::vector<FrontierPoint>& points, const QState& state,
                             const EnergySpectrum& spectrum, FilterTarget target, std::size_t samples,
                             const OracleOptions& options, std::uint64_t seed) {
  VerifyReport report;
  if (points.empty()) return report;
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> picked;
  if (samples >= points.size()) {
    picked = order;
  } else {
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    picked.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(samples));
    std::sort(picked.begin(), picked.end());
  }
  for (auto i : picked) {
    const auto& pt = points[i];
    VerifySample s;
    s.index = i;
    s.p_success = success_probability(state, pt.filter);
    s.synthesized = filter_objective(state, spectrum, target, pt.filter);
    OracleOptions opts = options;
    for (int attempt = 0;; ++attempt) {
      try {
        s.oracle = grid_search(state, spectrum, target, s.p_success, opts).objective;
        break;
      } catch (const DomainError&) {
        if (attempt >= 4) throw;
        opts.tolerance *= 2.0;
      }
    }
    s.shortfall = std::max(0.0, s.oracle - s.synthesized);
    report.max_shortfall = std::max(report.max_shortfall, s.shortfall);
    report.samples.push_back(s);
  }
  report.pass = report.max_shortfall <= kShortfallTolerance;
  return report;
}

}  // namespace cforge
