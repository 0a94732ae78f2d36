// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cforge/iterative.hpp"
#include "cforge/optics.hpp"
#include "cforge/oracle.hpp"
#include "cforge/synthesis.hpp"

using namespace cforge;

namespace {

const EnergySpectrum kTwoQubit = EnergySpectrum::two_qubit();

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double objective(const QState& rho, FilterTarget target, const DiagonalFilter& f) {
  return filter_objective(rho, kTwoQubit, target, f);
}

// Grid candidates sit on a lattice of P_S values; widen the admissible band
// until one qualifies. Refinement then restores the exact P_S.
OracleResult oracle_at(const QState& rho, FilterTarget target, double ps, OracleOptions opts) {
  for (int attempt = 0;; ++attempt) {
    try {
      return grid_search(rho, kTwoQubit, target, ps, opts);
    } catch (const DomainError&) {
      if (attempt >= 4) throw;
      opts.tolerance *= 2.0;
    }
  }
}

// 1. Closed forms against the grid oracle.
Verdict closed_form_vs_oracle() {
  double worst = 0.0;
  int checked = 0;
  for (double p : {0.1, 1.0 / 3.0}) {
    const QState rho = product_pure_state(p, 2);
    const double pth = two_qubit_threshold(p);
    for (auto target : {FilterTarget::Energy, FilterTarget::Coherence}) {
      const bool energy = target == FilterTarget::Energy;
      const double lo = energy ? p * p : 4.0 * p * p;
      const double mid = energy ? pth : pth + p * (1.0 - p);
      std::vector<double> grid;
      for (double f : {0.0, 0.25, 0.5, 0.75}) grid.push_back(lo + (mid - lo) * f);
      for (double f : {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}) grid.push_back(mid + (1.0 - mid) * f);
      for (double ps : grid) {
        const auto closed = two_qubit_closed_form(p, ps, target).filter();
        OracleOptions opts;
        opts.grid_step = 0.02;
        opts.refine_to = 1e-6;
        const auto res = oracle_at(rho, target, ps, opts);
        if (std::abs(res.p_success - ps) > 1e-9) throw DomainError("oracle missed the requested P_S");
        worst = std::max(worst, res.objective - objective(rho, target, closed));
        ++checked;
      }
    }
  }
  return {worst <= 1e-3, std::to_string(checked) + " points, max oracle excess " + sci(worst) + " (tol 1e-3)"};
}

// 2. Uniform output at P_S = 4p^2.
Verdict equalization_point() {
  const QState rho = product_pure_state(0.1, 2);
  const auto out = apply_filter(rho, two_qubit_closed_form(0.1, 0.04, FilterTarget::Coherence).filter());
  const double spread = (out.state.populations().array() - 0.25).abs().maxCoeff();
  const double dc = std::abs(coherence(out.state) - std::log(4.0));
  const auto general = apply_filter(rho, coherence_optimal_filter_pure(rho, 0.04));
  const double dg = std::abs(coherence(general.state) - std::log(4.0));
  const double worst = std::max({spread, dc, dg});
  return {worst <= 1e-9, "population spread " + sci(spread) + ", |C - ln 4| " + sci(std::max(dc, dg)) + " (tol 1e-9)"};
}

// 3. Optimal frontier dominates the factorized one.
Verdict frontier_dominance() {
  const double p = 0.1;
  const QState rho = product_pure_state(p, 2);
  const auto opt = trace_frontier(rho, kTwoQubit, FilterTarget::Coherence, Family::Optimal, 200);
  const auto fac = trace_frontier(rho, kTwoQubit, FilterTarget::Coherence, Family::Factorized, 200);
  // Factorized P_S = ((1-p) b^2 + p)^2 inverts in closed form.
  auto factorized_at = [&](double ps) {
    const double b = std::sqrt(std::max(0.0, (std::sqrt(ps) - p) / (1.0 - p)));
    return coherence(apply_filter(rho, DiagonalFilter(std::vector<double>{b * b, b, b, 1.0})).state);
  };
  auto optimal_at = [&](double ps) {
    return ps < 4.0 * p * p ? std::log(4.0) : coherence(apply_filter(rho, coherence_optimal_filter_pure(rho, ps)).state);
  };
  double worst_deficit = 0.0;
  double best_gap_low = 0.0;
  for (const auto& pt : opt) {
    const double gap = pt.coherence - factorized_at(pt.p_success);
    worst_deficit = std::max(worst_deficit, -gap);
    if (pt.p_success >= 4.0 * p * p && pt.p_success < 0.28) best_gap_low = std::max(best_gap_low, gap);
  }
  for (const auto& pt : fac) {
    const double gap = optimal_at(pt.p_success) - pt.coherence;
    worst_deficit = std::max(worst_deficit, -gap);
    if (pt.p_success >= 4.0 * p * p && pt.p_success < 0.28) best_gap_low = std::max(best_gap_low, gap);
  }
  const bool pass = worst_deficit <= 1e-12 && best_gap_low > 0.01;
  return {pass, "max deficit " + sci(worst_deficit) + ", largest gap for 4p^2 <= P_S < 0.28: " + sci(best_gap_low) +
                    " nats (needs > 0.01)"};
}

// 4. Branch continuity at the thresholds.
Verdict branch_continuity() {
  double worst = 0.0;
  for (double p : {0.1, 0.2, 1.0 / 3.0, 0.45}) {
    const QState rho = product_pure_state(p, 2);
    auto measures = [&](const DiagonalFilter& f) {
      const auto out = apply_filter(rho, f);
      return std::pair{coherence(out.state), mean_energy(out.state, kTwoQubit)};
    };
    const double pth = two_qubit_threshold(p);
    const double be = std::sqrt((pth - p * p) / (2 * p * (1 - p)));
    const auto e1 = measures(two_qubit_closed_form(p, pth, FilterTarget::Energy).filter());
    const auto e2 = measures(DiagonalFilter(std::vector<double>{0.0, be, be, 1.0}));
    const double pc = pth + p * (1 - p);
    const double bc = std::sqrt((pc - p * p) / (3 * p * (1 - p)));
    const auto c1 = measures(two_qubit_closed_form(p, pc, FilterTarget::Coherence).filter());
    const auto c2 = measures(DiagonalFilter(std::vector<double>{bc * std::sqrt(p / (1 - p)), bc, bc, 1.0}));
    worst = std::max({worst, std::abs(e1.first - e2.first), std::abs(e1.second - e2.second),
                      std::abs(c1.first - c2.first), std::abs(c1.second - c2.second)});
  }
  return {worst < 1e-10, "max jump " + sci(worst) + " (tol 1e-10)"};
}

// 5. Mixed-state plateau and threshold.
Verdict mixed_plateau() {
  std::vector<double> ps;
  for (int i = 1; i <= 8; ++i) ps.push_back(0.05 * i);
  double spread = 0.0;
  double min_threshold = 1.0;
  for (double eta : {0.5, 0.75, 1.0}) {
    const auto rows = mixed_scan(eta, ps);
    for (const auto& r : rows) {
      spread = std::max({spread, std::abs(r.coherence - rows.front().coherence),
                         std::abs(r.mean_energy - rows.front().mean_energy)});
    }
    min_threshold = std::min(min_threshold, mixed_scan_threshold(eta));
  }
  const bool pass = spread <= 1e-6 && min_threshold >= 0.5 - 1e-6;
  return {pass, "plateau spread " + sci(spread) + " (tol 1e-6), smallest p_th " + sci(min_threshold) +
                    " (needs >= 0.5, tol 1e-6)"};
}

DiagonalFilter random_filter(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.0, 1.0);
  std::uniform_real_distribution<double> phase(-M_PI, M_PI);
  CVector m(4);
  for (auto& v : m) v = std::polar(mag(rng), phase(rng));
  return DiagonalFilter(m);
}

QState random_qubit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double theta = std::acos(1.0 - 2.0 * u(rng));
  const double phi = 2.0 * M_PI * u(rng);
  const double r = std::cbrt(u(rng));
  CMatrix rho(2, 2);
  const Complex off = 0.5 * r * std::sin(theta) * std::polar(1.0, -phi);
  rho << 0.5 * (1.0 + r * std::cos(theta)), off, std::conj(off), 0.5 * (1.0 - r * std::cos(theta));
  return QState(rho);
}

// 6. Sequential measurement reproduces the Kraus mixture.
Verdict appendix_equivalence() {
  std::mt19937_64 rng(20211);
  double residual = 0.0;
  double completeness = 0.0;
  auto check = [&](const KrausSet& kraus, const QState& input) {
    const auto povm = sequential_povm(kraus);
    const auto sim = simulate_sequential(povm, input);
    residual = std::max(residual, (sim.unnormalized - kraus.apply(input.matrix())).cwiseAbs().maxCoeff());
    for (const auto& st : povm.stages) {
      const RVector sum = st.plus.cwiseAbs2() + st.minus.cwiseAbs2();
      completeness = std::max(completeness, (sum - RVector::Ones(sum.size())).cwiseAbs().maxCoeff());
    }
  };
  std::vector<DiagonalFilter> filters;
  for (int i = 0; i < 20; ++i) filters.push_back(random_filter(rng));
  for (int i = 0; i < 20; ++i) {
    const QState rho = random_qubit(rng);
    check(reduced_kraus(filters[i], rho), rho);
    const auto comp = compose_iteration(filters[i], filters[(i + 1) % 20], rho);
    check(comp.kraus, tensor(rho, rho));
    residual = std::max(residual, (comp.kraus.apply(kron(rho.matrix(), rho.matrix())) - comp.sigma).cwiseAbs().maxCoeff());
  }
  return {residual < 1e-10 && completeness < 1e-10,
          "max residual " + sci(residual) + ", max completeness defect " + sci(completeness) + " (tol 1e-10)"};
}

// 7. Two-stage iteration never beats the best single-copy filter.
Verdict no_advantage() {
  double worst = -1.0;
  int points = 0;
  struct Input {
    double p, eta;
  };
  for (const Input in : {Input{0.1, 1.0}, Input{0.2, 0.8}}) {
    const QState rho = mixed_qubit_product({in.p, in.eta}, 1);
    const QState pair = tensor(rho, rho);
    for (int i = 1; i <= 20; ++i) {
      const double b = 0.05 * i;
      const DiagonalFilter stage(std::vector<double>{0.0, b, b, 1.0});
      const auto comp = compose_iteration(stage, stage, rho);
      const auto sim = simulate_sequential(sequential_povm(comp.kraus), pair);
      const double iterative = coherence(*sim.mixture);
      const double ps = sim.p_total;

      // Single-copy candidates at the same P_S: the oracle optimum, the
      // filter sqrt(sum_l W_l^dagger W_l), and the pure-state optimum.
      OracleOptions opts;
      opts.grid_step = 0.02;
      opts.tolerance = std::min(1e-3, 0.5 * ps);
      double single = oracle_at(pair, FilterTarget::Coherence, ps, opts).objective;
      const auto merged = DiagonalFilter::from_transmissions(comp.kraus.completeness().cwiseMin(1.0));
      single = std::max(single, coherence(apply_filter(pair, merged).state));
      if (pair.is_pure()) {
        const double lo = coherence_filter_min_success(pair);
        single = std::max(single, ps >= lo ? coherence(apply_filter(pair, coherence_optimal_filter_pure(pair, ps)).state)
                                           : std::log(4.0));
      }
      worst = std::max(worst, iterative - single);
      ++points;
    }
  }
  return {worst <= 1e-6, std::to_string(points) + " P_S points, max iterative excess " + sci(worst) + " (tol 1e-6)"};
}

// 8. Choi process metrics.
Verdict choi_metrics() {
  double ideal_dev = 0.0;
  double comp_dev = 0.0;
  bool below_one = true;
  bool improves = true;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ph(-0.5, 0.5);
  for (auto [a, b] : std::vector<std::pair<double, double>>{{0.0, 0.0}, {0.32, 0.8}, {1.0 / 9.0, 1.0 / 3.0}, {1.0, 1.0}}) {
    const DiagonalFilter f(std::vector<double>{a, b, b, 1.0});
    const auto chi = choi_of_filter(f);
    const auto m = process_metrics(chi, chi);
    ideal_dev = std::max({ideal_dev, std::abs(m.purity - 1.0), std::abs(m.fidelity - 1.0)});
    if (b == 0.0) continue;
    for (int k = 0; k < 5; ++k) {
      const PhaseProfile prof{{ph(rng), ph(rng), ph(rng), ph(rng)}};
      const auto noisy = choi_of_filter(f, prof);
      const double before = process_metrics(noisy, chi).fidelity;
      const double after = process_metrics(compensate_phases(noisy).chi, chi).fidelity;
      below_one = below_one && before < 1.0;
      improves = improves && after >= before;
      comp_dev = std::max(comp_dev, std::abs(after - 1.0));
    }
  }
  const bool pass = ideal_dev <= 1e-12 && comp_dev <= 1e-9 && below_one && improves;
  return {pass, "ideal deviation " + sci(ideal_dev) + " (tol 1e-12), compensated deviation " + sci(comp_dev) +
                    " (tol 1e-9), injected F_M < 1: " + (below_one ? "yes" : "no")};
}

// 9. Bare PPBS effective filter.
Verdict optics_model() {
  const auto eff = effective_filter(InterferometerSpec::bare_ppbs(1.0, 1.0 / std::sqrt(3.0)));
  const double da = std::abs(std::abs(eff.filter[0]) - 1.0 / 3.0);
  const double db = std::max(std::abs(std::abs(eff.filter[1]) - 1.0 / std::sqrt(3.0)),
                             std::abs(std::abs(eff.filter[2]) - 1.0 / std::sqrt(3.0)));
  const double dfam = std::abs(std::abs(eff.filter[0]) - std::norm(eff.filter[1]));
  const double worst = std::max({da, db, dfam});
  return {worst <= 1e-12, "|a| error " + sci(da) + ", b error " + sci(db) + ", |a| - b^2 " + sci(dfam) + " (tol 1e-12)"};
}

// 10. Tsallis optimizer on pure states.
Verdict tsallis_reduction() {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    CVector amp(4);
    for (auto& v : amp) v = Complex(g(rng), g(rng));
    const QState rho = QState::pure(amp);
    const double lo = coherence_filter_min_success(rho);
    const double ps = lo + (1.0 - lo) * u(rng);
    const RVector ts = tsallis_optimal_filter(rho, ps).transmissions();
    // Clipping structure: M_j = min(K / p_j, 1).
    const RVector clip = coherence_optimal_filter_pure(rho, ps).transmissions();
    worst = std::max(worst, (ts - clip).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-8, "max transmission difference " + sci(worst) + " over 10 states (tol 1e-8)"};
}

// 11. Thermal benchmark.
Verdict thermal_benchmark() {
  const auto tb = thermal_benchmark_state(EnergySpectrum({0.0, 1.0}), 0.25);
  const double dbeta = std::abs(tb.beta - std::log(3.0));
  const QState rho = product_pure_state(0.1, 2);
  double worst = -1.0;
  int checked = 0;
  for (auto target : {FilterTarget::Energy, FilterTarget::Coherence}) {
    for (auto family : {Family::Optimal, Family::Factorized}) {
      for (const auto& pt : trace_frontier(rho, kTwoQubit, target, family, 200)) {
        if (pt.mean_energy <= 1e-9 || pt.mean_energy >= 2.0 - 1e-9) continue;
        const double bound = coherence(thermal_benchmark_state(kTwoQubit, pt.mean_energy).state);
        worst = std::max(worst, pt.coherence - bound);
        ++checked;
      }
    }
  }
  const bool pass = dbeta <= 1e-9 && worst <= 1e-10;
  return {pass, "|beta - ln 3| " + sci(dbeta) + " (tol 1e-9), max excess over benchmark " + sci(worst) + " on " +
                    std::to_string(checked) + " frontier points"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"closed forms vs grid oracle", closed_form_vs_oracle},
      {"equalization point", equalization_point},
      {"frontier dominance", frontier_dominance},
      {"branch continuity", branch_continuity},
      {"mixed-state plateau", mixed_plateau},
      {"sequential measurement equivalence", appendix_equivalence},
      {"no advantage from iteration", no_advantage},
      {"Choi metrics", choi_metrics},
      {"optics model", optics_model},
      {"Tsallis pure-state reduction", tsallis_reduction},
      {"thermal benchmark", thermal_benchmark},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2zu %-36s %s  %s [%.1fs]\n", i + 1, criteria[i].first.c_str(), v.pass ? "PASS" : "FAIL",
                v.detail.c_str(), secs);
    failures += v.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
