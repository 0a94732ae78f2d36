#include "cforge/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cforge/iterative.hpp"
#include "cforge/optics.hpp"
#include "cforge/oracle.hpp"
#include "cforge/report.hpp"
#include "cforge/serialize.hpp"
#include "cforge/synthesis.hpp"

namespace cforge::cli {

namespace {

struct Common {
  std::string config;
  unsigned threads = 0;
  std::string log_base = "e";
};

double log_base_value(const std::string& name) { return name == "2" ? 2.0 : std::exp(1.0); }

std::string base_label(const std::string& name) { return name == "2" ? "bits" : "nats"; }

QState qubit_pair(double p, double eta) {
  return eta >= 1.0 ? product_pure_state(p, 2) : mixed_qubit_product({p, eta}, 2);
}

std::string join(const CVector& v) {
  std::string s;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (j) s += ' ';
    if (std::abs(v(j).imag()) > 1e-15) {
      s += format_number(v(j).real()) + (v(j).imag() < 0 ? "-" : "+") + format_number(std::abs(v(j).imag())) + "i";
    } else {
      s += format_number(v(j).real());
    }
  }
  return s;
}

void print_measures(std::ostream& out, const QState& state, const EnergySpectrum& spectrum) {
  const double c = coherence(state);
  out << "coherence_nats = " << format_number(c) << '\n';
  out << "coherence_bits = " << format_number(nats_to_base(c, 2.0)) << '\n';
  out << "coherence_tsallis = " << format_number(coherence_tsallis(state)) << '\n';
  out << "mean_energy = " << format_number(mean_energy(state, spectrum)) << '\n';
}

// Largest relative-entropy coherence reachable by one diagonal filter on
// `input` at success probability `ps`, bounded from below by every
// candidate we can construct.
double single_copy_best(const QState& input, double ps, const std::optional<DiagonalFilter>& candidate,
                        double oracle_step, unsigned threads) {
  double best = -1.0;
  if (candidate) {
    best = std::max(best, coherence(apply_filter(input, *candidate).state));
  }
  if (input.is_pure() && !input.is_diagonal()) {
    const double floor = coherence_filter_min_success(input);
    if (ps >= floor) {
      best = std::max(best, coherence(apply_filter(input, coherence_optimal_filter_pure(input, ps)).state));
    } else {
      // Below full equalization the uniform output stays reachable.
      int occupied = 0;
      for (Eigen::Index j = 0; j < input.populations().size(); ++j) occupied += input.populations()(j) >= kZeroPopulation;
      best = std::max(best, std::log(static_cast<double>(occupied)));
    }
  }
  if (oracle_step > 0.0 && input.dim() <= 6) {
    OracleOptions opts;
    opts.grid_step = oracle_step;
    opts.tolerance = std::min(opts.tolerance, 0.5 * ps);
    opts.threads = threads;
    const EnergySpectrum flat(std::vector<double>(input.dim(), 0.0));
    // Grid P_S values form a lattice; widen the band until a point qualifies.
    for (int attempt = 0; attempt < 5; ++attempt, opts.tolerance *= 2.0) {
      try {
        best = std::max(best, grid_search(input, flat, FilterTarget::Coherence, ps, opts).objective);
        break;
      } catch (const DomainError&) {
      }
    }
  }
  return best;
}

int cmd_filter(std::ostream& out, double p, double ps, const std::string& target_name,
               const std::string& mode, double eta, const std::vector<double>& spectrum_levels,
               const std::string& out_path) {
  const FilterTarget target = parse_target(target_name);
  const EnergySpectrum spectrum(spectrum_levels);
  const QState input = qubit_pair(p, eta);
  std::optional<DiagonalFilter> filter;
  if (mode == "closed-form") {
    const auto params = two_qubit_closed_form(p, ps, target);
    out << "a = " << format_number(params.a) << '\n';
    out << "b = " << format_number(params.b) << '\n';
    filter = params.filter();
  } else if (mode == "general") {
    switch (target) {
      case FilterTarget::Energy:
        filter = energy_optimal_filter(input, spectrum, ps);
        break;
      case FilterTarget::Coherence:
        filter = coherence_optimal_filter_pure(input, ps);
        break;
      case FilterTarget::CoherenceTsallis:
        filter = tsallis_optimal_filter(input, ps);
        break;
    }
  } else {
    filter = tsallis_optimal_filter(input, ps);
  }
  const auto result = apply_filter(input, *filter);
  out << "m = " << join(filter->coeffs()) << '\n';
  out << "p_success = " << format_number(result.p_success) << '\n';
  print_measures(out, result.state, spectrum);
  if (!out_path.empty()) {
    nlohmann::json j{{"filter", to_json(*filter)},
                     {"p_success", result.p_success},
                     {"coherence_nats", coherence(result.state)},
                     {"mean_energy", mean_energy(result.state, spectrum)},
                     {"output_state", to_json(result.state)}};
    write_text_file(out_path, j.dump(2) + "\n");
  }
  return kOk;
}

int cmd_frontier(std::ostream& out, const Common& common, double p, double eta, const std::string& target_name,
                 const std::string& family_name, int grid, const std::vector<double>& spectrum_levels,
                 const std::string& csv_path, const std::string& svg_path) {
  const FilterTarget target = parse_target(target_name);
  const EnergySpectrum spectrum(spectrum_levels);
  const QState input = qubit_pair(p, eta);
  std::vector<FrontierPoint> optimal, factorized;
  if (family_name == "optimal" || family_name == "both") {
    optimal = trace_frontier(input, spectrum, target, Family::Optimal, grid, common.threads);
  }
  if (family_name == "factorized" || family_name == "both") {
    factorized = trace_frontier(input, spectrum, target, Family::Factorized, grid, common.threads);
  }
  std::vector<FrontierPoint> all = optimal;
  all.insert(all.end(), factorized.begin(), factorized.end());
  const std::string csv = frontier_csv(all);
  if (!csv_path.empty()) {
    write_text_file(csv_path, csv);
  } else {
    out << csv;
  }
  if (!svg_path.empty()) {
    const bool energy = target == FilterTarget::Energy;
    PlotSpec plot{"p = " + format_number(p) + (eta < 1.0 ? ", eta = " + format_number(eta) : ""), "P_S",
                  energy ? "mean energy" : "coherence (nats)", {}};
    auto add = [&](const std::vector<FrontierPoint>& pts, const std::string& label, const std::string& color) {
      if (pts.empty()) return;
      PlotSeries s{label, color, {}, {}};
      for (const auto& pt : pts) {
        s.x.push_back(pt.p_success);
        s.y.push_back(energy ? pt.mean_energy : pt.coherence);
      }
      plot.series.push_back(std::move(s));
    };
    add(optimal, "optimal", energy ? "#1f77b4" : "#ff7f0e");
    add(factorized, "factorized (a = b^2)", "#2ca02c");
    write_text_file(svg_path, line_plot_svg(plot));
  }
  if (!csv_path.empty()) {
    out << "rows = " << all.size() << '\n';
  }
  return kOk;
}

int cmd_mixed_scan(std::ostream& out, const Common& common, double eta, const std::vector<double>& range, int steps,
                   const std::string& csv_path, bool threshold) {
  if (range.size() != 2 || !(range[0] > 0.0) || !(range[1] < 1.0) || range[0] > range[1]) {
    throw DomainError("--p-range must be two values 0 < lo <= hi < 1");
  }
  if (steps < 2) throw DomainError("--steps must be at least 2");
  std::vector<double> ps;
  for (int i = 0; i < steps; ++i) {
    ps.push_back(range[0] + (range[1] - range[0]) * i / (steps - 1));
  }
  const auto rows = mixed_scan(eta, ps, common.threads);
  const std::string csv = mixed_scan_csv(rows);
  if (!csv_path.empty()) {
    write_text_file(csv_path, csv);
    out << "rows = " << rows.size() << '\n';
  } else {
    out << csv;
  }
  if (threshold) {
    out << "p_threshold = " << format_number(mixed_scan_threshold(eta)) << '\n';
  }
  return kOk;
}

int cmd_iterate(std::ostream& out, const Common& common, double p, double eta, int stages,
                const std::vector<double>& first, const std::vector<double>& second, double oracle_step) {
  if (stages != 1 && stages != 2) throw DomainError("--stages must be 1 or 2");
  if (first.size() != 2 || second.size() != 2) throw DomainError("stage filters take two values a,b");
  const QState rho = mixed_qubit_product({p, eta}, 1);
  const DiagonalFilter f1(std::vector<double>{first[0], first[1], first[1], 1.0});
  const DiagonalFilter f2(std::vector<double>{second[0], second[1], second[1], 1.0});

  std::optional<KrausSet> kraus;
  std::optional<QState> input;
  if (stages == 1) {
    kraus.emplace(reduced_kraus(f1, rho));
    input.emplace(rho);
  } else {
    auto comp = compose_iteration(f1, f2, rho);
    kraus.emplace(std::move(comp.kraus));
    input.emplace(tensor(rho, rho));
  }
  const auto povm = sequential_povm(*kraus);
  const auto sim = simulate_sequential(povm, *input);
  const CMatrix direct = kraus->apply(input->matrix());
  const double residual = (sim.unnormalized - direct).cwiseAbs().maxCoeff();
  double completeness = 0.0;
  for (const auto& st : povm.stages) {
    completeness = std::max(completeness, (st.plus.cwiseAbs2() + st.minus.cwiseAbs2() - RVector::Ones(st.plus.size())).cwiseAbs().maxCoeff());
  }
  out << "stages = " << stages << '\n';
  out << "kraus_operators = " << kraus->size() << '\n';
  out << "p_total = " << format_number(sim.p_total) << '\n';
  out << "p_failure = " << format_number(sim.p_failure) << '\n';
  out << "equivalence_residual = " << format_number(residual) << '\n';
  out << "completeness_residual = " << format_number(completeness) << '\n';
  if (!sim.mixture) {
    out << "result = FAIL (protocol never succeeds)\n";
    return kOk;
  }
  const double c_iter = coherence(*sim.mixture);
  const DiagonalFilter merged = DiagonalFilter::from_transmissions(kraus->completeness().cwiseMin(1.0));
  const double c_single = single_copy_best(*input, sim.p_total, merged, oracle_step, common.threads);
  const double base = log_base_value(common.log_base);
  out << "iterative_coherence_" << base_label(common.log_base) << " = " << format_number(nats_to_base(c_iter, base)) << '\n';
  out << "single_copy_coherence_" << base_label(common.log_base) << " = "
      << format_number(nats_to_base(c_single, base)) << '\n';
  const bool pass = residual <= 1e-10 && completeness <= 1e-10 && c_iter <= c_single + 1e-6;
  out << "result = " << (pass ? "PASS" : "FAIL") << '\n';
  return kOk;
}

int cmd_choi(std::ostream& out, double a, double b, const std::vector<double>& phases, const std::string& out_path) {
  if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0)) throw DomainError("a and b must lie in [0, 1]");
  const DiagonalFilter ideal(std::vector<double>{a, b, b, 1.0});
  std::optional<PhaseProfile> profile;
  if (!phases.empty()) profile = PhaseProfile{phases};
  const ChoiMatrix chi = choi_of_filter(ideal, profile);
  const ChoiMatrix chi_ideal = choi_of_filter(ideal);
  const auto metrics = process_metrics(chi, chi_ideal);
  const auto comp = compensate_phases(chi);
  const auto compensated = process_metrics(comp.chi, chi_ideal);
  out << "purity = " << format_number(metrics.purity) << '\n';
  out << "fidelity = " << format_number(metrics.fidelity) << '\n';
  out << "fidelity_compensated = " << format_number(compensated.fidelity) << '\n';
  out << "phases =";
  for (double ph : comp.profile.phases) out << ' ' << format_number(ph);
  out << '\n';
  if (!out_path.empty()) {
    auto j = matrix_to_json(chi.chi, "choi");
    j["input_dim"] = chi.input_dim;
    write_text_file(out_path, j.dump(2) + "\n");
  }
  return kOk;
}

int cmd_oracle(std::ostream& out, const Common& common, double p, double eta, const std::string& state_path,
               double ps, const std::string& target_name, double step, double tolerance,
               const std::vector<double>& spectrum_levels, const std::vector<double>& against) {
  const FilterTarget target = parse_target(target_name);
  const QState input = state_path.empty() ? qubit_pair(p, eta) : state_from_json(read_json_file(state_path));
  const EnergySpectrum spectrum(spectrum_levels);
  if (input.dim() > 6) throw DomainError("oracle supports d <= 6");
  OracleOptions opts;
  opts.grid_step = step;
  opts.tolerance = tolerance;
  opts.threads = common.threads;
  const auto res = grid_search(input, spectrum, target, ps, opts);

  std::optional<DiagonalFilter> synth;
  if (!against.empty()) {
    synth = DiagonalFilter(against);
  } else {
    switch (target) {
      case FilterTarget::Energy:
        synth = energy_optimal_filter(input, spectrum, ps);
        break;
      case FilterTarget::Coherence:
        synth = coherence_optimal_filter_pure(input, ps);
        break;
      case FilterTarget::CoherenceTsallis:
        synth = tsallis_optimal_filter(input, ps);
        break;
    }
  }
  const double synth_obj = filter_objective(input, spectrum, target, *synth);
  const double shortfall = std::max(0.0, res.objective - synth_obj);
  out << "oracle_filter = " << join(res.filter.coeffs()) << '\n';
  out << "oracle_grid_filter = " << join(res.grid_filter.coeffs()) << '\n';
  out << "oracle_p_success = " << format_number(res.p_success) << '\n';
  out << "oracle_objective = " << format_number(res.objective) << '\n';
  out << "compared_filter = " << join(synth->coeffs()) << '\n';
  out << "compared_p_success = " << format_number(success_probability(input, *synth)) << '\n';
  out << "compared_objective = " << format_number(synth_obj) << '\n';
  out << "shortfall = " << format_number(shortfall) << '\n';
  out << "result = " << (shortfall <= kShortfallTolerance ? "PASS" : "FAIL") << '\n';
  return kOk;
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) throw DomainError("empty entry in list '" + text + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item.substr(first), &used);
    } catch (const std::exception&) {
      throw DomainError("not a number: '" + item + "'");
    }
    if (item.find_first_not_of(" \t", first + used) != std::string::npos) {
      throw DomainError("not a number: '" + item + "'");
    }
    values.push_back(v);
  }
  return values;
}

std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::vector<std::string> tokens;
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DomainError("config line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw DomainError("config line with empty key: " + line);
    tokens.push_back("--" + key);
    tokens.push_back(value);
  }
  return tokens;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal diagonal quantum filters for coherence and energy enhancement", "cforge"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--config", common.config, "Flat key=value file; command-line flags take precedence");
  app.add_option("--threads", common.threads, "Worker threads (default: $COHERENCE_FORGE_THREADS or all cores)");
  app.add_option("--log-base", common.log_base, "Logarithm base for reported coherence")
      ->check(CLI::IsMember({"e", "2"}));

  std::string spectrum_text = "0,1,1,2";
  std::function<int()> action;

  // filter
  double f_p = 0.1, f_ps = 1.0, f_eta = 1.0;
  std::string f_target = "coherence", f_mode = "closed-form", f_out;
  auto* filter = app.add_subcommand("filter", "Synthesize an optimal filter at fixed P_S");
  filter->add_option("--p", f_p, "Excited-state population of each qubit")->required();
  filter->add_option("--ps", f_ps, "Target success probability")->required();
  filter->add_option("--target", f_target)->check(CLI::IsMember({"energy", "coherence", "tsallis"}));
  filter->add_option("--mode", f_mode)->check(CLI::IsMember({"closed-form", "general", "tsallis"}));
  filter->add_option("--eta", f_eta, "Off-diagonal scale of each qubit (1 = pure)");
  filter->add_option("--spectrum", spectrum_text, "Comma-separated energy levels");
  filter->add_option("--out", f_out, "Write the filter and output measures as JSON");
  filter->callback([&] {
    action = [&] {
      return cmd_filter(out, f_p, f_ps, f_target, f_mode, f_eta, parse_list(spectrum_text), f_out);
    };
  });

  // frontier
  double fr_p = 0.1, fr_eta = 1.0;
  int fr_grid = 200;
  std::string fr_target = "coherence", fr_family = "both", fr_csv, fr_svg;
  auto* frontier = app.add_subcommand("frontier", "Trace P_S trade-off curves");
  frontier->add_option("--p", fr_p)->required();
  frontier->add_option("--eta", fr_eta);
  frontier->add_option("--target", fr_target)->check(CLI::IsMember({"energy", "coherence", "tsallis"}));
  frontier->add_option("--family", fr_family)->check(CLI::IsMember({"optimal", "factorized", "both"}));
  frontier->add_option("--grid", fr_grid);
  frontier->add_option("--spectrum", spectrum_text);
  frontier->add_option("--out-csv", fr_csv);
  frontier->add_option("--out-svg", fr_svg);
  frontier->callback([&] {
    action = [&] {
      return cmd_frontier(out, common, fr_p, fr_eta, fr_target, fr_family, fr_grid, parse_list(spectrum_text), fr_csv,
                          fr_svg);
    };
  });

  // mixed-scan
  double ms_eta = 0.75;
  std::string ms_range = "0.05,0.95", ms_csv;
  int ms_steps = 19;
  bool ms_threshold = false;
  auto* scan = app.add_subcommand("mixed-scan", "Optimize the a = 0 family over p for mixed qubit pairs");
  scan->add_option("--eta", ms_eta)->check(CLI::Range(0.0, 1.0));
  scan->add_option("--p-range", ms_range, "lo,hi");
  scan->add_option("--steps", ms_steps);
  scan->add_option("--out-csv", ms_csv);
  scan->add_flag("--threshold", ms_threshold, "Also locate the p above which b = 1 is optimal");
  scan->callback([&] {
    action = [&] { return cmd_mixed_scan(out, common, ms_eta, parse_list(ms_range), ms_steps, ms_csv, ms_threshold); };
  });

  // iterate
  double it_p = 0.1, it_eta = 1.0, it_oracle = 0.02;
  int it_stages = 2;
  std::string it_first = "0,1", it_second;
  auto* iterate = app.add_subcommand("iterate", "Check the iterative protocol against its sequential-measurement form");
  iterate->add_option("--p", it_p)->required();
  iterate->add_option("--eta", it_eta);
  iterate->add_option("--stages", it_stages);
  iterate->add_option("--stage1", it_first, "a,b of the first-stage filter");
  iterate->add_option("--stage2", it_second, "a,b of the second-stage filter (default: stage1)");
  iterate->add_option("--oracle-step", it_oracle, "Grid step of the single-copy oracle (0 disables it)");
  iterate->callback([&] {
    action = [&] {
      const auto s1 = parse_list(it_first);
      const auto s2 = it_second.empty() ? s1 : parse_list(it_second);
      return cmd_iterate(out, common, it_p, it_eta, it_stages, s1, s2, it_oracle);
    };
  });

  // choi
  double ch_a = 1.0, ch_b = 1.0;
  std::string ch_phases, ch_out;
  auto* choi = app.add_subcommand("choi", "Choi matrix and process metrics of a two-qubit filter");
  choi->add_option("--a", ch_a)->required();
  choi->add_option("--b", ch_b)->required();
  choi->add_option("--phases", ch_phases, "Residual phases (radians) of |00>,|01>,|10>,|11>");
  choi->add_option("--out", ch_out, "Write the Choi matrix as JSON");
  choi->callback([&] {
    action = [&] {
      return cmd_choi(out, ch_a, ch_b, ch_phases.empty() ? std::vector<double>{} : parse_list(ch_phases), ch_out);
    };
  });

  // oracle
  double or_p = 0.1, or_eta = 1.0, or_ps = 1.0, or_step = 0.02, or_tol = 1e-3;
  std::string or_state, or_target = "coherence", or_against;
  auto* oracle = app.add_subcommand("oracle", "Brute-force check of the synthesized filter");
  oracle->add_option("--p", or_p);
  oracle->add_option("--eta", or_eta);
  oracle->add_option("--state", or_state, "JSON state file (overrides --p/--eta)");
  oracle->add_option("--ps", or_ps)->required();
  oracle->add_option("--target", or_target)->check(CLI::IsMember({"energy", "coherence", "tsallis"}));
  oracle->add_option("--grid-step", or_step);
  oracle->add_option("--tolerance", or_tol);
  oracle->add_option("--spectrum", spectrum_text);
  oracle->add_option("--against", or_against, "Compare against this filter (comma-separated amplitudes)");
  oracle->callback([&] {
    action = [&] {
      return cmd_oracle(out, common, or_p, or_eta, or_state, or_ps, or_target, or_step, or_tol,
                        parse_list(spectrum_text), or_against.empty() ? std::vector<double>{} : parse_list(or_against));
    };
  });

  try {
    std::vector<std::string> args = raw_args;
    // Config values are inserted right after the subcommand name so that
    // later command-line flags override them.
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--config") {
        auto tokens = config_tokens(args[i + 1]);
        std::size_t at = 0;
        for (std::size_t k = 0; k < args.size(); ++k) {
          if (app.get_subcommand_no_throw(args[k]) != nullptr) {
            at = k + 1;
            break;
          }
        }
        args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), tokens.begin(), tokens.end());
        break;
      }
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << '\n';
      return kUsage;
    }
    return action ? action() : kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  }
}

}  // namespace cforge::cli
