#include "aggbne/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "aggbne/svg.hpp"

namespace fs = std::filesystem;

namespace aggbne {

namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_artifact(const fs::path& path, std::vector<std::string>& artifacts) {
  std::ofstream out(path);
  if (!out) throw NumericError("cannot write '" + path.string() + "'");
  artifacts.push_back(path.string());
  return out;
}

void write_oracle_csv(const std::vector<Strategy>& profile, const TypeGrid& grid,
                      const fs::path& path, std::vector<std::string>& artifacts) {
  std::ofstream out = open_artifact(path, artifacts);
  const int n = static_cast<int>(profile.size());
  const int m = static_cast<int>(profile[0].cols());
  out << "k,theta";
  for (int i = 0; i < n; ++i) {
    if (m == 1) {
      out << ",player" << i + 1;
    } else {
      for (int j = 0; j < m; ++j) out << ",player" << i + 1 << "_c" << j + 1;
    }
  }
  out << "\n";
  for (int k = 0; k < grid.size(); ++k) {
    out << k + 1 << ',' << g17(grid.points(k));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) out << ',' << g17(profile[i](k, j));
    }
    out << "\n";
  }
}

void write_matrix_csv(const Eigen::MatrixXd& M, const fs::path& path,
                      std::vector<std::string>& artifacts) {
  std::ofstream out = open_artifact(path, artifacts);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      out << (j ? "," : "") << g17(M(i, j));
    }
    out << "\n";
  }
}

// Worst violation of the probability identities at the configured (n, N).
double count_table_residual(const CountTable& counts) {
  const int n = counts.n_players();
  const int N = counts.N();
  double worst = 0.0;
  const Eigen::VectorXd avg = counts.avg_type_distribution();
  worst = std::max(worst, std::abs(avg.sum() - 1.0));
  for (int k = 0; k < N; ++k) {
    const Eigen::VectorXd given_own = counts.conditional_avg_given_own(k);
    worst = std::max(worst, std::abs(given_own.sum() - 1.0));
    for (int z = 0; z < counts.S(); ++z) {
      const double bayes =
          avg(z) * counts.conditional_own_given_avg(z)(k) - given_own(z) / N;
      worst = std::max(worst, std::abs(bayes));
    }
  }
  for (int z = 0; z < counts.S(); ++z) {
    worst = std::max(worst,
                     std::abs(counts.conditional_own_given_avg(z).sum() - 1.0));
  }
  return worst;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(config.out_dir);
  const fs::path out_dir(config.out_dir);
  std::string stage = "setup";
  ExperimentSummary summary;
  try {
    const GameSpec spec = config_game_spec(config);
    const GraphSchedule schedule = config_schedule(config);
    const StepsizeSchedule stepsizes = config_stepsizes(config);
    const RunOptions options = config_run_options(config);

    stage = "validate_model";
    validate_model(spec, 64, config.seed ^ 0x5bd1e995u);

    stage = "validate_schedule";
    validate_schedule(schedule, std::max(2 * schedule.window + 2, 50));

    stage = "central_dbne";
    const DiscreteGame game = make_discrete_game(spec);
    const CentralSolveResult oracle = central_dbne(game, 1e-8, 200000);
    summary.oracle_epsilon = oracle.certificate.epsilon;

    stage = "run";
    const RunResult result = run(game, schedule, stepsizes, options, oracle.profile);

    stage = "exploitability";
    const ExploitabilityReport final_report =
        exploitability(result.state.strategies, game, 1e-8);

    stage = "artifacts";
    {
      std::ofstream trace = open_artifact(out_dir / "trace.csv", summary.artifacts);
      write_trace_csv(result, options.probes, trace);
    }
    write_oracle_csv(oracle.profile, game.grid, out_dir / "oracle.csv",
                     summary.artifacts);
    if (config.emit_svg) {
      emit_probe_svg(result.rows, options.probes,
                     (out_dir / "convergence.svg").string());
      summary.artifacts.push_back((out_dir / "convergence.svg").string());
      emit_consensus_svg(result.rows, (out_dir / "consensus.svg").string());
      summary.artifacts.push_back((out_dir / "consensus.svg").string());
    }

    summary.final_oracle_distance = result.rows.back().oracle_distance;
    summary.final_consensus_residual = result.rows.back().consensus_residual;
    summary.conservation_max = result.conservation_max;
    summary.final_epsilon = final_report.epsilon;
    summary.runtime_ms = std::chrono::duration_cast<std::chrono::microseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count() /
                         1000.0;

    std::ofstream report = open_artifact(out_dir / "report.txt", summary.artifacts);
    report << "status: OK\n";
    report << "iterations: " << config.T << "\n";
    report << "final_oracle_distance: " << g17(summary.final_oracle_distance) << "\n";
    report << "final_consensus_residual: "
           << g17(summary.final_consensus_residual) << "\n";
    report << "conservation_max: " << g17(summary.conservation_max) << "\n";
    report << "final_exploitability: " << g17(summary.final_epsilon) << "\n";
    report << "oracle_exploitability: " << g17(summary.oracle_epsilon) << "\n";
    report << "oracle_solve_iterations: " << oracle.iterations << "\n";
    report << "runtime_ms: " << g17(summary.runtime_ms) << "\n";
    return summary;
  } catch (...) {
    std::ofstream marker(out_dir / "FAILED");
    marker << "stage: " << stage << "\n";
    throw;
  }
}

StudySummary run_study(const ExperimentConfig& config) {
  fs::create_directories(config.out_dir);
  const fs::path out_dir(config.out_dir);
  StudySummary summary;

  GameSpec spec = config_game_spec(config);
  summary.epsilon_rows = epsilon_study(spec, config.N_list, config.N_fine, 1e-8);

  GameSpec fine_spec = spec;
  fine_spec.N = config.N_fine;
  const DiscreteGame fine = make_discrete_game(fine_spec);
  const CentralSolveResult fine_oracle = central_dbne(fine, 1e-8, 200000);
  summary.refinement_rows = best_response_refinement_check(
      spec, 0, fine_oracle.profile, config.N_list, config.N_fine);

  {
    std::ofstream out = open_artifact(out_dir / "study.csv", summary.artifacts);
    out << "N,epsilon,certified_tol,runtime_ms\n";
    for (const EpsilonRow& row : summary.epsilon_rows) {
      out << row.N << ',' << g17(row.epsilon) << ',' << g17(row.certified_tol)
          << ',' << g17(row.runtime_ms) << "\n";
    }
  }
  {
    std::ofstream out = open_artifact(out_dir / "refinement.csv", summary.artifacts);
    out << "N,sup_gap\n";
    for (const RefinementRow& row : summary.refinement_rows) {
      out << row.N << ',' << g17(row.sup_gap) << "\n";
    }
  }
  return summary;
}

MixingSummary run_mixing(const ExperimentConfig& config) {
  fs::create_directories(config.out_dir);
  const fs::path out_dir(config.out_dir);
  MixingSummary summary;

  const GraphSchedule schedule = config_schedule(config);
  const ScheduleReport schedule_report =
      validate_schedule(schedule, std::max(2 * schedule.window + 2, 50));
  summary.min_positive_entry = schedule_report.min_positive_entry;
  summary.deviations = mixing_diagnostic(schedule, 0, 200);
  summary.fit = fit_geometric_envelope(summary.deviations);

  {
    std::ofstream out = open_artifact(out_dir / "mixing.csv", summary.artifacts);
    out << "k,deviation\n";
    for (size_t j = 0; j < summary.deviations.size(); ++j) {
      out << j + 1 << ',' << g17(summary.deviations[j]) << "\n";
    }
  }
  const int period = schedule.period > 0 ? schedule.period : schedule.n;
  for (int t = 0; t < period; ++t) {
    write_matrix_csv(schedule_at(schedule, t),
                     out_dir / ("weights_t" + std::to_string(t) + ".csv"),
                     summary.artifacts);
  }
  std::ofstream report = open_artifact(out_dir / "mixing_report.txt",
                                       summary.artifacts);
  report << "mode: " << config.network_mode << "\n";
  report << "empirical_eta: " << g17(summary.min_positive_entry) << "\n";
  report << "fitted_gamma: " << g17(summary.fit.gamma) << "\n";
  report << "fitted_beta: " << g17(summary.fit.beta) << "\n";
  report << "final_deviation: "
         << g17(summary.deviations.empty() ? 0.0 : summary.deviations.back())
         << "\n";
  return summary;
}

VerifySummary run_verify(const ExperimentConfig& config) {
  fs::create_directories(config.out_dir);
  const fs::path out_dir(config.out_dir);
  VerifySummary summary;

  const GameSpec spec = config_game_spec(config);
  summary.model = validate_model(spec, 128, config.seed ^ 0x9e3779b9u);

  const GraphSchedule schedule = config_schedule(config);
  summary.schedule = validate_schedule(schedule, std::max(2 * schedule.window + 2, 50));

  const DiscreteGame game = make_discrete_game(spec);
  summary.count_table_residual = count_table_residual(game.counts);
  if (summary.count_table_residual > 1e-12) {
    throw ValidationError("count table identities violated beyond 1e-12");
  }

  // Cross-check the solver gradient against finite differences of the
  // expected-cost oracle on a random feasible profile.
  std::mt19937_64 rng(config.seed + 17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Strategy> profile;
  for (int i = 0; i < spec.n_players; ++i) {
    Strategy s(spec.N, spec.box.dim());
    for (int k = 0; k < spec.N; ++k) {
      for (int j = 0; j < spec.box.dim(); ++j) {
        s(k, j) = spec.box.lo(j) + (spec.box.hi(j) - spec.box.lo(j)) * unit(rng);
      }
    }
    profile.push_back(std::move(s));
  }
  const AggregationOps ops = build_aggregation_ops(game.counts);
  const double h = 1e-5;
  for (int probe = 0; probe < 8; ++probe) {
    const int i = static_cast<int>(rng() % spec.n_players);
    const int k = static_cast<int>(rng() % spec.N);
    const RivalView rivals = rival_view(i, profile, game.counts);
    // Conditional aggregate view of the profile at own type k.
    AggregateTable view = AggregateTable::Zero(game.counts.S(), spec.box.dim());
    for (int z = 0; z < game.counts.S(); ++z) {
      const int zr = z - k;
      if (zr >= 0 && zr < rivals.mean_rows.rows()) {
        view.row(z) = rivals.mean_rows.row(zr) + profile[i].row(k) / spec.n_players;
      }
    }
    const Strategy grad = bayes_gradient(profile[i], view, ops, game.grid,
                                         *spec.models[i], spec.n_players, true);
    for (int j = 0; j < spec.box.dim(); ++j) {
      Strategy plus = profile[i], minus = profile[i];
      plus(k, j) += h;
      minus(k, j) -= h;
      // The type average carries the same 1/N as the gradient rows.
      const double fd = (expected_cost_against(plus, rivals, game.grid,
                                               *spec.models[i], spec.n_players)
                             .mean -
                         expected_cost_against(minus, rivals, game.grid,
                                               *spec.models[i], spec.n_players)
                             .mean) /
                        (2 * h);
      const double rel = std::abs(fd - grad(k, j)) / std::max(1.0, std::abs(fd));
      summary.gradient_rel_err = std::max(summary.gradient_rel_err, rel);
    }
  }
  if (summary.gradient_rel_err > 1e-5) {
    throw ValidationError("bayes gradient disagrees with the expected-cost oracle");
  }

  std::ofstream report = open_artifact(out_dir / "verify_report.txt",
                                       summary.artifacts);
  report << "status: OK\n";
  report << "max_grad_rel_err: " << g17(summary.model.max_grad_rel_err) << "\n";
  report << "min_monotonicity: " << g17(summary.model.min_monotonicity) << "\n";
  report << "weak_convexity: " << (summary.model.weak_convexity ? "true" : "false")
         << "\n";
  report << "empirical_eta: " << g17(summary.schedule.min_positive_entry) << "\n";
  report << "count_table_residual: " << g17(summary.count_table_residual) << "\n";
  report << "gradient_rel_err: " << g17(summary.gradient_rel_err) << "\n";
  return summary;
}

}  // namespace aggbne
