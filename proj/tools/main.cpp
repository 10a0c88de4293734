#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "aggbne/experiment.hpp"

namespace {

int dispatch(const std::string& command, const aggbne::ExperimentConfig& config) {
  using namespace aggbne;
  if (command == "run") {
    const ExperimentSummary s = run_experiment(config);
    std::printf("final_oracle_distance %.6g\n", s.final_oracle_distance);
    std::printf("final_consensus_residual %.6g\n", s.final_consensus_residual);
    std::printf("conservation_max %.6g\n", s.conservation_max);
    std::printf("final_exploitability %.6g\n", s.final_epsilon);
    std::printf("artifacts %zu files in %s\n", s.artifacts.size(),
                config.out_dir.c_str());
  } else if (command == "study") {
    const StudySummary s = run_study(config);
    std::printf("N,epsilon,certified_tol,runtime_ms\n");
    for (const auto& row : s.epsilon_rows) {
      std::printf("%d,%.6g,%.2g,%.1f\n", row.N, row.epsilon, row.certified_tol,
                  row.runtime_ms);
    }
    std::printf("refinement gaps:\n");
    for (const auto& row : s.refinement_rows) {
      std::printf("%d,%.6g\n", row.N, row.sup_gap);
    }
  } else if (command == "mixing") {
    const MixingSummary s = run_mixing(config);
    std::printf("products %zu\n", s.deviations.size());
    std::printf("final_deviation %.6g\n",
                s.deviations.empty() ? 0.0 : s.deviations.back());
    std::printf("fitted_gamma %.6g\n", s.fit.gamma);
    std::printf("fitted_beta %.6g\n", s.fit.beta);
    std::printf("empirical_eta %.6g\n", s.min_positive_entry);
  } else {  // verify
    const VerifySummary s = run_verify(config);
    std::printf("max_grad_rel_err %.6g\n", s.model.max_grad_rel_err);
    std::printf("min_monotonicity %.6g\n", s.model.min_monotonicity);
    std::printf("weak_convexity %s\n", s.model.weak_convexity ? "true" : "false");
    std::printf("empirical_eta %.6g\n", s.schedule.min_positive_entry);
    std::printf("count_table_residual %.6g\n", s.count_table_residual);
    std::printf("gradient_rel_err %.6g\n", s.gradient_rel_err);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"epsilon-BNE solver for Bayesian aggregative games"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool print_defaults = false;
  app.add_flag("--print-defaults", print_defaults,
               "print the full default configuration and exit");

  const char* const commands[] = {"run", "study", "mixing", "verify"};
  const char* const descriptions[] = {
      "single experiment: oracle, distributed run, artifacts",
      "epsilon scaling over discretization levels",
      "network mixing diagnostics",
      "invariant suite on a configuration"};
  for (int c = 0; c < 4; ++c) {
    CLI::App* sub = app.add_subcommand(commands[c], descriptions[c]);
    sub->add_option("--config", config_path, "configuration file");
    sub->add_option("--out", out_dir, "output directory override");
    sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
      seed_set = true;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (print_defaults) {
    std::printf("# default configuration (section.key = value, '#' comments)\n%s",
                aggbne::print_config(aggbne::ExperimentConfig{}).c_str());
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::fprintf(stderr, "expected a subcommand: run|study|mixing|verify\n");
    return 2;
  }

  try {
    aggbne::ExperimentConfig config = config_path.empty()
                                          ? aggbne::ExperimentConfig{}
                                          : aggbne::load_config(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (seed_set) config.seed = seed;
    return dispatch(app.get_subcommands().front()->get_name(), config);
  } catch (const aggbne::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const aggbne::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 3;
  } catch (const aggbne::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
