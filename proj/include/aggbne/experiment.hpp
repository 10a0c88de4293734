#pragma once

#include <string>
#include <vector>

#include "aggbne/config.hpp"
#include "aggbne/verification.hpp"

namespace aggbne {

struct ExperimentSummary {
  double final_oracle_distance = 0.0;
  double final_consensus_residual = 0.0;
  double conservation_max = 0.0;
  double final_epsilon = 0.0;   // exploitability of the final iterate
  double oracle_epsilon = 0.0;  // exploitability certificate of the oracle
  double runtime_ms = 0.0;
  std::vector<std::string> artifacts;
};

// Full pipeline: model validation, schedule validation, central oracle,
// distributed run, exploitability of the final iterate. Writes trace.csv,
// oracle.csv, report.txt and (optionally) convergence.svg + consensus.svg
// into config.out_dir. On a stage failure, flushes a FAILED marker naming the
// stage and rethrows.
ExperimentSummary run_experiment(const ExperimentConfig& config);

struct StudySummary {
  std::vector<EpsilonRow> epsilon_rows;
  std::vector<RefinementRow> refinement_rows;
  std::vector<std::string> artifacts;
};

// Discretization sweep: epsilon table over N_list measured in the N_fine
// model, plus the best-response refinement gaps against the fine-grid
// equilibrium rivals. Writes study.csv and refinement.csv.
StudySummary run_study(const ExperimentConfig& config);

struct MixingSummary {
  std::vector<double> deviations;
  GeometricFit fit;
  double min_positive_entry = 0.0;
  std::vector<std::string> artifacts;
};

// Transition-product diagnostics for the configured schedule. Writes
// mixing.csv (k, deviation), the first period of weight matrices as CSV, and
// a report with the fitted geometric envelope.
MixingSummary run_mixing(const ExperimentConfig& config);

struct VerifySummary {
  ModelValidationReport model;
  ScheduleReport schedule;
  double count_table_residual = 0.0;  // worst probability-identity violation
  double gradient_rel_err = 0.0;      // bayes gradient vs finite differences
  std::vector<std::string> artifacts;
};

// Invariant suite on a config: model probes, schedule checks, count-table
// identities, and a gradient cross-check against the expected-cost oracle.
VerifySummary run_verify(const ExperimentConfig& config);

}  // namespace aggbne
