#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aggbne/aggregation.hpp"
#include "aggbne/network.hpp"
#include "aggbne/verification.hpp"

namespace aggbne {

// Diminishing stepsizes a/(b+t), or an explicit non-increasing table.
struct StepsizeSchedule {
  double a = 2.0;
  double b = 10.0;
  std::optional<std::vector<double>> table;

  double at(long t) const;
  void validate() const;
};

enum class InitRule { kZeros, kMidpoint, kRandomUniform };

InitRule init_rule_from_string(const std::string& name);
std::string to_string(InitRule rule);

// Algorithm state. Estimates v_i live in mean-contribution units: the
// conserved quantity is sum_i v_i = sum_i h_i(sigma_i), so consensus drives
// every estimate to the average contribution.
struct SolverState {
  long t = 0;
  std::vector<Strategy> strategies;
  std::vector<AggregateTable> estimates;      // v_i
  std::vector<AggregateTable> mixed;          // u_i from the latest round
  std::vector<AggregateTable> contributions;  // h_i(sigma_i), cached
  double conservation_max = 0.0;  // running max of ||sum v - sum h||_inf
};

SolverState init_state(const DiscreteGame& game, const AggregationOps& ops,
                       InitRule rule, std::uint64_t seed);

// u_i = sum_j W_ij v_j.
std::vector<AggregateTable> mix_estimates(const SolverState& state,
                                          const WeightMatrix& W);

// Row k = (1/N) sum_z p(z|k) [grad_own + chain * (1/n) grad_agg](x_k, u(z), theta_k).
Strategy bayes_gradient(const Strategy& strategy, const AggregateTable& estimate,
                        const AggregationOps& ops, const TypeGrid& grid,
                        const CostModel& model, int n_players, bool include_chain);

// Componentwise clamp onto the box; idempotent and non-expansive.
Eigen::MatrixXd project_box(const Eigen::MatrixXd& table, const ActionBox& box);

struct StepOptions {
  bool include_chain = true;
  int threads = 1;
};

// One synchronous round: mix, gradient, projected update, tracking update.
// Every player consumes the frozen time-t state. Throws NumericError with the
// iteration index when a non-finite value appears.
void step(SolverState& state, const DiscreteGame& game, const AggregationOps& ops,
          const WeightMatrix& W, double alpha, const StepOptions& options);

struct Probe {
  int player = 0;      // 0-based
  int type_index = 0;  // 0-based
};

struct TraceRow {
  long t = 0;
  double consensus_residual = 0.0;
  double oracle_distance = 0.0;  // NaN when no oracle was supplied
  double stepsize = 0.0;
  std::vector<double> probes;
};

struct RunOptions {
  long T = 50000;
  long record_every = 100;
  std::vector<Probe> probes;
  bool include_chain = true;
  int threads = 1;
  InitRule init = InitRule::kZeros;
  std::uint64_t seed = 0;
};

struct RunResult {
  std::vector<TraceRow> rows;
  double conservation_max = 0.0;
  SolverState state;  // final state
};

RunResult run(const DiscreteGame& game, const GraphSchedule& schedule,
              const StepsizeSchedule& stepsizes, const RunOptions& options,
              const std::optional<std::vector<Strategy>>& oracle = std::nullopt);

// CSV with 17 significant digits:
//   t,consensus_residual,oracle_distance,stepsize,probe_<i>_<k>...
// Probe headers carry the 1-based player and type indices.
void write_trace_csv(const RunResult& result, const std::vector<Probe>& probes,
                     std::ostream& os);

}  // namespace aggbne
