#include "aggbne/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <limits>
#include <ostream>
#include <random>

namespace aggbne {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double conservation_residual(const SolverState& state) {
  AggregateTable diff = state.estimates[0] - state.contributions[0];
  for (size_t i = 1; i < state.estimates.size(); ++i) {
    diff += state.estimates[i] - state.contributions[i];
  }
  return diff.cwiseAbs().maxCoeff();
}

double consensus_residual(const SolverState& state) {
  AggregateTable mean = state.mixed[0];
  for (size_t i = 1; i < state.mixed.size(); ++i) mean += state.mixed[i];
  mean /= static_cast<double>(state.mixed.size());
  double residual = 0.0;
  for (const AggregateTable& u : state.mixed) {
    residual = std::max(residual, (u - mean).norm());
  }
  return residual;
}

void run_per_player(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  // Each player writes only its own preallocated slots, so the result is
  // bit-identical to the sequential order.
  std::vector<std::future<void>> futures;
  futures.reserve(n);
  for (int i = 0; i < n; ++i) {
    futures.push_back(std::async(std::launch::async, body, i));
  }
  for (auto& f : futures) f.get();
}

}  // namespace

double StepsizeSchedule::at(long t) const {
  if (table) {
    const auto& tab = *table;
    const size_t idx = std::min<size_t>(static_cast<size_t>(t), tab.size() - 1);
    return tab[idx];
  }
  return a / (b + static_cast<double>(t));
}

void StepsizeSchedule::validate() const {
  if (table) {
    if (table->empty()) throw ConfigError("stepsize table is empty");
    double prev = std::numeric_limits<double>::infinity();
    for (double v : *table) {
      if (!(v > 0) || v > prev) {
        throw ConfigError("stepsize table must be positive and non-increasing");
      }
      prev = v;
    }
    return;
  }
  if (!(a > 0) || !(b >= 1)) {
    throw ConfigError("stepsize a/(b+t) requires a > 0 and b >= 1");
  }
}

InitRule init_rule_from_string(const std::string& name) {
  if (name == "zeros") return InitRule::kZeros;
  if (name == "midpoint") return InitRule::kMidpoint;
  if (name == "random") return InitRule::kRandomUniform;
  throw ConfigError("unknown init rule '" + name + "' (zeros|midpoint|random)");
}

std::string to_string(InitRule rule) {
  switch (rule) {
    case InitRule::kZeros: return "zeros";
    case InitRule::kMidpoint: return "midpoint";
    case InitRule::kRandomUniform: return "random";
  }
  return "?";
}

SolverState init_state(const DiscreteGame& game, const AggregationOps& ops,
                       InitRule rule, std::uint64_t seed) {
  const int n = game.spec.n_players;
  const int N = game.spec.N;
  const int m = game.spec.box.dim();

  SolverState state;
  state.strategies.reserve(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    Strategy s(N, m);
    switch (rule) {
      case InitRule::kZeros:
        for (int j = 0; j < m; ++j) {
          if (game.spec.box.lo(j) > 0.0 || game.spec.box.hi(j) < 0.0) {
            throw ConfigError("zeros init is infeasible: 0 lies outside the box");
          }
        }
        s.setZero();
        break;
      case InitRule::kMidpoint:
        s = (0.5 * (game.spec.box.lo + game.spec.box.hi)).transpose().replicate(N, 1);
        break;
      case InitRule::kRandomUniform:
        for (int k = 0; k < N; ++k) {
          for (int j = 0; j < m; ++j) {
            s(k, j) = game.spec.box.lo(j) +
                      (game.spec.box.hi(j) - game.spec.box.lo(j)) * unit(rng);
          }
        }
        break;
    }
    state.strategies.push_back(std::move(s));
  }
  for (int i = 0; i < n; ++i) {
    state.contributions.push_back(ops.contrib_op * state.strategies[i]);
    state.estimates.push_back(state.contributions.back());
  }
  state.mixed = state.estimates;
  state.conservation_max = conservation_residual(state);
  return state;
}

std::vector<AggregateTable> mix_estimates(const SolverState& state,
                                          const WeightMatrix& W) {
  const int n = static_cast<int>(state.estimates.size());
  if (W.rows() != n || W.cols() != n) {
    throw std::invalid_argument("mix_estimates: weight matrix does not match n");
  }
  std::vector<AggregateTable> mixed(n);
  for (int i = 0; i < n; ++i) {
    AggregateTable u = W(i, 0) * state.estimates[0];
    for (int j = 1; j < n; ++j) {
      if (W(i, j) != 0.0) u += W(i, j) * state.estimates[j];
    }
    mixed[i] = std::move(u);
  }
  return mixed;
}

Strategy bayes_gradient(const Strategy& strategy, const AggregateTable& estimate,
                        const AggregationOps& ops, const TypeGrid& grid,
                        const CostModel& model, int n_players, bool include_chain) {
  const int N = grid.size();
  if (strategy.rows() != N || estimate.rows() != ops.cond_avg_rows.cols()) {
    throw std::invalid_argument("bayes_gradient: inconsistent table shapes");
  }
  Strategy g(N, strategy.cols());
  Eigen::VectorXd own, agg;
  for (int k = 0; k < N; ++k) {
    model.weighted_grads(strategy.row(k).transpose(), estimate,
                         ops.cond_avg_rows.row(k).transpose(), grid.points(k), own,
                         agg);
    if (include_chain) own += agg / n_players;
    g.row(k) = own.transpose() / N;
  }
  return g;
}

Eigen::MatrixXd project_box(const Eigen::MatrixXd& table, const ActionBox& box) {
  if (table.cols() != box.dim()) {
    throw std::invalid_argument("project_box: table width does not match the box");
  }
  Eigen::MatrixXd out = table;
  for (int j = 0; j < box.dim(); ++j) {
    out.col(j) = out.col(j).cwiseMax(box.lo(j)).cwiseMin(box.hi(j));
  }
  return out;
}

void step(SolverState& state, const DiscreteGame& game, const AggregationOps& ops,
          const WeightMatrix& W, double alpha, const StepOptions& options) {
  if (!(alpha >= 0)) throw std::invalid_argument("step requires alpha >= 0");
  const int n = game.spec.n_players;

  state.mixed = mix_estimates(state, W);
  std::vector<Strategy> next(n);
  std::vector<AggregateTable> next_contrib(n);
  run_per_player(n, options.threads, [&](int i) {
    const Strategy g =
        bayes_gradient(state.strategies[i], state.mixed[i], ops, game.grid,
                       *game.spec.models[i], n, options.include_chain);
    next[i] = project_box(state.strategies[i] - alpha * g, game.spec.box);
    next_contrib[i] = ops.contrib_op * next[i];
  });
  for (int i = 0; i < n; ++i) {
    state.estimates[i] =
        state.mixed[i] - state.contributions[i] + next_contrib[i];
    if (!next[i].allFinite() || !state.estimates[i].allFinite()) {
      throw NumericError("non-finite value at iteration " + std::to_string(state.t));
    }
    state.strategies[i] = std::move(next[i]);
    state.contributions[i] = std::move(next_contrib[i]);
  }
  ++state.t;
  state.conservation_max =
      std::max(state.conservation_max, conservation_residual(state));
}

RunResult run(const DiscreteGame& game, const GraphSchedule& schedule,
              const StepsizeSchedule& stepsizes, const RunOptions& options,
              const std::optional<std::vector<Strategy>>& oracle) {
  if (options.T < 0) throw ConfigError("run requires T >= 0");
  if (options.record_every < 1) throw ConfigError("run requires record_every >= 1");
  stepsizes.validate();
  const int n = game.spec.n_players;
  for (const Probe& p : options.probes) {
    if (p.player < 0 || p.player >= n || p.type_index < 0 ||
        p.type_index >= game.spec.N) {
      throw ConfigError("probe indices out of range");
    }
  }
  if (oracle && static_cast<int>(oracle->size()) != n) {
    throw std::invalid_argument("oracle profile size does not match n_players");
  }

  const AggregationOps ops = build_aggregation_ops(game.counts);
  SolverState state = init_state(game, ops, options.init, options.seed);
  StepOptions step_options{options.include_chain, options.threads};

  RunResult result;
  const auto record = [&](const SolverState& s) {
    TraceRow row;
    row.t = s.t;
    row.consensus_residual = consensus_residual(s);
    if (oracle) {
      double sq = 0.0;
      for (int i = 0; i < n; ++i) sq += (s.strategies[i] - (*oracle)[i]).squaredNorm();
      row.oracle_distance = std::sqrt(sq);
    } else {
      row.oracle_distance = kNaN;
    }
    row.stepsize = stepsizes.at(s.t);
    for (const Probe& p : options.probes) {
      row.probes.push_back(s.strategies[p.player](p.type_index, 0));
    }
    result.rows.push_back(std::move(row));
  };

  record(state);
  for (long t = 0; t < options.T; ++t) {
    const WeightMatrix W = schedule_at(schedule, t);
    step(state, game, ops, W, stepsizes.at(t), step_options);
    if (state.t % options.record_every == 0 || state.t == options.T) {
      record(state);
    }
  }
  result.conservation_max = state.conservation_max;
  result.state = std::move(state);
  return result;
}

void write_trace_csv(const RunResult& result, const std::vector<Probe>& probes,
                     std::ostream& os) {
  os << "t,consensus_residual,oracle_distance,stepsize";
  for (const Probe& p : probes) {
    os << ",probe_" << p.player + 1 << "_" << p.type_index + 1;
  }
  os << "\n";
  char buf[64];
  const auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << ',' << buf;
  };
  for (const TraceRow& row : result.rows) {
    os << row.t;
    put(row.consensus_residual);
    put(row.oracle_distance);
    put(row.stepsize);
    for (double v : row.probes) put(v);
    os << "\n";
  }
}

}  // namespace aggbne
