#include "aggbne/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

namespace aggbne {

namespace {

constexpr double kStochasticTol = 1e-12;

std::vector<std::pair<int, int>> ring_edges(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    if (i < j || n == 1) edges.emplace_back(i, j);
    if (n == 2) break;  // a 2-ring is a single edge
  }
  return edges;
}

std::vector<std::pair<int, int>> edges_at(const GraphSchedule& sched, long t) {
  switch (sched.mode) {
    case GraphMode::kComplete: {
      std::vector<std::pair<int, int>> edges;
      for (int i = 0; i < sched.n; ++i)
        for (int j = i + 1; j < sched.n; ++j) edges.emplace_back(i, j);
      return edges;
    }
    case GraphMode::kRingStatic:
      return ring_edges(sched.n);
    case GraphMode::kRoundRobinEdges: {
      const int period = sched.period > 0 ? sched.period : sched.n;
      const int e = static_cast<int>(t % period) % sched.n;
      return {{e, (e + 1) % sched.n}};
    }
    case GraphMode::kRandomGossip: {
      const int e = static_cast<int>(t % sched.n);
      std::set<std::pair<int, int>> edges;
      const auto insert = [&](int a, int b) {
        if (a != b) edges.emplace(std::min(a, b), std::max(a, b));
      };
      insert(e, (e + 1) % sched.n);
      std::mt19937_64 rng(sched.seed * 0x9E3779B97F4A7C15ULL +
                          static_cast<std::uint64_t>(t) + 1);
      for (int x = 0; x < sched.extra_edges; ++x) {
        insert(static_cast<int>(rng() % sched.n), static_cast<int>(rng() % sched.n));
      }
      return {edges.begin(), edges.end()};
    }
  }
  throw std::invalid_argument("unknown graph mode");
}

bool union_connected(const GraphSchedule& sched, long t0, long t1) {
  std::vector<std::vector<int>> adj(sched.n);
  for (long t = t0; t <= t1; ++t) {
    for (const auto& [a, b] : edges_at(sched, t)) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
  }
  std::vector<char> seen(sched.n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

void check_weight_matrix(const WeightMatrix& W, double eta_floor, long t) {
  const int n = static_cast<int>(W.rows());
  for (int i = 0; i < n; ++i) {
    if (std::abs(W.row(i).sum() - 1.0) > kStochasticTol ||
        std::abs(W.col(i).sum() - 1.0) > kStochasticTol) {
      throw ValidationError("weight matrix at t = " + std::to_string(t) +
                            " is not doubly stochastic");
    }
    if (W(i, i) <= 0.0) {
      throw ValidationError("weight matrix at t = " + std::to_string(t) +
                            " lacks a positive self-loop at node " + std::to_string(i));
    }
    for (int j = 0; j < n; ++j) {
      if (W(i, j) < 0.0) {
        throw ValidationError("negative weight at t = " + std::to_string(t));
      }
      if (W(i, j) > 0.0 && W(i, j) < eta_floor) {
        throw ValidationError("positive weight below the eta floor at t = " +
                              std::to_string(t));
      }
    }
  }
}

}  // namespace

WeightMatrix metropolis_weights(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n < 1) throw ConfigError("metropolis_weights requires n >= 1");
  std::vector<int> deg(n, 0);
  std::set<std::pair<int, int>> unique;
  for (auto [a, b] : edges) {
    if (a == b) continue;
    if (a < 0 || b < 0 || a >= n || b >= n) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (unique.emplace(std::min(a, b), std::max(a, b)).second) {
      ++deg[a];
      ++deg[b];
    }
  }
  WeightMatrix W = WeightMatrix::Zero(n, n);
  for (const auto& [a, b] : unique) {
    const double w = 1.0 / (1.0 + std::max(deg[a], deg[b]));
    W(a, b) = w;
    W(b, a) = w;
  }
  for (int i = 0; i < n; ++i) W(i, i) = 1.0 - W.row(i).sum();
  return W;
}

GraphSchedule make_graph_schedule(int n, GraphMode mode, std::uint64_t seed) {
  if (n < 2) throw ConfigError("graph schedule requires n >= 2");
  GraphSchedule sched;
  sched.n = n;
  sched.mode = mode;
  sched.seed = seed;
  sched.window = (mode == GraphMode::kComplete || mode == GraphMode::kRingStatic)
                     ? 1
                     : n - 1;
  sched.eta_floor = 1.0 / (2.0 * n);
  sched.period = n;
  return sched;
}

GraphMode graph_mode_from_string(const std::string& name) {
  if (name == "complete") return GraphMode::kComplete;
  if (name == "ring-static") return GraphMode::kRingStatic;
  if (name == "round-robin-edges") return GraphMode::kRoundRobinEdges;
  if (name == "random-gossip") return GraphMode::kRandomGossip;
  throw ConfigError("unknown network mode '" + name +
                    "' (complete|ring-static|round-robin-edges|random-gossip)");
}

std::string to_string(GraphMode mode) {
  switch (mode) {
    case GraphMode::kComplete: return "complete";
    case GraphMode::kRingStatic: return "ring-static";
    case GraphMode::kRoundRobinEdges: return "round-robin-edges";
    case GraphMode::kRandomGossip: return "random-gossip";
  }
  return "?";
}

WeightMatrix schedule_at(const GraphSchedule& schedule, long t) {
  if (t < 0) throw std::invalid_argument("schedule_at requires t >= 0");
  return metropolis_weights(schedule.n, edges_at(schedule, t));
}

ScheduleReport validate_schedule(const GraphSchedule& schedule, int horizon) {
  if (horizon < schedule.window) {
    throw ConfigError("validation horizon must cover at least one window");
  }
  ScheduleReport report;
  report.horizon = horizon;
  for (long t = 0; t <= horizon; ++t) {
    const WeightMatrix W = schedule_at(schedule, t);
    check_weight_matrix(W, schedule.eta_floor, t);
    for (int i = 0; i < schedule.n; ++i) {
      for (int j = 0; j < schedule.n; ++j) {
        if (W(i, j) > 0.0) {
          report.min_positive_entry = std::min(report.min_positive_entry, W(i, j));
        }
      }
    }
  }
  for (long t = 0; t + schedule.window <= horizon; ++t) {
    if (!union_connected(schedule, t, t + schedule.window)) {
      throw ValidationError("graph union over window [" + std::to_string(t) + ", " +
                            std::to_string(t + schedule.window) +
                            "] is not connected");
    }
  }
  return report;
}

Eigen::MatrixXd transition_product(const GraphSchedule& schedule, long s, long k) {
  if (s < 0 || s >= k) throw std::invalid_argument("transition_product requires 0 <= s < k");
  Eigen::MatrixXd phi = schedule_at(schedule, s);
  for (long t = s + 1; t <= k; ++t) {
    phi = schedule_at(schedule, t) * phi;
  }
  return phi;
}

std::vector<double> mixing_diagnostic(const GraphSchedule& schedule, long s,
                                      long horizon) {
  if (horizon <= s) throw std::invalid_argument("mixing_diagnostic requires horizon > s");
  const double uniform = 1.0 / schedule.n;
  std::vector<double> deviations;
  Eigen::MatrixXd phi = schedule_at(schedule, s);
  for (long k = s + 1; k <= horizon; ++k) {
    phi = schedule_at(schedule, k) * phi;
    deviations.push_back((phi.array() - uniform).abs().maxCoeff());
  }
  return deviations;
}

GeometricFit fit_geometric_envelope(const std::vector<double>& deviations) {
  // Regress log dev on the step index over entries above the arithmetic floor.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (size_t j = 0; j < deviations.size(); ++j) {
    if (deviations[j] < 1e-14) continue;
    const double x = static_cast<double>(j);
    const double y = std::log(deviations[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  GeometricFit fit;
  if (count < 2) {
    fit.beta = 0.0;
    fit.gamma = deviations.empty() ? 0.0 : deviations.front();
    return fit;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / count;
  fit.beta = std::exp(slope);
  fit.gamma = std::exp(intercept);
  // Inflate gamma until the envelope dominates every sample.
  for (size_t j = 0; j < deviations.size(); ++j) {
    const double envelope = fit.gamma * std::pow(fit.beta, static_cast<double>(j));
    if (envelope < deviations[j]) fit.gamma *= deviations[j] / envelope;
  }
  return fit;
}

}  // namespace aggbne
