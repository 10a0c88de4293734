#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "aggbne/errors.hpp"

namespace aggbne {

using WeightMatrix = Eigen::MatrixXd;

// Doubly stochastic weights for an undirected edge set: W_ij = 1/(1+max deg)
// on edges, diagonal absorbs the remainder. Self-loops are implicit.
WeightMatrix metropolis_weights(int n, const std::vector<std::pair<int, int>>& edges);

enum class GraphMode { kComplete, kRingStatic, kRoundRobinEdges, kRandomGossip };

// A deterministic generator of weight matrices W(t). Random-gossip rounds mix
// a round-robin spanning backbone with seeded extra edges, so joint
// connectivity over every window holds by construction.
struct GraphSchedule {
  int n = 2;
  GraphMode mode = GraphMode::kComplete;
  std::uint64_t seed = 0;
  int window = 1;        // B: unions over [t, t+B] must be connected
  double eta_floor = 0;  // declared minimum positive entry
  int period = 0;        // deterministic cycling length (round robin)
  int extra_edges = 1;   // random-gossip extra edges per round
};

GraphSchedule make_graph_schedule(int n, GraphMode mode, std::uint64_t seed = 0);

GraphMode graph_mode_from_string(const std::string& name);
std::string to_string(GraphMode mode);

// Pure in (schedule, t): the same arguments give the same matrix bit for bit.
WeightMatrix schedule_at(const GraphSchedule& schedule, long t);

struct ScheduleReport {
  double min_positive_entry = 1.0;  // empirical eta over the horizon
  int horizon = 0;
};

// Checks the weight-matrix invariants at every step and union connectivity
// over every window [t, t+B] up to `horizon`. Throws ValidationError with the
// offending time or window.
ScheduleReport validate_schedule(const GraphSchedule& schedule, int horizon);

// Phi(k, s) = W(k) W(k-1) ... W(s), for 0 <= s < k.
Eigen::MatrixXd transition_product(const GraphSchedule& schedule, long s, long k);

// max_ij |Phi(k,s)_ij - 1/n| for k = s+1 .. horizon.
std::vector<double> mixing_diagnostic(const GraphSchedule& schedule, long s,
                                      long horizon);

struct GeometricFit {
  double gamma = 0.0;
  double beta = 1.0;
};

// Least-squares fit of dev[j] <= gamma * beta^j on the log scale, ignoring
// entries at the floating-point floor. gamma is inflated to dominate the data.
GeometricFit fit_geometric_envelope(const std::vector<double>& deviations);

}  // namespace aggbne
