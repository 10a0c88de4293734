#pragma once

#include <Eigen/Core>

#include <vector>

#include "aggbne/game_model.hpp"
#include "aggbne/type_space.hpp"

namespace aggbne {

// A discrete strategy: row k is the action taken at type point k (N x m).
using Strategy = Eigen::MatrixXd;
// Values of an aggregate function over the average-type cells (S x m).
using AggregateTable = Eigen::MatrixXd;

// Throws ValidationError when a strategy row leaves the box.
void check_feasible(const Strategy& strategy, const ActionBox& box,
                    double tol = 1e-12);

// Linear operators derived from the count table, cached for hot loops:
//   contrib_op (S x N): contribution = contrib_op * strategy (includes 1/n)
//   cond_avg_rows (N x S): row k = p(cell | own index = k)
struct AggregationOps {
  Eigen::MatrixXd contrib_op;
  Eigen::MatrixXd cond_avg_rows;
};

AggregationOps build_aggregation_ops(const CountTable& counts);

// Player contribution h_i: cell z gets (1/n) * sum_k strategy[k] * p(k | z).
AggregateTable contribution(const Strategy& strategy, const CountTable& counts);

// Full aggregate H = sum_i h_i over a complete profile on the shared grid.
AggregateTable full_aggregate(const std::vector<Strategy>& profile,
                              const CountTable& counts);

// Exact reference: enumerates all N^n index tuples (guarded at 1e6), groups
// them by index sum, and averages the profile mean within each group.
AggregateTable brute_force_aggregate(const std::vector<Strategy>& profile);

// Pairs the conditional cell weights at own index k with the aggregate rows,
// for use in expectation sums. Borrows `agg`; no re-aggregation happens.
struct ConditionalAggregateView {
  Eigen::VectorXd weights;
  const AggregateTable& values;
};

ConditionalAggregateView conditional_aggregate_view(const AggregateTable& agg,
                                                    const Eigen::VectorXd& own_action,
                                                    int k, const CountTable& counts);

}  // namespace aggbne
