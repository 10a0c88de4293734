#include "aggbne/aggregation.hpp"

#include <cmath>
#include <string>

namespace aggbne {

void check_feasible(const Strategy& strategy, const ActionBox& box, double tol) {
  if (strategy.cols() != box.dim()) {
    throw std::invalid_argument("strategy width does not match the action box");
  }
  for (Eigen::Index k = 0; k < strategy.rows(); ++k) {
    for (Eigen::Index j = 0; j < strategy.cols(); ++j) {
      if (strategy(k, j) < box.lo(j) - tol || strategy(k, j) > box.hi(j) + tol) {
        throw ValidationError("strategy row " + std::to_string(k) +
                              " leaves the action box");
      }
    }
  }
}

AggregationOps build_aggregation_ops(const CountTable& counts) {
  const int n = counts.n_players();
  const int N = counts.N();
  const int S = counts.S();
  AggregationOps ops;
  ops.contrib_op.setZero(S, N);
  ops.cond_avg_rows.setZero(N, S);
  const double rival_total = std::pow(static_cast<double>(N), n - 1);
  for (int z = 0; z < S; ++z) {
    const double cell = counts.count_as_double(n, z);
    for (int k = 0; k < N; ++k) {
      const double rivals = counts.count_as_double(n - 1, z - k);
      ops.contrib_op(z, k) = rivals / cell / n;
      ops.cond_avg_rows(k, z) = rivals / rival_total;
    }
  }
  return ops;
}

AggregateTable contribution(const Strategy& strategy, const CountTable& counts) {
  if (strategy.rows() != counts.N()) {
    throw std::invalid_argument("strategy rows do not match the count table N");
  }
  const int n = counts.n_players();
  AggregateTable out = AggregateTable::Zero(counts.S(), strategy.cols());
  for (int z = 0; z < counts.S(); ++z) {
    const double cell = counts.count_as_double(n, z);
    for (int k = 0; k < counts.N(); ++k) {
      const double w = counts.count_as_double(n - 1, z - k) / cell;
      if (w != 0.0) out.row(z) += w * strategy.row(k);
    }
    out.row(z) /= n;
  }
  return out;
}

AggregateTable full_aggregate(const std::vector<Strategy>& profile,
                              const CountTable& counts) {
  if (static_cast<int>(profile.size()) != counts.n_players()) {
    throw std::invalid_argument("profile size does not match the count table");
  }
  AggregateTable out;
  for (const Strategy& s : profile) {
    if (s.rows() != counts.N() || (out.size() && s.cols() != out.cols())) {
      throw std::invalid_argument("profile strategies must share one grid and width");
    }
    AggregateTable h = contribution(s, counts);
    out = out.size() ? AggregateTable(out + h) : h;
  }
  return out;
}

AggregateTable brute_force_aggregate(const std::vector<Strategy>& profile) {
  const int n = static_cast<int>(profile.size());
  if (n < 1) throw std::invalid_argument("empty profile");
  const int N = static_cast<int>(profile[0].rows());
  const int m = static_cast<int>(profile[0].cols());
  for (const Strategy& s : profile) {
    if (s.rows() != N || s.cols() != m) {
      throw std::invalid_argument("profile strategies must share one grid and width");
    }
  }
  const double tuples = std::pow(static_cast<double>(N), n);
  if (tuples > 1e6) {
    throw std::invalid_argument(
        "brute_force_aggregate refuses N^n > 1e6 tuples; use full_aggregate");
  }

  const int S = n * (N - 1) + 1;
  AggregateTable sums = AggregateTable::Zero(S, m);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(S);
  std::vector<int> idx(n, 0);
  Eigen::RowVectorXd value(m);
  while (true) {
    int z = 0;
    value.setZero();
    for (int i = 0; i < n; ++i) {
      z += idx[i];
      value += profile[i].row(idx[i]);
    }
    sums.row(z) += value / n;
    mass(z) += 1.0;

    int i = n - 1;
    while (i >= 0 && idx[i] == N - 1) idx[i--] = 0;
    if (i < 0) break;
    ++idx[i];
  }
  for (int z = 0; z < S; ++z) sums.row(z) /= mass(z);
  return sums;
}

ConditionalAggregateView conditional_aggregate_view(const AggregateTable& agg,
                                                    const Eigen::VectorXd& own_action,
                                                    int k, const CountTable& counts) {
  if (agg.rows() != counts.S()) {
    throw std::invalid_argument("aggregate rows do not match the count table cells");
  }
  if (own_action.size() != agg.cols()) {
    throw std::invalid_argument("own action width does not match the aggregate");
  }
  return ConditionalAggregateView{counts.conditional_avg_given_own(k), agg};
}

}  // namespace aggbne
