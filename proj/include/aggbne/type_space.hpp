#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

#include "aggbne/errors.hpp"

namespace aggbne {

// Marginal type distribution on a compact interval.
struct TypeInterval {
  double lower = 0.0;
  double upper = 1.0;
  std::function<double(double)> cdf;  // monotone, cdf(lower)=0, cdf(upper)=1
  bool uniform = false;               // lets grid builders use exact quantiles

  // Endpoint checks plus a monotonicity spot check on `sweep_points` points.
  void validate(int sweep_points = 1000) const;
};

TypeInterval uniform_interval(double lower, double upper);

// Equiprobable grid: points[k] is the (k+1)/N quantile of the marginal, so
// point k represents the half-open cell (points[k-1], points[k]] with
// points[-1] := lower. Type indices are 0-based throughout the library.
struct TypeGrid {
  double lower = 0.0;
  Eigen::VectorXd points;

  int size() const { return static_cast<int>(points.size()); }
  double upper() const { return points(points.size() - 1); }
};

TypeGrid build_uniform_grid(double lower, double upper, int N);

// Inverts the marginal cdf at k/N by bisection to absolute tolerance `tol`.
TypeGrid build_quantile_grid(const TypeInterval& interval, int N, double tol);

// Exact counts c_r(z) of r-tuples of 0-based grid indices summing to z,
// z in [0, r*(N-1)]. Built by iterated discrete convolution. Counts are kept
// exact in 128-bit integers; the 64-bit accessor checks on read.
class CountTable {
 public:
  CountTable(int n_players, int N);

  int n_players() const { return n_players_; }
  int N() const { return N_; }
  // Number of average-type cells: n*(N-1)+1. Cell z collects the index
  // tuples whose 0-based indices sum to z.
  int S() const { return n_players_ * (N_ - 1) + 1; }

  std::uint64_t count(int r, int z) const;
  double count_as_double(int r, int z) const;  // 0 outside [0, r*(N-1)]
  bool fits_u64() const { return fits_u64_; }

  // p(z) = c_n(z)/N^n over all cells.
  Eigen::VectorXd avg_type_distribution() const;
  // p(z | own index = k) = c_{n-1}(z-k)/N^{n-1}; length S; requires n >= 2.
  Eigen::VectorXd conditional_avg_given_own(int k) const;
  // p(own index = k | cell z) = c_{n-1}(z-k)/c_n(z); length N.
  Eigen::VectorXd conditional_own_given_avg(int z) const;

 private:
  int n_players_;
  int N_;
  bool fits_u64_ = true;
  std::vector<std::vector<unsigned __int128>> rows_;
};

CountTable sum_index_counts(int n_players, int N);

// Representative average-type value per cell: the conditional mean of one
// coordinate on the shared grid (exact cell value for affine grids).
Eigen::VectorXd avg_type_points(const TypeGrid& grid, const CountTable& counts);

}  // namespace aggbne
