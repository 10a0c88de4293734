#include "aggbne/type_space.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace aggbne {

namespace {

constexpr double kEndpointTol = 1e-9;

unsigned __int128 checked_add(unsigned __int128 a, unsigned __int128 b) {
  unsigned __int128 s = a + b;
  if (s < a) {
    throw NumericError(
        "count table overflow: counts exceed the exact integer range; "
        "reduce N or n_players");
  }
  return s;
}

}  // namespace

void TypeInterval::validate(int sweep_points) const {
  if (!(lower < upper)) {
    throw ConfigError("type interval requires lower < upper, got [" +
                      std::to_string(lower) + ", " + std::to_string(upper) + "]");
  }
  if (!cdf) throw ConfigError("type interval has no cdf");
  if (std::abs(cdf(lower)) > kEndpointTol || std::abs(cdf(upper) - 1.0) > kEndpointTol) {
    throw ValidationError("cdf endpoints must satisfy cdf(lower)=0, cdf(upper)=1");
  }
  double prev = cdf(lower);
  for (int i = 1; i <= sweep_points; ++i) {
    const double t = lower + (upper - lower) * i / sweep_points;
    const double c = cdf(t);
    if (c < prev - 1e-12) {
      throw ValidationError("cdf is decreasing near t = " + std::to_string(t));
    }
    prev = c;
  }
}

TypeInterval uniform_interval(double lower, double upper) {
  TypeInterval iv;
  iv.lower = lower;
  iv.upper = upper;
  iv.cdf = [lower, upper](double t) { return (t - lower) / (upper - lower); };
  iv.uniform = true;
  return iv;
}

TypeGrid build_uniform_grid(double lower, double upper, int N) {
  if (!(lower < upper) || N < 1) {
    throw ConfigError("uniform grid requires lower < upper and N >= 1");
  }
  TypeGrid grid;
  grid.lower = lower;
  grid.points.resize(N);
  for (int k = 0; k < N; ++k) {
    grid.points(k) = lower + (upper - lower) * (k + 1) / N;
  }
  return grid;
}

TypeGrid build_quantile_grid(const TypeInterval& interval, int N, double tol) {
  if (N < 1) throw ConfigError("quantile grid requires N >= 1");
  if (!(tol > 0)) throw ConfigError("quantile grid requires tol > 0");
  if (!(interval.lower < interval.upper) || !interval.cdf) {
    throw ConfigError("invalid type interval");
  }
  if (std::abs(interval.cdf(interval.lower)) > kEndpointTol ||
      std::abs(interval.cdf(interval.upper) - 1.0) > kEndpointTol) {
    throw ValidationError("cdf endpoints must satisfy cdf(lower)=0, cdf(upper)=1");
  }
  {
    // Coarse monotonicity sweep; bisection alone can miss interior dips.
    double prev = 0.0;
    for (int i = 1; i <= 256; ++i) {
      const double t = interval.lower + (interval.upper - interval.lower) * i / 256;
      const double c = interval.cdf(t);
      if (c < prev - 1e-9) {
        throw ValidationError("cdf is not monotone near t = " + std::to_string(t));
      }
      prev = c;
    }
  }

  TypeGrid grid;
  grid.lower = interval.lower;
  grid.points.resize(N);
  for (int k = 0; k < N; ++k) {
    const double target = static_cast<double>(k + 1) / N;
    double lo = interval.lower;
    double hi = interval.upper;
    int iters = 0;
    while (hi - lo > tol) {
      if (++iters > 200) {
        throw NumericError("cdf inversion did not converge within 200 bisections");
      }
      const double mid = 0.5 * (lo + hi);
      const double c = interval.cdf(mid);
      if (c < -1e-12 || c > 1.0 + 1e-12) {
        throw ValidationError("cdf leaves [0,1] at t = " + std::to_string(mid));
      }
      if (c < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    grid.points(k) = hi;
  }

  for (int k = 0; k < N; ++k) {
    if (std::abs(interval.cdf(grid.points(k)) - static_cast<double>(k + 1) / N) >
        10 * tol + 1e-12) {
      throw ValidationError(
          "cdf appears non-monotone: inverted quantile misses its target at k = " +
          std::to_string(k));
    }
    if (k > 0 && !(grid.points(k) > grid.points(k - 1))) {
      throw ValidationError("quantile grid is not strictly increasing (flat cdf?)");
    }
  }
  if (!(grid.points(0) > grid.lower)) {
    throw ValidationError("first quantile point does not exceed the lower bound");
  }
  return grid;
}

CountTable::CountTable(int n_players, int N) : n_players_(n_players), N_(N) {
  if (n_players < 1 || N < 1) {
    throw ConfigError("count table requires n_players >= 1 and N >= 1");
  }
  rows_.resize(n_players + 1);
  rows_[0] = {1};
  for (int r = 1; r <= n_players; ++r) {
    const std::vector<unsigned __int128>& prev = rows_[r - 1];
    std::vector<unsigned __int128>& cur = rows_[r];
    cur.assign(static_cast<size_t>(r) * (N - 1) + 1, 0);
    for (int z = 0; z < static_cast<int>(cur.size()); ++z) {
      unsigned __int128 acc = 0;
      const int k_lo = std::max(0, z - static_cast<int>(prev.size()) + 1);
      const int k_hi = std::min(N - 1, z);
      for (int k = k_lo; k <= k_hi; ++k) {
        acc = checked_add(acc, prev[z - k]);
      }
      cur[z] = acc;
      if (acc > std::numeric_limits<std::uint64_t>::max()) fits_u64_ = false;
    }
  }
}

std::uint64_t CountTable::count(int r, int z) const {
  if (r < 0 || r > n_players_) throw std::out_of_range("count: r out of range");
  if (z < 0 || z >= static_cast<int>(rows_[r].size())) return 0;
  const unsigned __int128 v = rows_[r][z];
  if (v > std::numeric_limits<std::uint64_t>::max()) {
    throw NumericError("count exceeds 64-bit range; use count_as_double");
  }
  return static_cast<std::uint64_t>(v);
}

double CountTable::count_as_double(int r, int z) const {
  if (r < 0 || r > n_players_) throw std::out_of_range("count: r out of range");
  if (z < 0 || z >= static_cast<int>(rows_[r].size())) return 0.0;
  return static_cast<double>(rows_[r][z]);
}

Eigen::VectorXd CountTable::avg_type_distribution() const {
  const double total = std::pow(static_cast<double>(N_), n_players_);
  Eigen::VectorXd p(S());
  for (int z = 0; z < S(); ++z) p(z) = count_as_double(n_players_, z) / total;
  return p;
}

Eigen::VectorXd CountTable::conditional_avg_given_own(int k) const {
  if (n_players_ < 2) throw std::invalid_argument("conditional_avg_given_own: no rivals (n_players == 1)");
  if (k < 0 || k >= N_) throw std::out_of_range("conditional_avg_given_own: k out of range");
  const double total = std::pow(static_cast<double>(N_), n_players_ - 1);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(S());
  for (int z = 0; z < S(); ++z) {
    p(z) = count_as_double(n_players_ - 1, z - k) / total;
  }
  return p;
}

Eigen::VectorXd CountTable::conditional_own_given_avg(int z) const {
  if (z < 0 || z >= S()) throw std::out_of_range("conditional_own_given_avg: cell out of range");
  const double denom = count_as_double(n_players_, z);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(N_);
  for (int k = 0; k < N_; ++k) {
    p(k) = count_as_double(n_players_ - 1, z - k) / denom;
  }
  return p;
}

CountTable sum_index_counts(int n_players, int N) { return CountTable(n_players, N); }

Eigen::VectorXd avg_type_points(const TypeGrid& grid, const CountTable& counts) {
  if (grid.size() != counts.N()) {
    throw std::invalid_argument("avg_type_points: grid size does not match count table");
  }
  const int n = counts.n_players();
  Eigen::VectorXd out(counts.S());
  for (int z = 0; z < counts.S(); ++z) {
    double mean = 0.0;
    const double denom = counts.count_as_double(n, z);
    for (int k = 0; k < counts.N(); ++k) {
      mean += grid.points(k) * counts.count_as_double(n - 1, z - k) / denom;
    }
    out(z) = mean;
  }
  return out;
}

}  // namespace aggbne
