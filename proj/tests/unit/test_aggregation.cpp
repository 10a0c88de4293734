#include <doctest.h>

#include <random>

#include "aggbne/aggregation.hpp"

using namespace aggbne;

namespace {

std::vector<Strategy> random_profile(int n, int N, int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 20.0);
  std::vector<Strategy> profile;
  for (int i = 0; i < n; ++i) {
    Strategy s(N, m);
    for (int k = 0; k < N; ++k)
      for (int j = 0; j < m; ++j) s(k, j) = unit(rng);
    profile.push_back(std::move(s));
  }
  return profile;
}

}  // namespace

TEST_CASE("contribution of simple strategies") {
  const CountTable counts(2, 2);
  SUBCASE("constant strategy contributes its constant over n") {
    const Strategy constant = Strategy::Constant(2, 1, 6.0);
    const AggregateTable h = contribution(constant, counts);
    for (int z = 0; z < 3; ++z) CHECK(h(z, 0) == doctest::Approx(3.0));
  }
  SUBCASE("hand weights for two points") {
    Strategy s(2, 1);
    s << 4.0, 10.0;  // a, b
    const AggregateTable h = contribution(s, counts);
    CHECK(h(0, 0) == doctest::Approx(4.0 / 2));
    CHECK(h(1, 0) == doctest::Approx((4.0 + 10.0) / 4));
    CHECK(h(2, 0) == doctest::Approx(10.0 / 2));
  }
  SUBCASE("zero strategy is the zero function") {
    const AggregateTable h = contribution(Strategy::Zero(2, 1), counts);
    CHECK(h.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("contribution is linear") {
  const CountTable counts(3, 4);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(-2.0, 2.0);
  for (int rep = 0; rep < 20; ++rep) {
    Strategy s1(4, 2), s2(4, 2);
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 2; ++j) {
        s1(k, j) = unit(rng);
        s2(k, j) = unit(rng);
      }
    const double alpha = unit(rng), beta = unit(rng);
    const AggregateTable combined = contribution(alpha * s1 + beta * s2, counts);
    const AggregateTable split =
        alpha * contribution(s1, counts) + beta * contribution(s2, counts);
    CHECK((combined - split).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("full aggregate") {
  const CountTable counts(2, 2);
  SUBCASE("constants average to the constant") {
    const std::vector<Strategy> profile(2, Strategy::Constant(2, 1, 7.5));
    const AggregateTable agg = full_aggregate(profile, counts);
    for (int z = 0; z < 3; ++z) CHECK(agg(z, 0) == doctest::Approx(7.5));
  }
  SUBCASE("hand enumeration for two ramps") {
    Strategy ramp(2, 1);
    ramp << 0.0, 2.0;
    const std::vector<Strategy> profile(2, ramp);
    const AggregateTable agg = full_aggregate(profile, counts);
    CHECK(agg(0, 0) == doctest::Approx(0.0));
    CHECK(agg(1, 0) == doctest::Approx(1.0));
    CHECK(agg(2, 0) == doctest::Approx(2.0));
  }
  SUBCASE("single nonzero player contributes c/n") {
    std::vector<Strategy> profile(3, Strategy::Zero(2, 1));
    profile[1] = Strategy::Constant(2, 1, 6.0);
    const AggregateTable agg = full_aggregate(profile, CountTable(3, 2));
    for (int z = 0; z < agg.rows(); ++z) CHECK(agg(z, 0) == doctest::Approx(2.0));
  }
}

TEST_CASE("enumeration oracle agrees with the linear-operator path") {
  std::mt19937_64 rng(5);
  for (int n = 2; n <= 4; ++n) {
    for (int N = 2; N <= 5; ++N) {
      const CountTable counts(n, N);
      for (int rep = 0; rep < 8; ++rep) {
        const std::vector<Strategy> profile = random_profile(n, N, 1, rng);
        const AggregateTable fast = full_aggregate(profile, counts);
        const AggregateTable exact = brute_force_aggregate(profile);
        CHECK((fast - exact).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }
}

TEST_CASE("aggregate range and permutation symmetry") {
  std::mt19937_64 rng(6);
  const CountTable counts(3, 4);
  const std::vector<Strategy> profile = random_profile(3, 4, 1, rng);
  const AggregateTable agg = full_aggregate(profile, counts);
  CHECK(agg.minCoeff() >= 0.0);
  CHECK(agg.maxCoeff() <= 20.0);

  std::vector<Strategy> shuffled = {profile[2], profile[0], profile[1]};
  const AggregateTable agg2 = full_aggregate(shuffled, counts);
  CHECK((agg - agg2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("brute force guard and shape errors") {
  const std::vector<Strategy> big(8, Strategy::Zero(12, 1));  // 12^8 > 1e6
  CHECK_THROWS_AS(brute_force_aggregate(big), std::invalid_argument);

  const CountTable counts(2, 2);
  std::vector<Strategy> bad = {Strategy::Zero(2, 1), Strategy::Zero(3, 1)};
  CHECK_THROWS_AS(full_aggregate(bad, counts), std::invalid_argument);
}

TEST_CASE("conditional aggregate view") {
  const CountTable counts(2, 2);
  AggregateTable agg = AggregateTable::Constant(3, 1, 4.2);
  const Eigen::VectorXd own = Eigen::VectorXd::Constant(1, 1.0);
  const ConditionalAggregateView view = conditional_aggregate_view(agg, own, 0, counts);
  CHECK(view.weights.sum() == doctest::Approx(1.0));
  CHECK(view.weights(0) == doctest::Approx(0.5));
  CHECK(view.weights(1) == doctest::Approx(0.5));
  CHECK(view.weights(2) == 0.0);
  // Expectation of a constant aggregate collapses to the constant.
  CHECK(view.weights.dot(view.values.col(0)) == doctest::Approx(4.2));
  CHECK_THROWS_AS(conditional_aggregate_view(agg, own, 5, counts), std::out_of_range);
}
