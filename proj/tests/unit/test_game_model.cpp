#include <doctest.h>

#include <cmath>

#include "aggbne/game_model.hpp"

using namespace aggbne;

namespace {

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

// A cost model with a deliberately scaled own-gradient, for negative controls.
class BrokenGradModel final : public CostModel {
 public:
  int action_dim() const override { return 1; }
  double cost(const Eigen::VectorXd& x, const Eigen::VectorXd& agg,
              double theta) const override {
    return cournot_cost(x(0), agg(0), theta, params_);
  }
  void grad_own(const Eigen::VectorXd& x, const Eigen::VectorXd& agg, double theta,
                Eigen::VectorXd& out) const override {
    out = scalar(1.1 * cournot_grads(x(0), agg(0), theta, params_).first);
  }
  void grad_agg(const Eigen::VectorXd& x, const Eigen::VectorXd& agg, double theta,
                Eigen::VectorXd& out) const override {
    out = scalar(cournot_grads(x(0), agg(0), theta, params_).second);
  }

 private:
  CournotParams params_{1200.0, 0.0, 1.0};
};

}  // namespace

TEST_CASE("cournot cost values") {
  CournotParams p;  // d = 1200, sign as configured per case
  p.sign = 1.0;

  CHECK(cournot_cost(0.0, 3.0, 1.7, p) == 0.0);

  p.delta = 0.0;
  CHECK(cournot_cost(1.0, 0.0, 1.0, p) == doctest::Approx(1201.0));

  CournotParams p3;
  p3.sign = 1.0;
  p3.delta = 40.0;  // firm index 3 in the benchmark numbering
  CHECK(cournot_cost(2.0, 5.0, 1.5, p3) == doctest::Approx(2336.0));
}

TEST_CASE("cournot analytic gradients") {
  CournotParams p;
  p.sign = 1.0;
  p.delta = 0.0;
  {
    const auto [own, agg] = cournot_grads(0.0, 0.0, 1.0, p);
    CHECK(own == doctest::Approx(1200.0));
    CHECK(agg == 0.0);
  }
  {
    const auto [own, agg] = cournot_grads(1.0, 0.0, 1.0, p);
    CHECK(own == doctest::Approx(1202.0));
    CHECK(agg == doctest::Approx(1.0));
  }
  CournotParams p3;
  p3.sign = 1.0;
  p3.delta = 40.0;
  const auto [own, agg] = cournot_grads(2.0, 5.0, 1.5, p3);
  CHECK(own == doctest::Approx(1171.0));
  CHECK(agg == doctest::Approx(2.0));
}

TEST_CASE("cournot cost is quadratic in the action") {
  CournotParams p;
  const double h = 1e-3;
  for (double x : {0.4, 3.0, 17.2}) {
    for (double theta : {1.0, 1.5, 2.0}) {
      const double second = cournot_cost(x + h, 5.0, theta, p) -
                            2 * cournot_cost(x, 5.0, theta, p) +
                            cournot_cost(x - h, 5.0, theta, p);
      const double scale = std::max(1.0, std::abs(cournot_cost(x, 5.0, theta, p)));
      CHECK(std::abs(second - 2 * theta * h * h) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("weighted entry points match the pointwise loops") {
  const CournotModel model({1200.0, 20.0, -1.0});
  Eigen::MatrixXd agg_rows(4, 1);
  agg_rows << 0.5, 1.25, 3.0, 7.5;
  Eigen::VectorXd w(4);
  w << 0.1, 0.4, 0.3, 0.2;
  const Eigen::VectorXd x = scalar(2.5);

  const double direct = model.weighted_cost(x, agg_rows, w, 1.3);
  double looped = 0.0;
  Eigen::VectorXd own_l = Eigen::VectorXd::Zero(1), agg_l = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd g(1);
  for (int s = 0; s < 4; ++s) {
    looped += w(s) * model.cost(x, agg_rows.row(s).transpose(), 1.3);
    model.grad_own(x, agg_rows.row(s).transpose(), 1.3, g);
    own_l += w(s) * g;
    model.grad_agg(x, agg_rows.row(s).transpose(), 1.3, g);
    agg_l += w(s) * g;
  }
  CHECK(direct == doctest::Approx(looped).epsilon(1e-13));

  Eigen::VectorXd own_d, agg_d;
  model.weighted_grads(x, agg_rows, w, 1.3, own_d, agg_d);
  CHECK(own_d(0) == doctest::Approx(own_l(0)).epsilon(1e-13));
  CHECK(agg_d(0) == doctest::Approx(agg_l(0)).epsilon(1e-13));
}

TEST_CASE("model validation") {
  SUBCASE("benchmark interval passes with solid convexity") {
    const GameSpec spec =
        make_cournot_spec(5, 0.0, 20.0, uniform_interval(1.0, 2.0), 8);
    const ModelValidationReport report = validate_model(spec, 64, 7);
    CHECK(report.max_grad_rel_err <= 1e-6);
    CHECK(report.min_monotonicity > 0.0);
    CHECK_FALSE(report.weak_convexity);
  }
  SUBCASE("theta down to zero flags weak convexity") {
    const GameSpec spec =
        make_cournot_spec(5, 0.0, 20.0, uniform_interval(0.0, 1.0), 8, 1200.0, 20.0,
                          1.0);
    const ModelValidationReport report = validate_model(spec, 64, 7);
    CHECK(report.weak_convexity);
    CHECK(report.min_monotonicity >= 0.0);
  }
  SUBCASE("a wrong gradient is a validation error") {
    GameSpec spec = make_cournot_spec(3, 0.0, 20.0, uniform_interval(1.0, 2.0), 4);
    spec.models[1] = std::make_shared<BrokenGradModel>();
    CHECK_THROWS_AS(validate_model(spec, 16, 7), ValidationError);
  }
}

TEST_CASE("closed-form best response clamps at the box") {
  // Rivals at zero, sign -1, d = 1200, theta = 1, n = 5: the vertex sits at
  // 1200 / (2 * (1 - 1/5)) = 750, so the box edge 20 wins.
  const CournotModel model({1200.0, 0.0, -1.0});
  const ActionBox box = scalar_box(0.0, 20.0);
  Eigen::VectorXd out;
  REQUIRE(model.closed_form_best_response(scalar(0.0), 1.0, 5, box, out));
  CHECK(out(0) == doctest::Approx(20.0));

  // Interior case: small demand intercept.
  const CournotModel small({20.0, 0.0, -1.0});
  REQUIRE(small.closed_form_best_response(scalar(4.0), 1.5, 5, box, out));
  CHECK(out(0) == doctest::Approx((4.0 + 20.0) / (2 * (1.5 - 0.2))).epsilon(1e-12));

  // Concave conditional cost (theta + sign/n <= 0) picks the better endpoint.
  const CournotModel concave({10.0, 0.0, -1.0});
  REQUIRE(concave.closed_form_best_response(scalar(0.0), 0.1, 5, box, out));
  CHECK((out(0) == 0.0 || out(0) == 20.0));
}

TEST_CASE("action box") {
  const ActionBox box = scalar_box(0.0, 20.0);
  CHECK(box.contains(scalar(0.0)));
  CHECK(box.contains(scalar(20.0)));
  CHECK_FALSE(box.contains(scalar(-0.01)));
  CHECK(box.clamp(scalar(-3.0))(0) == 0.0);
  CHECK(box.clamp(scalar(25.0))(0) == 20.0);
  CHECK_THROWS_AS(scalar_box(2.0, 2.0), ConfigError);
}
