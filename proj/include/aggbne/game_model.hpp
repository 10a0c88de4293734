#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "aggbne/errors.hpp"
#include "aggbne/type_space.hpp"

namespace aggbne {

// Nonempty compact box of feasible actions.
struct ActionBox {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int dim() const { return static_cast<int>(lo.size()); }
  void validate() const;
  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;
};

ActionBox scalar_box(double lo, double hi);

// Per-player cost f(x, agg, theta) with analytic partials in the own action
// and in the aggregate value. The weighted_* entry points take a probability
// row over the rows of an aggregate table; the defaults loop the pointwise
// calls, and models affine in the aggregate override them to collapse the sum.
class CostModel {
 public:
  virtual ~CostModel() = default;

  virtual int action_dim() const = 0;
  virtual double cost(const Eigen::VectorXd& x, const Eigen::VectorXd& agg,
                      double theta) const = 0;
  virtual void grad_own(const Eigen::VectorXd& x, const Eigen::VectorXd& agg,
                        double theta, Eigen::VectorXd& out) const = 0;
  virtual void grad_agg(const Eigen::VectorXd& x, const Eigen::VectorXd& agg,
                        double theta, Eigen::VectorXd& out) const = 0;

  virtual double weighted_cost(const Eigen::VectorXd& x,
                               const Eigen::MatrixXd& agg_rows,
                               const Eigen::VectorXd& weights, double theta) const;
  virtual void weighted_grads(const Eigen::VectorXd& x,
                              const Eigen::MatrixXd& agg_rows,
                              const Eigen::VectorXd& weights, double theta,
                              Eigen::VectorXd& own_out,
                              Eigen::VectorXd& agg_out) const;

  // Minimizer over `box` of E_w[f(x, x/n + rivals_mean(s), theta)] when the
  // model admits one in closed form. Returns false when unavailable.
  virtual bool closed_form_best_response(const Eigen::VectorXd& rivals_mean,
                                         double theta, int n_players,
                                         const ActionBox& box,
                                         Eigen::VectorXd& out) const {
    (void)rivals_mean, (void)theta, (void)n_players, (void)box, (void)out;
    return false;
  }
};

// Nash-Cournot cost (x~ + d - delta) * x * sign + theta * x^2 for one firm.
struct CournotParams {
  double d = 1200.0;
  double delta = 0.0;
  double sign = -1.0;
};

double cournot_cost(double x, double agg, double theta, const CournotParams& p);
// Returns (d/dx, d/dagg).
std::pair<double, double> cournot_grads(double x, double agg, double theta,
                                        const CournotParams& p);

class CournotModel final : public CostModel {
 public:
  explicit CournotModel(CournotParams params) : params_(params) {}

  const CournotParams& params() const { return params_; }

  int action_dim() const override { return 1; }
  double cost(const Eigen::VectorXd& x, const Eigen::VectorXd& agg,
              double theta) const override;
  void grad_own(const Eigen::VectorXd& x, const Eigen::VectorXd& agg, double theta,
                Eigen::VectorXd& out) const override;
  void grad_agg(const Eigen::VectorXd& x, const Eigen::VectorXd& agg, double theta,
                Eigen::VectorXd& out) const override;
  double weighted_cost(const Eigen::VectorXd& x, const Eigen::MatrixXd& agg_rows,
                       const Eigen::VectorXd& weights, double theta) const override;
  void weighted_grads(const Eigen::VectorXd& x, const Eigen::MatrixXd& agg_rows,
                      const Eigen::VectorXd& weights, double theta,
                      Eigen::VectorXd& own_out,
                      Eigen::VectorXd& agg_out) const override;
  bool closed_form_best_response(const Eigen::VectorXd& rivals_mean, double theta,
                                 int n_players, const ActionBox& box,
                                 Eigen::VectorXd& out) const override;

 private:
  CournotParams params_;
};

struct GameSpec {
  int n_players = 0;
  ActionBox box;
  std::vector<std::shared_ptr<const CostModel>> models;  // one per player
  TypeInterval types;
  int N = 1;

  void validate_shape() const;
};

// The 5-firm benchmark family: firm i (0-based) has delta = delta_step * i.
GameSpec make_cournot_spec(int n_players, double box_lo, double box_hi,
                           const TypeInterval& types, int N, double d = 1200.0,
                           double delta_step = 20.0, double sign = -1.0);

struct ModelValidationReport {
  double max_grad_rel_err = 0.0;
  double min_monotonicity = 0.0;  // min of <g(x)-g(y), x-y>/||x-y||^2
  bool weak_convexity = false;
};

// Probes gradient consistency (central differences) and strict monotonicity of
// grad_own at `probes` random points. Throws ValidationError on a failed
// probe, naming the player and the probe point.
ModelValidationReport validate_model(const GameSpec& spec, int probes,
                                     std::uint64_t seed);

}  // namespace aggbne
