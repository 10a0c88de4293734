#include "aggbne/game_model.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace aggbne {

void ActionBox::validate() const {
  if (lo.size() == 0 || lo.size() != hi.size()) {
    throw ConfigError("action box needs matching nonempty lo/hi");
  }
  for (int j = 0; j < dim(); ++j) {
    if (!(lo(j) < hi(j))) {
      throw ConfigError("action box requires lo < hi in every coordinate");
    }
  }
}

bool ActionBox::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != lo.size()) return false;
  for (int j = 0; j < dim(); ++j) {
    if (x(j) < lo(j) - tol || x(j) > hi(j) + tol) return false;
  }
  return true;
}

Eigen::VectorXd ActionBox::clamp(const Eigen::VectorXd& x) const {
  return x.cwiseMax(lo).cwiseMin(hi);
}

ActionBox scalar_box(double lo, double hi) {
  ActionBox box;
  box.lo = Eigen::VectorXd::Constant(1, lo);
  box.hi = Eigen::VectorXd::Constant(1, hi);
  box.validate();
  return box;
}

double CostModel::weighted_cost(const Eigen::VectorXd& x,
                                const Eigen::MatrixXd& agg_rows,
                                const Eigen::VectorXd& weights, double theta) const {
  if (agg_rows.rows() != weights.size()) {
    throw std::invalid_argument("weighted_cost: weights do not match aggregate rows");
  }
  double acc = 0.0;
  Eigen::VectorXd agg(agg_rows.cols());
  for (Eigen::Index s = 0; s < agg_rows.rows(); ++s) {
    if (weights(s) == 0.0) continue;
    agg = agg_rows.row(s).transpose();
    acc += weights(s) * cost(x, agg, theta);
  }
  return acc;
}

void CostModel::weighted_grads(const Eigen::VectorXd& x,
                               const Eigen::MatrixXd& agg_rows,
                               const Eigen::VectorXd& weights, double theta,
                               Eigen::VectorXd& own_out,
                               Eigen::VectorXd& agg_out) const {
  if (agg_rows.rows() != weights.size()) {
    throw std::invalid_argument("weighted_grads: weights do not match aggregate rows");
  }
  own_out = Eigen::VectorXd::Zero(x.size());
  agg_out = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd agg(agg_rows.cols()), g(x.size());
  for (Eigen::Index s = 0; s < agg_rows.rows(); ++s) {
    if (weights(s) == 0.0) continue;
    agg = agg_rows.row(s).transpose();
    grad_own(x, agg, theta, g);
    own_out += weights(s) * g;
    grad_agg(x, agg, theta, g);
    agg_out += weights(s) * g;
  }
}

double cournot_cost(double x, double agg, double theta, const CournotParams& p) {
  return p.sign * (agg + p.d - p.delta) * x + theta * x * x;
}

std::pair<double, double> cournot_grads(double x, double agg, double theta,
                                        const CournotParams& p) {
  return {p.sign * (agg + p.d - p.delta) + 2.0 * theta * x, p.sign * x};
}

double CournotModel::cost(const Eigen::VectorXd& x, const Eigen::VectorXd& agg,
                          double theta) const {
  return cournot_cost(x(0), agg(0), theta, params_);
}

void CournotModel::grad_own(const Eigen::VectorXd& x, const Eigen::VectorXd& agg,
                            double theta, Eigen::VectorXd& out) const {
  out.resize(1);
  out(0) = cournot_grads(x(0), agg(0), theta, params_).first;
}

void CournotModel::grad_agg(const Eigen::VectorXd& x, const Eigen::VectorXd& agg,
                            double theta, Eigen::VectorXd& out) const {
  out.resize(1);
  out(0) = cournot_grads(x(0), agg(0), theta, params_).second;
}

double CournotModel::weighted_cost(const Eigen::VectorXd& x,
                                   const Eigen::MatrixXd& agg_rows,
                                   const Eigen::VectorXd& weights,
                                   double theta) const {
  if (agg_rows.rows() != weights.size()) {
    throw std::invalid_argument("weighted_cost: weights do not match aggregate rows");
  }
  // Affine in the aggregate, so the mixture collapses to the weighted mean.
  const double mean_agg = weights.dot(agg_rows.col(0));
  const double w_total = weights.sum();
  const double xv = x(0);
  return params_.sign * (mean_agg + w_total * (params_.d - params_.delta)) * xv +
         w_total * theta * xv * xv;
}

void CournotModel::weighted_grads(const Eigen::VectorXd& x,
                                  const Eigen::MatrixXd& agg_rows,
                                  const Eigen::VectorXd& weights, double theta,
                                  Eigen::VectorXd& own_out,
                                  Eigen::VectorXd& agg_out) const {
  if (agg_rows.rows() != weights.size()) {
    throw std::invalid_argument("weighted_grads: weights do not match aggregate rows");
  }
  const double mean_agg = weights.dot(agg_rows.col(0));
  const double w_total = weights.sum();
  const double xv = x(0);
  own_out.resize(1);
  agg_out.resize(1);
  own_out(0) = params_.sign * (mean_agg + w_total * (params_.d - params_.delta)) +
               w_total * 2.0 * theta * xv;
  agg_out(0) = w_total * params_.sign * xv;
}

bool CournotModel::closed_form_best_response(const Eigen::VectorXd& rivals_mean,
                                             double theta, int n_players,
                                             const ActionBox& box,
                                             Eigen::VectorXd& out) const {
  // Minimize sign*(x/n + r + d - delta)*x + theta*x^2 over [lo, hi].
  const double r = rivals_mean(0);
  const double lin = params_.sign * (r + params_.d - params_.delta);
  const double quad = theta + params_.sign / n_players;
  out.resize(1);
  if (quad > 1e-12) {
    out(0) = std::min(box.hi(0), std::max(box.lo(0), -lin / (2.0 * quad)));
    return true;
  }
  // Concave (or flat) conditional cost: the minimum sits at a box endpoint.
  const auto value = [&](double x) { return lin * x + quad * x * x; };
  out(0) = value(box.lo(0)) <= value(box.hi(0)) ? box.lo(0) : box.hi(0);
  return true;
}

void GameSpec::validate_shape() const {
  if (n_players < 2) throw ConfigError("game requires n_players >= 2");
  if (N < 1) throw ConfigError("game requires N >= 1");
  box.validate();
  if (static_cast<int>(models.size()) != n_players) {
    throw ConfigError("game requires one cost model per player");
  }
  for (const auto& m : models) {
    if (!m || m->action_dim() != box.dim()) {
      throw ConfigError("cost model action dimension does not match the box");
    }
  }
  if (!(types.lower < types.upper)) throw ConfigError("invalid type interval");
}

GameSpec make_cournot_spec(int n_players, double box_lo, double box_hi,
                           const TypeInterval& types, int N, double d,
                           double delta_step, double sign) {
  GameSpec spec;
  spec.n_players = n_players;
  spec.box = scalar_box(box_lo, box_hi);
  spec.types = types;
  spec.N = N;
  for (int i = 0; i < n_players; ++i) {
    CournotParams p;
    p.d = d;
    p.delta = delta_step * i;
    p.sign = sign;
    spec.models.push_back(std::make_shared<CournotModel>(p));
  }
  spec.validate_shape();
  return spec;
}

namespace {

std::string probe_to_string(const Eigen::VectorXd& x, double theta) {
  std::ostringstream os;
  os << "x = [";
  for (int j = 0; j < x.size(); ++j) os << (j ? ", " : "") << x(j);
  os << "], theta = " << theta;
  return os.str();
}

}  // namespace

ModelValidationReport validate_model(const GameSpec& spec, int probes,
                                     std::uint64_t seed) {
  spec.validate_shape();
  if (probes < 1) throw ConfigError("validate_model requires probes >= 1");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int m = spec.box.dim();
  const auto draw_point = [&] {
    Eigen::VectorXd x(m);
    for (int j = 0; j < m; ++j) {
      x(j) = spec.box.lo(j) + (spec.box.hi(j) - spec.box.lo(j)) * unit(rng);
    }
    return x;
  };

  ModelValidationReport report;
  report.min_monotonicity = std::numeric_limits<double>::infinity();
  const double h = 1e-5;

  for (int i = 0; i < spec.n_players; ++i) {
    const CostModel& model = *spec.models[i];
    for (int p = 0; p < probes + 2; ++p) {
      const Eigen::VectorXd x = draw_point();
      const Eigen::VectorXd agg = draw_point();
      // The two extra probes pin the interval endpoints, where convexity of
      // type-scaled quadratics is weakest.
      const double theta = p < probes
                               ? spec.types.lower +
                                     (spec.types.upper - spec.types.lower) * unit(rng)
                               : (p == probes ? spec.types.lower : spec.types.upper);

      Eigen::VectorXd analytic(m);
      for (int side = 0; side < 2; ++side) {
        const bool own = side == 0;
        if (own) {
          model.grad_own(x, agg, theta, analytic);
        } else {
          model.grad_agg(x, agg, theta, analytic);
        }
        for (int j = 0; j < m; ++j) {
          Eigen::VectorXd plus = own ? x : agg;
          Eigen::VectorXd minus = plus;
          plus(j) += h;
          minus(j) -= h;
          const double fd = own ? (model.cost(plus, agg, theta) -
                                   model.cost(minus, agg, theta)) /
                                      (2 * h)
                                : (model.cost(x, plus, theta) -
                                   model.cost(x, minus, theta)) /
                                      (2 * h);
          const double rel =
              std::abs(fd - analytic(j)) / std::max(1.0, std::abs(analytic(j)));
          report.max_grad_rel_err = std::max(report.max_grad_rel_err, rel);
          if (rel > 1e-6) {
            throw ValidationError("gradient mismatch for player " +
                                  std::to_string(i) + " (" +
                                  std::string(own ? "grad_own" : "grad_agg") +
                                  ") at " + probe_to_string(x, theta) +
                                  ": relative error " + std::to_string(rel));
          }
        }
      }

      Eigen::VectorXd y = draw_point();
      if ((x - y).norm() < 1e-12) y(0) = 0.5 * (spec.box.lo(0) + spec.box.hi(0));
      Eigen::VectorXd gx(m), gy(m);
      model.grad_own(x, agg, theta, gx);
      model.grad_own(y, agg, theta, gy);
      const double ip = (gx - gy).dot(x - y);
      const double normalized = ip / (x - y).squaredNorm();
      report.min_monotonicity = std::min(report.min_monotonicity, normalized);
      if (ip < -1e-12 * std::max(1.0, (x - y).squaredNorm())) {
        throw ValidationError("grad_own is not monotone for player " +
                              std::to_string(i) + " at " +
                              probe_to_string(x, theta));
      }
    }
  }
  report.weak_convexity = report.min_monotonicity <= 1e-6;
  return report;
}

}  // namespace aggbne
