#include "aggbne/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace aggbne {

namespace {

// Gradient of the conditional expected cost in the own action, with the own
// contribution entering the aggregate at exactly 1/n.
Eigen::VectorXd conditional_gradient(const Eigen::VectorXd& x,
                                     const RivalView& rivals,
                                     const CostModel& model, double theta,
                                     int n_players) {
  Eigen::MatrixXd agg_rows = rivals.mean_rows;
  agg_rows.rowwise() += x.transpose() / n_players;
  Eigen::VectorXd g_own, g_agg;
  model.weighted_grads(x, agg_rows, rivals.weights, theta, g_own, g_agg);
  return g_own + g_agg / n_players;
}

double conditional_value(const Eigen::VectorXd& x, const RivalView& rivals,
                         const CostModel& model, double theta, int n_players) {
  Eigen::MatrixXd agg_rows = rivals.mean_rows;
  agg_rows.rowwise() += x.transpose() / n_players;
  return model.weighted_cost(x, agg_rows, rivals.weights, theta);
}

Eigen::VectorXd minimize_conditional(const RivalView& rivals, const CostModel& model,
                                     double theta, int n_players,
                                     const ActionBox& box, double tol) {
  Eigen::VectorXd x = 0.5 * (box.lo + box.hi);
  double step = 1.0;
  double value = conditional_value(x, rivals, model, theta, n_players);
  for (int iter = 0; iter < 100000; ++iter) {
    const Eigen::VectorXd grad =
        conditional_gradient(x, rivals, model, theta, n_players);
    if ((x - box.clamp(x - grad)).norm() <= tol) return x;
    // Backtrack on the projected step until sufficient decrease holds.
    for (;;) {
      const Eigen::VectorXd candidate = box.clamp(x - step * grad);
      const Eigen::VectorXd d = candidate - x;
      const double cand_value =
          conditional_value(candidate, rivals, model, theta, n_players);
      if (cand_value <= value + grad.dot(d) + d.squaredNorm() / (2.0 * step) + 1e-15) {
        x = candidate;
        value = cand_value;
        break;
      }
      step *= 0.5;
      if (step < 1e-14) {
        throw NumericError("best response line search stalled");
      }
    }
  }
  throw NumericError("best response did not reach tolerance within the iteration cap");
}

}  // namespace

DiscreteGame make_discrete_game(const GameSpec& spec, double grid_tol) {
  spec.validate_shape();
  TypeGrid grid = spec.types.uniform
                      ? build_uniform_grid(spec.types.lower, spec.types.upper, spec.N)
                      : build_quantile_grid(spec.types, spec.N, grid_tol);
  CountTable counts(spec.n_players, spec.N);
  return DiscreteGame{spec, std::move(grid), std::move(counts)};
}

RivalView rival_view(int i, const std::vector<Strategy>& profile,
                     const CountTable& counts) {
  const int n = counts.n_players();
  const int N = counts.N();
  if (n < 2) throw std::invalid_argument("rival_view: no rivals (n_players == 1)");
  if (i < 0 || i >= n) throw std::out_of_range("rival_view: player out of range");
  if (static_cast<int>(profile.size()) != n) {
    throw std::invalid_argument("rival_view: profile size does not match n_players");
  }
  const int S_r = (n - 1) * (N - 1) + 1;
  const int m = static_cast<int>(profile[0].cols());
  const double total = std::pow(static_cast<double>(N), n - 1);

  RivalView view;
  view.weights.resize(S_r);
  view.mean_rows = Eigen::MatrixXd::Zero(S_r, m);
  for (int z = 0; z < S_r; ++z) {
    const double cell = counts.count_as_double(n - 1, z);
    view.weights(z) = cell / total;
    for (int k = 0; k < N; ++k) {
      const double w = counts.count_as_double(n - 2, z - k) / cell;
      if (w == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        view.mean_rows.row(z) += w * profile[j].row(k);
      }
    }
    view.mean_rows.row(z) /= n;
  }
  return view;
}

ExpectedCost expected_cost_against(const Strategy& own, const RivalView& rivals,
                                   const TypeGrid& own_grid, const CostModel& model,
                                   int n_players) {
  const int N = own_grid.size();
  if (own.rows() != N) {
    throw std::invalid_argument("expected_cost: strategy does not match the grid");
  }
  ExpectedCost out;
  out.per_type.resize(N);
  for (int k = 0; k < N; ++k) {
    const Eigen::VectorXd x = own.row(k).transpose();
    out.per_type(k) =
        conditional_value(x, rivals, model, own_grid.points(k), n_players);
  }
  out.mean = out.per_type.mean();
  return out;
}

ExpectedCost expected_cost(int i, const std::vector<Strategy>& profile,
                           const DiscreteGame& game) {
  const RivalView rivals = rival_view(i, profile, game.counts);
  return expected_cost_against(profile[i], rivals, game.grid,
                               *game.spec.models[i], game.spec.n_players);
}

Strategy best_response_against(const RivalView& rivals, const TypeGrid& own_grid,
                               const CostModel& model, int n_players,
                               const ActionBox& box, double tol,
                               bool force_generic) {
  if (!(tol > 0)) throw ConfigError("best_response requires tol > 0");
  const int N = own_grid.size();
  Strategy br(N, box.dim());
  Eigen::VectorXd x(box.dim());
  const Eigen::VectorXd rivals_mean = rivals.mean_rows.transpose() * rivals.weights;
  for (int k = 0; k < N; ++k) {
    const double theta = own_grid.points(k);
    if (!force_generic &&
        model.closed_form_best_response(rivals_mean, theta, n_players, box, x)) {
      br.row(k) = x.transpose();
    } else {
      br.row(k) =
          minimize_conditional(rivals, model, theta, n_players, box, tol).transpose();
    }
  }
  return br;
}

Strategy best_response(int i, const std::vector<Strategy>& profile,
                       const DiscreteGame& game, double tol, bool force_generic) {
  const RivalView rivals = rival_view(i, profile, game.counts);
  return best_response_against(rivals, game.grid, *game.spec.models[i],
                               game.spec.n_players, game.spec.box, tol,
                               force_generic);
}

ExploitabilityReport exploitability(const std::vector<Strategy>& profile,
                                    const DiscreteGame& game, double tol) {
  const int n = game.spec.n_players;
  ExploitabilityReport report;
  report.gains.resize(n);
  for (int i = 0; i < n; ++i) {
    const RivalView rivals = rival_view(i, profile, game.counts);
    const CostModel& model = *game.spec.models[i];
    const ExpectedCost current = expected_cost_against(
        profile[i], rivals, game.grid, model, n);
    Strategy br = best_response_against(rivals, game.grid, model, n, game.spec.box,
                                        tol);
    const ExpectedCost at_br =
        expected_cost_against(br, rivals, game.grid, model, n);
    report.gains(i) = current.mean - at_br.mean;
    report.best_responses.push_back(std::move(br));
  }
  report.epsilon = report.gains.maxCoeff();
  return report;
}

CentralSolveResult central_dbne(const DiscreteGame& game, double tol, int max_iters,
                                const std::optional<std::vector<Strategy>>& init) {
  const int n = game.spec.n_players;
  const int N = game.spec.N;
  const int m = game.spec.box.dim();
  if (!(tol > 0)) throw ConfigError("central_dbne requires tol > 0");

  std::vector<Strategy> profile;
  if (init) {
    profile = *init;
    for (const Strategy& s : profile) check_feasible(s, game.spec.box, 1e-9);
  } else {
    const Eigen::RowVectorXd mid =
        0.5 * (game.spec.box.lo + game.spec.box.hi).transpose();
    profile.assign(n, Strategy(mid.replicate(N, 1)));
  }

  double alpha = 1.0;
  double last_residual = std::numeric_limits<double>::infinity();
  std::vector<Strategy> grads(n, Strategy(N, m));
  const int check_every = 50;
  double last_epsilon = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= max_iters; ++iter) {
    for (int i = 0; i < n; ++i) {
      const RivalView rivals = rival_view(i, profile, game.counts);
      for (int k = 0; k < N; ++k) {
        grads[i].row(k) = conditional_gradient(profile[i].row(k).transpose(), rivals,
                                               *game.spec.models[i],
                                               game.grid.points(k), n)
                              .transpose();
      }
    }
    double residual = 0.0;
    for (int i = 0; i < n; ++i) {
      Strategy next(N, m);
      for (int k = 0; k < N; ++k) {
        next.row(k) = game.spec.box
                          .clamp(profile[i].row(k).transpose() -
                                 alpha * grads[i].row(k).transpose())
                          .transpose();
      }
      residual = std::max(residual, (next - profile[i]).lpNorm<Eigen::Infinity>());
      profile[i] = std::move(next);
    }
    if (!std::isfinite(residual)) {
      alpha *= 0.5;
      continue;
    }
    if (residual > 1.25 * last_residual) {
      alpha *= 0.5;  // overshooting: the map is expansive at this stepsize
      if (alpha < 1e-12) {
        throw NumericError("central solve stepsize collapsed; game may be non-monotone");
      }
    }
    last_residual = residual;

    if (residual <= alpha * std::sqrt(tol) || iter % check_every == 0 ||
        iter == max_iters) {
      ExploitabilityReport cert = exploitability(profile, game, tol);
      last_epsilon = cert.epsilon;
      if (cert.epsilon <= tol) {
        return CentralSolveResult{std::move(profile), std::move(cert), iter};
      }
    }
  }
  throw NumericError("central solve hit the iteration cap; last exploitability = " +
                     std::to_string(last_epsilon));
}

Strategy refine_strategy(const Strategy& coarse, const TypeGrid& coarse_grid,
                         const TypeGrid& fine_grid) {
  const int Nc = coarse_grid.size();
  const int Nf = fine_grid.size();
  if (coarse.rows() != Nc) {
    throw std::invalid_argument("refine_strategy: strategy does not match its grid");
  }
  const double span = coarse_grid.upper() - coarse_grid.lower;
  if (fine_grid.upper() > coarse_grid.upper() + 1e-9 * span) {
    throw std::out_of_range("refine_strategy: fine grid exceeds the upper bound");
  }
  Strategy fine(Nf, coarse.cols());
  for (int j = 0; j < Nf; ++j) {
    // Quantile (j+1)/Nf lands in the coarse cell ((k-1)/Nc, k/Nc].
    const long k = (static_cast<long>(j + 1) * Nc + Nf - 1) / Nf - 1;
    fine.row(j) = coarse.row(static_cast<int>(k));
  }
  return fine;
}

std::vector<EpsilonRow> epsilon_study(const GameSpec& spec, std::vector<int> N_list,
                                      int N_fine, double tol) {
  std::sort(N_list.begin(), N_list.end());
  for (int N : N_list) {
    if (N < 1 || N_fine % N != 0) {
      throw ConfigError("epsilon_study requires N_fine to be a multiple of every N");
    }
  }
  GameSpec fine_spec = spec;
  fine_spec.N = N_fine;
  const DiscreteGame fine = make_discrete_game(fine_spec);

  std::vector<EpsilonRow> rows;
  for (int N : N_list) {
    const auto start = std::chrono::steady_clock::now();
    GameSpec coarse_spec = spec;
    coarse_spec.N = N;
    const DiscreteGame coarse = make_discrete_game(coarse_spec);
    const CentralSolveResult solved = central_dbne(coarse, tol, 200000);

    std::vector<Strategy> refined;
    refined.reserve(solved.profile.size());
    for (const Strategy& s : solved.profile) {
      refined.push_back(refine_strategy(s, coarse.grid, fine.grid));
    }
    const ExploitabilityReport report = exploitability(refined, fine, tol);
    const auto stop = std::chrono::steady_clock::now();

    EpsilonRow row;
    row.N = N;
    row.epsilon = report.epsilon;
    row.certified_tol = tol;
    row.runtime_ms =
        std::chrono::duration_cast<std::chrono::microseconds>(stop - start).count() /
        1000.0;
    rows.push_back(row);
  }
  return rows;
}

std::vector<RefinementRow> best_response_refinement_check(
    const GameSpec& spec, int i, const std::vector<Strategy>& fine_profile,
    std::vector<int> N_list, int N_fine, double tol) {
  std::sort(N_list.begin(), N_list.end());
  GameSpec fine_spec = spec;
  fine_spec.N = N_fine;
  const DiscreteGame fine = make_discrete_game(fine_spec);
  const RivalView rivals = rival_view(i, fine_profile, fine.counts);
  const CostModel& model = *spec.models[i];

  const Strategy fine_br = best_response_against(
      rivals, fine.grid, model, spec.n_players, spec.box, tol);

  std::vector<RefinementRow> rows;
  for (int N : N_list) {
    GameSpec coarse_spec = spec;
    coarse_spec.N = N;
    const DiscreteGame coarse = make_discrete_game(coarse_spec);
    // Coarse own-type resolution against the unchanged (fine) rival law: with
    // independent marginals the interval-mass reweighting leaves rivals as-is.
    const Strategy coarse_br = best_response_against(
        rivals, coarse.grid, model, spec.n_players, spec.box, tol);
    const Strategy refined = refine_strategy(coarse_br, coarse.grid, fine.grid);
    RefinementRow row;
    row.N = N;
    row.sup_gap = (refined - fine_br).cwiseAbs().maxCoeff();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace aggbne
