#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

#include "aggbne/aggregation.hpp"
#include "aggbne/game_model.hpp"
#include "aggbne/type_space.hpp"

namespace aggbne {

// A game spec together with its realized grid and count table.
struct DiscreteGame {
  GameSpec spec;
  TypeGrid grid;
  CountTable counts;
};

DiscreteGame make_discrete_game(const GameSpec& spec, double grid_tol = 1e-12);

// Rival-side view for one player: cells z' index the rivals' index sums.
//   weights(z')  = c_{n-1}(z') / N^(n-1)
//   mean_rows(z') = (1/n) sum_{j != i} E[sigma_j | rivals' cell z']
struct RivalView {
  Eigen::VectorXd weights;
  Eigen::MatrixXd mean_rows;
};

RivalView rival_view(int i, const std::vector<Strategy>& profile,
                     const CountTable& counts);

struct ExpectedCost {
  Eigen::VectorXd per_type;  // conditional expected cost at each own type
  double mean = 0.0;         // type average (uniform 1/N mass)
};

// Conditional expected cost of player i: the aggregate holds the own action
// at exactly 1/n and rivals enter through their conditional mean.
ExpectedCost expected_cost(int i, const std::vector<Strategy>& profile,
                           const DiscreteGame& game);

// Same, with own strategy replaced and the rival view precomputed.
ExpectedCost expected_cost_against(const Strategy& own, const RivalView& rivals,
                                   const TypeGrid& own_grid, const CostModel& model,
                                   int n_players);

// Per-type minimizer of the conditional expected cost over the box. Uses the
// model's closed form when available unless force_generic; the generic path
// is projected gradient with backtracking down to natural residual <= tol.
Strategy best_response(int i, const std::vector<Strategy>& profile,
                       const DiscreteGame& game, double tol,
                       bool force_generic = false);

Strategy best_response_against(const RivalView& rivals, const TypeGrid& own_grid,
                               const CostModel& model, int n_players,
                               const ActionBox& box, double tol,
                               bool force_generic = false);

struct ExploitabilityReport {
  Eigen::VectorXd gains;  // expected-cost drop available to each player
  double epsilon = 0.0;   // max gain
  std::vector<Strategy> best_responses;
};

ExploitabilityReport exploitability(const std::vector<Strategy>& profile,
                                    const DiscreteGame& game, double tol);

struct CentralSolveResult {
  std::vector<Strategy> profile;
  ExploitabilityReport certificate;
  int iterations = 0;
};

// Synchronous projected pseudo-gradient on the stacked strategies with exact
// aggregates (no consensus layer), run until exploitability <= tol. The
// stepsize is constant with halving on divergence. Throws NumericError with
// the last certificate when the iteration cap is hit.
CentralSolveResult central_dbne(const DiscreteGame& game, double tol,
                                int max_iters,
                                const std::optional<std::vector<Strategy>>& init =
                                    std::nullopt);

// Right-constant extension onto a finer quantile grid of the same marginal:
// fine point j maps to the coarse cell holding its quantile.
Strategy refine_strategy(const Strategy& coarse, const TypeGrid& coarse_grid,
                         const TypeGrid& fine_grid);

struct EpsilonRow {
  int N = 0;
  double epsilon = 0.0;
  double certified_tol = 0.0;
  double runtime_ms = 0.0;
};

// For each N: solve the N-point model, refine the equilibrium onto the
// N_fine grid, and measure its exploitability in the N_fine model.
std::vector<EpsilonRow> epsilon_study(const GameSpec& spec,
                                      std::vector<int> N_list, int N_fine,
                                      double tol);

struct RefinementRow {
  int N = 0;
  double sup_gap = 0.0;
};

// Sup-norm distance between the refined coarse-grid best response of player i
// against rivals fixed on the fine grid and the fine-grid best response.
std::vector<RefinementRow> best_response_refinement_check(
    const GameSpec& spec, int i, const std::vector<Strategy>& fine_profile,
    std::vector<int> N_list, int N_fine, double tol = 1e-10);

}  // namespace aggbne
