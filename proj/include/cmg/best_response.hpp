#pragma once

#include <vector>

#include "cmg/game_model.hpp"
#include "cmg/lp.hpp"
#include "cmg/occupation.hpp"

namespace cmg {

/// Strategy of a single player: pi[x][p] over admissible(player, x).
using PlayerStrategy = std::vector<std::vector<double>>;

/// Single-player model seen by `player` when every other player follows
/// `others` (the entry others.pi[player] is ignored). Kernel, reward and
/// costs are averaged over the opponents' joint action; rho is the player's
/// own row. For one-player models this is the model itself.
GameModel freeze_opponents(const GameModel& model, int player,
                           const StationaryProfile& others);

/// Best-response LP on the frozen view: variables mu(x, a^i) >= 0 over the
/// reachable transient states, one flow row per such state, one row
/// sum mu c^{i,j} >= rho_i[j] per finite constraint constant, objective
/// sum mu r^i.
LinearProgram build_br_lp(const GameModel& model, int player,
                          const StationaryProfile& others, const Distribution& eta,
                          const std::vector<double>& rho_i);
/// Same LP, built directly on an already-frozen view.
LinearProgram build_br_lp(const GameModel& view, const Distribution& eta,
                          const std::vector<double>& rho_i);

struct BestResponse {
  PlayerStrategy strategy;
  double value = 0.0;
  /// Player-marginal occupation measure of the response (against the
  /// frozen opponents).
  OccupationMeasure marginal;
  /// C^i at the response, one entry per constraint row.
  std::vector<double> constraint_values;
  LinearProgramSolution lp;
};

/// Maximizes R^i(eta, (others^{-i}, sigma)) over stationary sigma subject to
/// C^i >= rho_i. Every feasible point of the LP is the occupation measure of
/// some stationary strategy of the player in the frozen view, so the LP
/// optimum is the constrained best-response value; the strategy is read back
/// by disintegration, using `fallback` at null states (uniform if empty).
/// Throws ConstraintInfeasible when no feasible response exists.
BestResponse best_response(const GameModel& model, int player,
                           const StationaryProfile& others, const Distribution& eta,
                           const std::vector<double>& rho_i,
                           const PlayerStrategy& fallback = {});
BestResponse best_response(const GameModel& view, const Distribution& eta,
                           const std::vector<double>& rho_i,
                           const PlayerStrategy& fallback = {});

/// max s such that some response satisfies C^i >= rho_i + s componentwise.
/// Positive values certify the Slater condition against `others`. Returns
/// +infinity when there are no finite constraint constants.
double slater_check(const GameModel& model, int player,
                    const StationaryProfile& others, const Distribution& eta,
                    const std::vector<double>& rho_i);
double slater_check(const GameModel& view, const Distribution& eta,
                    const std::vector<double>& rho_i);

/// Unconstrained best-response value by policy iteration on the frozen view
/// (no LP involved). Used as an independent check of the LP route.
double unconstrained_best_value(const GameModel& view, const Distribution& eta);

}  // namespace cmg
