#pragma once

#include <vector>

#include "cmg/game_model.hpp"
#include "cmg/lp.hpp"

namespace cmg {

/// States whose occupancy is at or below this value are treated as null by
/// disintegrate().
inline constexpr double kNullOccupancy = 1e-12;

enum class MeasureKind { joint, player_marginal };

/// Expected number of visits to each (state, action) pair before absorption.
/// For joint measures weights[x][k] follows joint_action(x, k); for a player
/// marginal weights[x][p] follows admissible(player, x)[p].
struct OccupationMeasure {
  MeasureKind kind = MeasureKind::joint;
  int player = -1;
  std::vector<std::vector<double>> weights;
  Distribution eta_ref;

  double state_mass(int state) const;
  double total_mass() const;
  /// Per-state masses (the state marginal).
  std::vector<double> state_marginal() const;
};

/// Total expected rewards R[i] and costs C[i][j].
struct PayoffVector {
  std::vector<double> R;
  std::vector<std::vector<double>> C;
};

/// State marginal of the occupation measure: the unique solution of
/// xi = (eta + xi Q_pi) restricted to the transient states.
std::vector<double> state_occupancy(const GameModel& model,
                                    const CorrelatedStrategy& strategy,
                                    const Distribution& eta);

OccupationMeasure occupation_measure(const GameModel& model,
                                     const CorrelatedStrategy& strategy,
                                     const Distribution& eta);
OccupationMeasure occupation_measure(const GameModel& model,
                                     const StationaryProfile& profile,
                                     const Distribution& eta);

/// Flow-equation violation of a joint measure, plus any mass it puts on
/// delta or on negative weights.
double residual(const GameModel& model, const OccupationMeasure& mu,
                const Distribution& eta);

/// Conditional action distribution mu(x, .) / mu^X(x) at states with
/// positive occupancy, the fallback elsewhere (including delta).
CorrelatedStrategy disintegrate(const GameModel& model,
                                const OccupationMeasure& mu,
                                const CorrelatedStrategy& fallback);
/// Per-player version: each player's conditional marginal, fallback at null
/// states. Accepts a joint measure.
StationaryProfile disintegrate(const GameModel& model,
                               const OccupationMeasure& mu,
                               const StationaryProfile& fallback);
/// Strategy of `mu.player` recovered from a player-marginal measure.
std::vector<std::vector<double>> disintegrate_player(
    const GameModel& model, const OccupationMeasure& mu,
    const std::vector<std::vector<double>>& fallback);

OccupationMeasure player_marginal(const GameModel& model,
                                  const OccupationMeasure& mu, int player);

PayoffVector payoffs(const GameModel& model, const OccupationMeasure& mu);

/// LP whose feasible set is the set of joint occupation measures from eta:
/// one nonnegative variable per (reachable transient state, joint action),
/// one equality row per reachable transient state. Objective is zero.
///
/// States not reachable from supp(eta) carry no mass in any occupation
/// measure and are left out so that loops among them cannot make the polytope
/// unbounded.
LinearProgram characteristic_lp(const GameModel& model, const Distribution& eta);

/// Joint occupation measure assembled from a characteristic_lp() primal.
OccupationMeasure measure_from_lp(const GameModel& model, const LinearProgram& lp,
                                  const std::vector<double>& primal,
                                  const Distribution& eta);

}  // namespace cmg
