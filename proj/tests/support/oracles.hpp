#pragma once

#include <optional>
#include <vector>

#include "cmg/absorption.hpp"
#include "cmg/game_model.hpp"
#include "cmg/lp.hpp"

// Reference computations that share no solver code with the library: brute
// force, power series and plain dense solves over the full state space.
namespace cmg::test {

/// Joint weights [x][k] of a profile, multiplied out player by player.
std::vector<std::vector<double>> joint_weights(const GameModel& model,
                                               const StationaryProfile& profile);

struct Totals {
  double hitting = 0.0;
  std::vector<double> R;
  std::vector<std::vector<double>> C;
  std::vector<std::vector<double>> occupation;  // [x][k]
};

/// Runs the state distribution forward, summing per-step expectations until
/// the mass left outside delta drops below `tail`.
Totals series_totals(const GameModel& model, const std::vector<std::vector<double>>& w,
                     const Distribution& eta, double tail = 1e-15,
                     long max_steps = 10'000'000);

/// P{T > t} for t = 0, 1, ... until it drops below `tail`.
std::vector<double> tail_series(const GameModel& model,
                                const std::vector<std::vector<double>>& w,
                                const Distribution& eta, double tail = 1e-13);

/// Same totals from one dense solve over all non-delta states.
Totals dense_totals(const GameModel& model, const std::vector<std::vector<double>>& w,
                    const Distribution& eta);

/// max over the vertices of {z >= 0 : eq rows, ge rows}, by enumerating
/// bases. nullopt when no vertex is feasible. Only for small LPs.
std::optional<double> vertex_enumeration(const LinearProgram& lp, double tol = 1e-9);

/// Every deterministic stationary policy of `player` against `profile`
/// (own entry replaced): returns the best R^i among those with
/// C^i >= rho_i - tol, or nullopt.
struct PolicyScan {
  std::optional<double> best_feasible;
  double best_unconstrained = 0.0;
  int policies = 0;
};
PolicyScan deterministic_policies(const GameModel& model, int player,
                                  const StationaryProfile& profile,
                                  const Distribution& eta,
                                  const std::vector<double>& rho_i,
                                  double tol = 1e-12);

/// Grid over the player's mixed strategies (product of per-state simplex
/// grids, at most `points` in total).
struct MeshPoint {
  double R = 0.0;
  std::vector<double> C;
};
std::vector<MeshPoint> strategy_mesh(const GameModel& model, int player,
                                     const StationaryProfile& profile,
                                     const Distribution& eta, int points = 10'000);

/// sum_t beta^t E[r^i(X_t, A_t)] for a stage game, truncated once
/// beta^t * bound < 1e-13.
std::vector<double> discounted_series(const GameModel& stage,
                                      const StationaryProfile& profile,
                                      const Distribution& eta, double beta);

/// True when the component's pairs never leave its states, every state has
/// a pair, no state is in delta, and the pair graph is strongly connected.
/// Such a set is a witness: the correlated strategy that picks its pairs
/// uniformly stays there forever.
bool is_trap(const GameModel& model, const EndComponent& component);

/// Matching pennies with player 0 matching: epsilon of the profile where
/// player 0 plays H with probability p and player 1 with probability q, by
/// checking both pure deviations of each player.
double pennies_epsilon(double p, double q);

}  // namespace cmg::test
