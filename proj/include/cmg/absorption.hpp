#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "cmg/game_model.hpp"

namespace cmg {

/// A set of transient states and joint actions that keeps the process inside
/// itself forever with probability one and is strongly connected.
struct EndComponent {
  std::vector<int> states;
  std::vector<std::pair<int, int>> pairs;  // (state, joint-action position)
};

struct AbsorptionReport {
  bool is_absorbing = true;
  /// Present iff !is_absorbing: the first reachable maximal end component.
  std::optional<EndComponent> offending_component;
  /// Every maximal end component reachable from supp(eta).
  std::vector<EndComponent> end_components;
  /// sup over strategies of E[T_delta]; set when absorbing.
  std::optional<double> uniform_bound;
};

/// Decides whether every (history-dependent, correlated) strategy reaches
/// delta almost surely with finite expected time. For finite models this
/// holds iff no maximal end component of the joint-action MDP restricted to
/// the transient states is reachable from supp(eta).
AbsorptionReport check_absorbing(const GameModel& model, const Distribution& eta);
AbsorptionReport check_absorbing(const GameModel& model);
/// Absorbing from every state (eta uniform over all states).
AbsorptionReport check_absorbing_everywhere(const GameModel& model);

/// E_{eta,pi}[T_delta], from the backward equation h = 1 + Q_pi h on the
/// transient states. Throws NotAbsorbingUnderStrategy.
double expected_hitting_time(const GameModel& model,
                             const CorrelatedStrategy& strategy,
                             const Distribution& eta);

/// Max total mass over the characteristic-equation polytope. Throws
/// Unbounded when the model is not absorbing.
double uniform_absorption_bound(const GameModel& model, const Distribution& eta);

/// P{T_delta > t} for t = 0..horizon.
std::vector<double> tail_probabilities(const GameModel& model,
                                       const CorrelatedStrategy& strategy,
                                       const Distribution& eta, int horizon);

/// Worst-case survival contraction: for every strategy,
/// P{T_delta > k * period} <= (1 - epsilon)^k.
struct DecayBound {
  int period = 1;
  double epsilon = 1.0;
};

/// Computes period = number of reachable transient states and epsilon from a
/// finite-horizon worst-case survival recursion. epsilon > 0 iff absorbing.
DecayBound geometric_decay(const GameModel& model, const Distribution& eta);

}  // namespace cmg
