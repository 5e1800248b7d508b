#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmg/errors.hpp"

namespace cmg {

/// Tolerance used for stochasticity and normalization checks on input.
inline constexpr double kInputTolerance = 1e-12;

/// Probability vector over the states of a model.
using Distribution = std::vector<double>;

/// Constraint constants, indexed [player][row].
using Rho = std::vector<std::vector<double>>;

/// One action index per player; indices refer to GameModel::actions(i).
using JointAction = std::vector<int>;

/// Wildcard action component in sparse entries: expands to every admissible
/// action of that player at the entry's state.
inline constexpr int kAnyAction = -1;

struct TransitionEntry {
  int state = 0;
  JointAction action;
  int next = 0;
  double probability = 0.0;
};

struct RewardEntry {
  int player = 0;
  int state = 0;
  JointAction action;
  double value = 0.0;
};

struct CostEntry {
  int player = 0;
  int row = 0;
  int state = 0;
  JointAction action;
  double value = 0.0;
};

/// Raw, index-based description of a game. Sparse entries that are not
/// listed are zero. This is what the model file parser produces and what
/// build_model() validates.
struct ModelDescription {
  std::vector<std::string> states;
  std::vector<std::vector<std::string>> actions;  // [player][action]
  // [player][state] -> action indices. Empty outer vector means "every
  // action is admissible everywhere"; an empty [player] entry likewise.
  std::vector<std::vector<std::vector<int>>> admissible;
  std::vector<int> delta;
  Distribution eta;
  int constraint_count = 0;
  Rho rho;
  std::vector<TransitionEntry> kernel;
  std::vector<RewardEntry> rewards;
  std::vector<CostEntry> costs;
};

/// Finite N-player game with absorbing set. Immutable after construction.
///
/// Joint actions at a state x are the product of the players' admissible
/// sets, enumerated in lexicographic order of the per-player action indices
/// (player 0 most significant). A (state, joint-action position) pair is the
/// unit every measure and strategy in the library is indexed by.
class GameModel {
 public:
  int state_count() const { return static_cast<int>(states_.size()); }
  int player_count() const { return static_cast<int>(actions_.size()); }
  int constraint_count() const { return constraint_count_; }

  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::string>& actions(int player) const {
    return actions_[player];
  }
  /// Admissible action indices of `player` at `state`, ascending.
  const std::vector<int>& admissible(int player, int state) const {
    return admissible_[player][state];
  }

  int joint_count(int state) const {
    return static_cast<int>(joints_[state].size());
  }
  const JointAction& joint_action(int state, int k) const {
    return joints_[state][k];
  }
  /// Position of `action` among the joint actions at `state`, or -1.
  int joint_index(int state, const JointAction& action) const;
  /// Position of `action` within admissible(player, state), or -1.
  int admissible_position(int player, int state, int action) const;

  std::span<const double> transition_row(int state, int k) const {
    return {kernel_.data() + pair_offset(state, k) * states_.size(),
            states_.size()};
  }
  double transition(int state, int k, int next) const {
    return transition_row(state, k)[next];
  }
  double reward(int player, int state, int k) const {
    return reward_[player][pair_offset(state, k)];
  }
  double cost(int player, int row, int state, int k) const {
    return cost_[player][row][pair_offset(state, k)];
  }

  const Rho& rho() const { return rho_; }
  const Distribution& eta() const { return eta_; }
  bool in_delta(int state) const { return in_delta_[state]; }
  std::vector<int> delta() const;
  /// Largest |r^i| or |c^{i,j}| over all admissible pairs.
  double reward_bound() const { return reward_bound_; }

  int pair_count() const { return static_cast<int>(pair_offsets_.back()); }
  int pair_offset(int state, int k) const {
    return static_cast<int>(pair_offsets_[state]) + k;
  }
  int state_index(const std::string& name) const;

  /// Dense description equivalent to this model (kernel, rewards and costs
  /// listed entry by entry, zeros omitted).
  ModelDescription describe() const;

 private:
  friend GameModel build_model(const ModelDescription&);
  GameModel() = default;

  std::vector<std::string> states_;
  std::vector<std::vector<std::string>> actions_;
  std::vector<std::vector<std::vector<int>>> admissible_;
  std::vector<std::vector<JointAction>> joints_;
  std::vector<std::size_t> pair_offsets_;  // prefix sums of joint_count
  std::vector<double> kernel_;               // [pair][next]
  std::vector<std::vector<double>> reward_;  // [player][pair]
  std::vector<std::vector<std::vector<double>>> cost_;  // [player][row][pair]
  int constraint_count_ = 0;
  Rho rho_;
  Distribution eta_;
  std::vector<bool> in_delta_;
  double reward_bound_ = 0.0;
};

/// Validates `description` and builds the model. Throws cmg::Error with
/// NonStochasticRow, AbsorbingViolation, EmptyActionSet, BadDistribution or
/// InvalidModel.
GameModel build_model(const ModelDescription& description);

/// pi[i][x][p]: probability that player i plays admissible(i, x)[p] at x.
struct StationaryProfile {
  std::vector<std::vector<std::vector<double>>> pi;
};

/// pi[x][k]: probability of joint action joint_action(x, k) at x.
struct CorrelatedStrategy {
  std::vector<std::vector<double>> pi;
};

/// Throws ProfileModelMismatch unless `profile` is a valid stationary profile
/// for `model`.
void validate_profile(const GameModel& model, const StationaryProfile& profile);
void validate_strategy(const GameModel& model,
                       const CorrelatedStrategy& strategy);
/// Throws BadDistribution unless `eta` is a probability vector over states.
void validate_distribution(const GameModel& model, const Distribution& eta);

StationaryProfile uniform_profile(const GameModel& model);
CorrelatedStrategy uniform_strategy(const GameModel& model);

/// Joint weight at (x, a) is the product of the players' weights.
CorrelatedStrategy product_strategy(const GameModel& model,
                                    const StationaryProfile& profile);

/// Q_pi[x][y] = sum_a pi(a|x) Q(y|x,a).
Eigen::MatrixXd induced_chain(const GameModel& model,
                              const CorrelatedStrategy& strategy);

/// Maximum over players and states of the total-variation distance.
double profile_distance(const StationaryProfile& a, const StationaryProfile& b);

}  // namespace cmg
