#pragma once

#include <string>

#include "cmg/game_model.hpp"

namespace cmg {

/// Identifier of the absorbing state added by discount_to_absorbing().
inline const std::string kCemeteryState = "__cemetery__";

/// A beta-discounted game: kernel rows stochastic, no absorbing set.
class DiscountedModel {
 public:
  /// Throws InvalidModel when beta is outside (0, 1) or the description
  /// names an absorbing set, plus every build_model() error.
  DiscountedModel(const ModelDescription& description, double beta);

  const GameModel& stage() const { return stage_; }
  double beta() const { return beta_; }

 private:
  GameModel stage_;
  double beta_;
};

/// Adds an isolated cemetery state reached with probability 1 - beta from
/// every pair, scales the original kernel by beta, and makes the cemetery
/// the absorbing set. Each player's only admissible action at the cemetery
/// is its first action. Throws InvalidModel if a state is already named
/// kCemeteryState.
GameModel discount_to_absorbing(const DiscountedModel& model);

}  // namespace cmg
