#include "cmg/transforms.hpp"

#include <algorithm>

namespace cmg {

namespace {

GameModel checked_stage(const ModelDescription& description, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw Error(ErrorCode::InvalidModel, "discount factor must lie in (0, 1)");
  }
  if (!description.delta.empty()) {
    throw Error(ErrorCode::InvalidModel, "a discounted model has no absorbing set");
  }
  return build_model(description);
}

}  // namespace

DiscountedModel::DiscountedModel(const ModelDescription& description, double beta)
    : stage_(checked_stage(description, beta)), beta_(beta) {}

GameModel discount_to_absorbing(const DiscountedModel& model) {
  const GameModel& g = model.stage();
  const double beta = model.beta();
  const auto& names = g.states();
  if (std::find(names.begin(), names.end(), kCemeteryState) != names.end()) {
    throw Error(ErrorCode::InvalidModel,
                "state name " + kCemeteryState + " is reserved");
  }
  ModelDescription d = g.describe();
  const int cemetery = g.state_count();
  d.states.push_back(kCemeteryState);
  for (int i = 0; i < g.player_count(); ++i) d.admissible[i].push_back({0});
  d.delta = {cemetery};
  d.eta.push_back(0.0);
  for (auto& e : d.kernel) e.probability *= beta;
  for (int x = 0; x < g.state_count(); ++x) {
    for (int k = 0; k < g.joint_count(x); ++k) {
      d.kernel.push_back({x, g.joint_action(x, k), cemetery, 1.0 - beta});
    }
  }
  d.kernel.push_back(
      {cemetery, JointAction(g.player_count(), 0), cemetery, 1.0});
  return build_model(d);
}

}  // namespace cmg
