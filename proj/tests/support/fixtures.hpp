#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cmg/game_model.hpp"
#include "cmg/transforms.hpp"

namespace cmg::test {

std::filesystem::path fixture_path(const std::string& name);

/// Loads tests/fixtures/<name>.json as an absorbing model.
GameModel fixture(const std::string& name);
DiscountedModel discounted_fixture(const std::string& name);
ModelDescription fixture_description(const std::string& name);

/// Every absorbing fixture, by name.
const std::vector<std::string>& absorbing_fixtures();

/// Profile that puts all mass on admissible position `pos` (clamped) at
/// every state.
StationaryProfile pure_profile(const GameModel& model, const std::vector<int>& pos);

/// Profile with pi[player][state] given by weights over admissible actions at
/// one state and uniform elsewhere.
StationaryProfile with_row(StationaryProfile profile, int player, int state,
                           std::vector<double> row);

}  // namespace cmg::test
