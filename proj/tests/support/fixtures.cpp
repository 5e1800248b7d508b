#include "fixtures.hpp"

#include "cmg/model_io.hpp"

namespace cmg::test {

std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(CMG_FIXTURE_DIR) / (name + ".json");
}

GameModel fixture(const std::string& name) { return io::load_model(fixture_path(name)); }

DiscountedModel discounted_fixture(const std::string& name) {
  return io::parse_discounted_model(io::read_json(fixture_path(name)));
}

ModelDescription fixture_description(const std::string& name) {
  return io::read_model_document(fixture_path(name)).description;
}

const std::vector<std::string>& absorbing_fixtures() {
  static const std::vector<std::string> names = {
      "g0_absorbed", "g1_patrol", "g2_pennies", "g3_geometric", "g4_budget",
      "g6_two_speeds"};
  return names;
}

StationaryProfile pure_profile(const GameModel& model, const std::vector<int>& pos) {
  StationaryProfile profile = uniform_profile(model);
  for (int i = 0; i < model.player_count(); ++i) {
    for (auto& row : profile.pi[i]) {
      const int p = std::min<int>(pos[i], static_cast<int>(row.size()) - 1);
      std::fill(row.begin(), row.end(), 0.0);
      row[p] = 1.0;
    }
  }
  return profile;
}

StationaryProfile with_row(StationaryProfile profile, int player, int state,
                           std::vector<double> row) {
  profile.pi[player][state] = std::move(row);
  return profile;
}

}  // namespace cmg::test
