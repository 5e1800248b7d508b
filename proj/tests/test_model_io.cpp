#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "cmg/model_io.hpp"
#include "fixtures.hpp"
#include "random_models.hpp"

using namespace cmg;
using io::Json;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

Json pennies_json() { return io::read_json(test::fixture_path("g2_pennies")); }

}  // namespace

TEST_CASE("numbers and fractions") {
  CHECK(io::parse_number(Json(0.25)) == 0.25);
  CHECK(io::parse_number(Json(3)) == 3.0);
  CHECK(io::parse_number(Json("1/3")) == 1.0 / 3.0);
  CHECK(io::parse_number(Json("-2/4")) == -0.5);
  CHECK(io::parse_number(Json("0.125")) == 0.125);
  CHECK(io::parse_number(Json("1e-3")) == 1e-3);
  for (const char* bad : {"1/0", "1/-2", "a/2", "1/2x", "", "0.5 ", "1//2"}) {
    CHECK(code_of([&] { io::parse_number(Json(bad)); }) == ErrorCode::Schema);
  }
  CHECK(code_of([] { io::parse_number(Json(nullptr)); }) == ErrorCode::Schema);
  CHECK(code_of([] { io::parse_number(Json::array()); }) == ErrorCode::Schema);
}

TEST_CASE("header and key checks") {
  auto doc = pennies_json();
  CHECK_NOTHROW(io::parse_model(doc));

  auto wrong_format = doc;
  wrong_format["format"] = "cmg-profile";
  CHECK(code_of([&] { io::parse_model(wrong_format); }) == ErrorCode::Schema);
  auto wrong_version = doc;
  wrong_version["version"] = 2;
  CHECK(code_of([&] { io::parse_model(wrong_version); }) == ErrorCode::Schema);
  auto extra = doc;
  extra["kernal"] = Json::array();
  CHECK(code_of([&] { io::parse_model(extra); }) == ErrorCode::Schema);
  auto extra_entry = doc;
  extra_entry["kernel"][0]["prob"] = 1;
  CHECK(code_of([&] { io::parse_model(extra_entry); }) == ErrorCode::Schema);
  auto missing = doc;
  missing.erase("eta");
  CHECK(code_of([&] { io::parse_model(missing); }) == ErrorCode::Schema);
  auto unknown_state = doc;
  unknown_state["kernel"][0]["next"] = "nowhere";
  CHECK(code_of([&] { io::parse_model(unknown_state); }) == ErrorCode::Schema);
  auto unknown_action = doc;
  unknown_action["rewards"][0]["action"] = {"H", "X"};
  CHECK(code_of([&] { io::parse_model(unknown_action); }) == ErrorCode::Schema);
  auto short_action = doc;
  short_action["rewards"][0]["action"] = {"H"};
  CHECK(code_of([&] { io::parse_model(short_action); }) == ErrorCode::Schema);
  auto duplicate = doc;
  duplicate["kernel"].push_back(duplicate["kernel"][0]);
  CHECK(code_of([&] { io::parse_model(duplicate); }) == ErrorCode::Schema);
  auto players = doc;
  players["players"] = 3;
  CHECK(code_of([&] { io::parse_model(players); }) == ErrorCode::Schema);
}

TEST_CASE("semantic errors come from the model builder") {
  auto doc = pennies_json();
  doc["kernel"][0]["p"] = "1/2";
  CHECK(code_of([&] { io::parse_model(doc); }) == ErrorCode::NonStochasticRow);
}

TEST_CASE("absorbing and discounted files are kept apart") {
  auto discounted = io::read_json(test::fixture_path("d1_discounted"));
  CHECK(code_of([&] { io::parse_model(discounted); }) == ErrorCode::Schema);
  auto d = io::parse_discounted_model(discounted);
  CHECK(d.beta() == 0.5);
  CHECK(code_of([&] { io::parse_discounted_model(pennies_json()); }) == ErrorCode::Schema);
  auto bad_beta = discounted;
  bad_beta["discount"]["beta"] = 1;
  CHECK(code_of([&] { io::parse_discounted_model(bad_beta); }) == ErrorCode::InvalidModel);
  auto doc = io::parse_model_document(discounted);
  REQUIRE(doc.discount.has_value());
  CHECK(*doc.discount == 0.5);
}

TEST_CASE("file errors") {
  CHECK(code_of([] { io::read_json("/nonexistent/model.json"); }) == ErrorCode::Io);
  const auto path = std::filesystem::temp_directory_path() / "cmg_bad.json";
  {
    std::ofstream out(path);
    out << "{ \"format\": ";
  }
  CHECK(code_of([&] { io::read_json(path); }) == ErrorCode::Schema);
  std::filesystem::remove(path);
}

TEST_CASE("profiles") {
  auto g = io::parse_model(pennies_json());
  auto p = io::profile_from_json(g, io::read_json(test::fixture_path("g2_equilibrium")));
  CHECK(p.pi[0][0] == std::vector<double>{0.5, 0.5});
  CHECK(p.pi[1][1] == std::vector<double>{0.5, 0.5});  // omitted state: uniform

  Json bare = Json::array({Json{{"s0", {{"H", 1}}}}, Json::object()});
  auto q = io::profile_from_json(g, bare);
  CHECK(q.pi[0][0] == std::vector<double>{1.0, 0.0});
  CHECK(q.pi[1][0] == std::vector<double>{0.5, 0.5});

  Json bad_action = Json::array({Json{{"s0", {{"X", 1}}}}, Json::object()});
  CHECK(code_of([&] { io::profile_from_json(g, bad_action); }) == ErrorCode::Schema);
  Json bad_state = Json::array({Json{{"s9", {{"H", 1}}}}, Json::object()});
  CHECK(code_of([&] { io::profile_from_json(g, bad_state); }) == ErrorCode::Schema);
  Json one_player = Json::array({Json::object()});
  CHECK(code_of([&] { io::profile_from_json(g, one_player); }) == ErrorCode::Schema);
  Json not_a_distribution = Json::array({Json{{"s0", {{"H", 0.7}}}}, Json::object()});
  CHECK_THROWS_AS(io::profile_from_json(g, not_a_distribution), Error);

  auto round = io::profile_from_json(g, io::profile_document(g, q));
  CHECK(round.pi == q.pi);
}

TEST_CASE("admissible map survives a round trip") {
  auto g = test::fixture("g1_patrol");
  auto doc = io::model_to_json(g);
  auto reread = io::parse_model(doc);
  CHECK(reread.describe().admissible == g.describe().admissible);
}

TEST_CASE("rho") {
  auto g = test::fixture("g1_patrol");
  auto rho = io::rho_from_json(g, Json::array({Json::array({"1/5"}), Json::array({0.1})}));
  CHECK(rho == Rho{{0.2}, {0.1}});
  CHECK(io::rho_from_json(g, io::rho_to_json(rho)) == rho);
  CHECK(code_of([&] { io::rho_from_json(g, Json::array({Json::array({1})})); }) ==
        ErrorCode::Schema);
  CHECK(code_of([&] {
          io::rho_from_json(g, Json::array({Json::array({1, 2}), Json::array({1, 2})}));
        }) == ErrorCode::Schema);
}

TEST_CASE("serialization round trip on random models") {
  Xoshiro256 rng(31);
  for (int t = 0; t < 40; ++t) {
    auto g = test::random_model(rng, {.constraints = 2});
    auto h = io::parse_model(Json::parse(io::model_to_json(g).dump()));
    REQUIRE(h.state_count() == g.state_count());
    CHECK(h.states() == g.states());
    CHECK(h.delta() == g.delta());
    CHECK(h.eta() == g.eta());
    for (int x = 0; x < g.state_count(); ++x) {
      REQUIRE(h.joint_count(x) == g.joint_count(x));
      for (int k = 0; k < g.joint_count(x); ++k) {
        CHECK(h.joint_action(x, k) == g.joint_action(x, k));
        for (int y = 0; y < g.state_count(); ++y) {
          CHECK(h.transition(x, k, y) == g.transition(x, k, y));
        }
      }
    }
  }
}

TEST_CASE("certificates serialize non-finite values as null") {
  EquilibriumCertificate c;
  c.feasible = {true};
  c.response_feasible = {false};
  c.gap = {std::nan("")};
  c.best_response_value = {std::nan("")};
  c.slack = {std::numeric_limits<double>::infinity()};
  c.epsilon = std::numeric_limits<double>::infinity();
  c.payoffs.R = {0.0};
  c.payoffs.C = {{}};
  auto j = io::certificate_to_json(c);
  CHECK(j["epsilon"].is_null());
  CHECK(j["gap"][0].is_null());
  CHECK(j["slack"][0].is_null());
  CHECK_NOTHROW((void)j.dump());
}
