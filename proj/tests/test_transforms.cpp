#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "cmg/absorption.hpp"
#include "cmg/equilibrium.hpp"
#include "cmg/occupation.hpp"
#include "cmg/transforms.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "random_models.hpp"

using namespace cmg;

namespace {

// Stage profile plus the forced action at the cemetery.
StationaryProfile extend(const StationaryProfile& stage) {
  StationaryProfile p = stage;
  for (auto& player : p.pi) player.push_back({1.0});
  return p;
}

Distribution extend(Distribution eta) {
  eta.push_back(0.0);
  return eta;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("one-state discounted game") {
  auto d = test::discounted_fixture("d1_discounted");
  CHECK(d.beta() == 0.5);
  auto g = discount_to_absorbing(d);
  REQUIRE(g.state_count() == 2);
  CHECK(g.states()[1] == kCemeteryState);
  CHECK(g.in_delta(1));
  CHECK(g.eta()[1] == 0.0);
  CHECK(check_absorbing(g, g.eta()).is_absorbing);
  CHECK(uniform_absorption_bound(g, g.eta()) == doctest::Approx(2.0).epsilon(1e-12));
  auto pay = payoffs(g, occupation_measure(g, uniform_profile(g), g.eta()));
  CHECK(pay.R[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(g.transition(0, 0, 0) == 0.5);
  CHECK(g.transition(0, 0, 1) == 0.5);
}

TEST_CASE("cemetery admits only the first action of each player") {
  auto g = discount_to_absorbing(test::discounted_fixture("d2_pennies_discounted"));
  const int c = g.state_count() - 1;
  for (int i = 0; i < g.player_count(); ++i) {
    CHECK(g.admissible(i, c) == std::vector<int>{0});
  }
  CHECK(g.joint_count(c) == 1);
  CHECK(g.transition(c, 0, c) == 1.0);
}

TEST_CASE("discounted pennies keeps its mixed equilibrium") {
  auto g = discount_to_absorbing(test::discounted_fixture("d2_pennies_discounted"));
  auto cert = verify_unconstrained_equilibrium(g, uniform_profile(g), g.eta(), 1e-8);
  CHECK(cert.equilibrium);
  CHECK(std::abs(cert.payoffs.R[0]) <= 1e-12);
  CHECK(uniform_absorption_bound(g, g.eta()) == doctest::Approx(10.0).epsilon(1e-12));
  auto pure = verify_unconstrained_equilibrium(g, test::pure_profile(g, {0, 0}), g.eta(), 1e-8);
  CHECK(pure.gap[1] == doctest::Approx(20.0).epsilon(1e-10));
}

TEST_CASE("discount factor range and reserved names") {
  auto desc = test::fixture_description("d1_discounted");
  for (double beta : {0.0, 1.0, -0.5, 1.5, std::nan("")}) {
    CHECK(code_of([&] { DiscountedModel(desc, beta); }) == ErrorCode::InvalidModel);
  }
  auto with_delta = desc;
  with_delta.delta = {0};
  CHECK(code_of([&] { DiscountedModel(with_delta, 0.5); }) == ErrorCode::InvalidModel);
  auto clash = desc;
  clash.states[0] = kCemeteryState;
  CHECK(code_of([&] { discount_to_absorbing(DiscountedModel(clash, 0.5)); }) ==
        ErrorCode::InvalidModel);
}

TEST_CASE("transformed payoffs equal the discounted series") {
  Xoshiro256 rng(404);
  for (double beta : {0.5, 0.9, 0.99}) {
    for (int t = 0; t < 20; ++t) {
      DiscountedModel d(test::random_stage_description(rng, 4, 3, 3), beta);
      auto g = discount_to_absorbing(d);
      const auto& stage = d.stage();
      auto profile = test::random_profile(stage, rng);
      auto pay = payoffs(g, occupation_measure(g, extend(profile), g.eta()));
      auto series = test::discounted_series(stage, profile, stage.eta(), beta);
      for (int i = 0; i < stage.player_count(); ++i) {
        CHECK(std::abs(pay.R[i] - series[i]) <= 1e-8);
      }
      CHECK(g.eta() == extend(stage.eta()));
      CHECK(std::abs(uniform_absorption_bound(g, g.eta()) - 1.0 / (1.0 - beta)) <= 1e-9);
      CHECK(std::abs(expected_hitting_time(g, product_strategy(g, extend(profile)), g.eta()) -
                     1.0 / (1.0 - beta)) <= 1e-9);
    }
  }
}
