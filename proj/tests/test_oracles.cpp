// Sanity checks of the reference computations themselves, on cases small
// enough to do by hand.
#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "random_models.hpp"

using namespace cmg;
using test::fixture;

TEST_CASE("joint weights multiply player rows") {
  auto g = fixture("g2_pennies");
  auto p = uniform_profile(g);
  p.pi[0][0] = {0.25, 0.75};
  auto w = test::joint_weights(g, p);
  // Joint order is lexicographic with player 0 most significant.
  CHECK(w[0] == std::vector<double>{0.125, 0.125, 0.375, 0.375});
}

TEST_CASE("series and dense totals agree") {
  Xoshiro256 rng(5);
  for (int t = 0; t < 30; ++t) {
    auto g = test::random_model(rng, {.constraints = 1});
    auto w = test::joint_weights(g, test::random_profile(g, rng));
    auto a = test::series_totals(g, w, g.eta());
    auto b = test::dense_totals(g, w, g.eta());
    CHECK(std::abs(a.hitting - b.hitting) <= 1e-9 * (1 + b.hitting));
    for (int i = 0; i < g.player_count(); ++i) {
      CHECK(std::abs(a.R[i] - b.R[i]) <= 1e-9 * (1 + std::abs(b.R[i])));
    }
  }
}

TEST_CASE("hand values on fixtures") {
  auto g3 = fixture("g3_geometric");
  auto w = test::joint_weights(g3, uniform_profile(g3));
  auto t = test::dense_totals(g3, w, g3.eta());
  CHECK(t.hitting == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(t.R[0] == doctest::Approx(4.0).epsilon(1e-12));
  auto tail = test::tail_series(g3, w, g3.eta());
  REQUIRE(tail.size() > 3);
  CHECK(tail[0] == 1.0);
  CHECK(tail[1] == doctest::Approx(0.75));
  CHECK(tail[2] == doctest::Approx(0.5625));

  auto d1 = test::discounted_fixture("d1_discounted");
  auto s = test::discounted_series(d1.stage(), uniform_profile(d1.stage()), d1.stage().eta(),
                                   d1.beta());
  CHECK(s[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("vertex enumeration on a two-variable LP") {
  // max x + y  s.t.  x + 2y >= -4 (slack), -x >= -3, -y >= -2.
  LinearProgram lp;
  lp.add_variable({}, 1.0);
  lp.add_variable({}, 1.0);
  lp.ge_rows.push_back({{-1.0, 0.0}, -3.0});
  lp.ge_rows.push_back({{0.0, -1.0}, -2.0});
  auto v = test::vertex_enumeration(lp);
  REQUIRE(v.has_value());
  CHECK(*v == doctest::Approx(5.0));
  lp.eq_rows.push_back({{1.0, 1.0}, 6.0});
  CHECK_FALSE(test::vertex_enumeration(lp).has_value());
}

TEST_CASE("deterministic policy scan") {
  auto g4 = fixture("g4_budget");
  auto scan = test::deterministic_policies(g4, 0, uniform_profile(g4), g4.eta(), {0.5});
  CHECK(scan.policies == 2);
  CHECK(scan.best_unconstrained == doctest::Approx(1.0));
  REQUIRE(scan.best_feasible.has_value());
  CHECK(*scan.best_feasible == doctest::Approx(0.0));  // only b meets the budget
  auto none = test::deterministic_policies(g4, 0, uniform_profile(g4), g4.eta(), {2.0});
  CHECK_FALSE(none.best_feasible.has_value());
}

TEST_CASE("strategy mesh covers pure corners") {
  auto g4 = fixture("g4_budget");
  auto mesh = test::strategy_mesh(g4, 0, uniform_profile(g4), g4.eta());
  CHECK(mesh.size() <= 10'000);
  double lo = 1.0, hi = 0.0;
  for (const auto& m : mesh) {
    lo = std::min(lo, m.R);
    hi = std::max(hi, m.R);
    CHECK(m.R + m.C[0] == doctest::Approx(1.0));
  }
  CHECK(lo == 0.0);
  CHECK(hi == 1.0);
}

TEST_CASE("trap recognition") {
  auto g5 = fixture("g5_loop");
  CHECK(test::is_trap(g5, EndComponent{{0}, {{0, 0}}}));
  CHECK_FALSE(test::is_trap(g5, EndComponent{{0}, {{0, 1}}}));
  CHECK_FALSE(test::is_trap(g5, EndComponent{{1}, {{1, 0}}}));  // inside delta
}

TEST_CASE("pennies epsilon") {
  CHECK(test::pennies_epsilon(0.5, 0.5) == 0.0);
  CHECK(test::pennies_epsilon(1.0, 1.0) == doctest::Approx(2.0));
  CHECK(test::pennies_epsilon(0.6, 0.5) == doctest::Approx(0.2));  // player 1 moves to T
}
