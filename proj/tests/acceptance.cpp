// Acceptance run: one line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <string>

#include "cmg/absorption.hpp"
#include "cmg/best_response.hpp"
#include "cmg/equilibrium.hpp"
#include "cmg/lp.hpp"
#include "cmg/occupation.hpp"
#include "cmg/simulate.hpp"
#include "cmg/transforms.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "random_models.hpp"

using namespace cmg;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Collects the worst observed error per quantity and the first failure.
class Tally {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok && first_failure_.empty()) first_failure_ = what;
    pass_ = pass_ && ok;
  }
  void worst(const std::string& name, double value) {
    for (auto& [n, v] : worst_) {
      if (n == name) {
        v = std::max(v, value);
        return;
      }
    }
    worst_.emplace_back(name, value);
  }
  Outcome outcome(const std::string& extra = {}) const {
    std::ostringstream out;
    out.precision(3);
    const char* sep = "";
    for (const auto& [n, v] : worst_) {
      out << sep << n << " " << v;
      sep = ", ";
    }
    if (!extra.empty()) out << sep << extra;
    if (!first_failure_.empty()) out << "; first failure: " << first_failure_;
    return {pass_, out.str()};
  }

 private:
  bool pass_ = true;
  std::string first_failure_;
  std::vector<std::pair<std::string, double>> worst_;
};

std::vector<GameModel> small_random_models(std::uint64_t seed, int count,
                                           const test::RandomModelOptions& options,
                                           int max_states) {
  Xoshiro256 rng(seed);
  std::vector<GameModel> out;
  while (static_cast<int>(out.size()) < count) {
    auto m = test::random_model(rng, options);
    if (m.state_count() <= max_states) out.push_back(std::move(m));
  }
  return out;
}

Outcome characteristic_fidelity() {
  Tally t;
  Xoshiro256 rng(1001);
  for (const auto& m : small_random_models(1, 100, {.max_transient = 4}, 6)) {
    auto mu = occupation_measure(m, test::random_profile(m, rng), m.eta());
    const double r = residual(m, mu, m.eta());
    const double h = expected_hitting_time(m, disintegrate(m, mu, uniform_strategy(m)),
                                           m.eta());
    const double mass_error = std::abs(mu.total_mass() - h);
    t.worst("max residual", r);
    t.worst("max |mass - E[T]|", mass_error);
    t.check(r < 1e-9, "residual " + std::to_string(r));
    t.check(mass_error <= 1e-9, "mass error " + std::to_string(mass_error));
  }
  return t.outcome("100 models");
}

Outcome disintegration_round_trip() {
  Tally t;
  Xoshiro256 rng(1001);
  for (const auto& m : small_random_models(1, 100, {.max_transient = 4}, 6)) {
    auto mu = occupation_measure(m, test::random_profile(m, rng), m.eta());
    auto again =
        occupation_measure(m, disintegrate(m, mu, uniform_strategy(m)), m.eta());
    double worst = 0.0;
    for (int x = 0; x < m.state_count(); ++x) {
      for (int k = 0; k < m.joint_count(x); ++k) {
        worst = std::max(worst, std::abs(mu.weights[x][k] - again.weights[x][k]));
      }
    }
    t.worst("max entry error", worst);
    t.check(worst <= 1e-10, "entry error " + std::to_string(worst));
  }
  return t.outcome("100 models");
}

PayoffVector realized(const GameModel& m, int player, StationaryProfile profile,
                      const PlayerStrategy& sigma) {
  profile.pi[player] = sigma;
  return payoffs(m, occupation_measure(m, profile, m.eta()));
}

Outcome best_response_oracles() {
  Tally t;
  Xoshiro256 rng(3003);
  std::vector<GameModel> free_models;
  for (const auto& name : test::absorbing_fixtures()) free_models.push_back(test::fixture(name));
  for (auto& m : small_random_models(3, 50, {.max_transient = 2}, 3)) {
    free_models.push_back(std::move(m));
  }
  int compared = 0;
  for (const auto& m : free_models) {
    for (const auto& profile : {uniform_profile(m), test::random_profile(m, rng)}) {
      for (int i = 0; i < m.player_count(); ++i) {
        std::vector<double> free_rho(m.constraint_count(), -kInf);
        auto br = best_response(m, i, profile, m.eta(), free_rho);
        auto scan = test::deterministic_policies(m, i, profile, m.eta(), free_rho);
        const double e = std::abs(br.value - scan.best_unconstrained);
        t.worst("max |LP - enumeration|", e);
        t.check(e <= 1e-6, "enumeration gap " + std::to_string(e));
        ++compared;
      }
    }
  }

  std::vector<GameModel> constrained{test::fixture("g1_patrol"), test::fixture("g4_budget")};
  for (auto& m : small_random_models(33, 30, {.max_transient = 2, .max_players = 2,
                                               .constraints = 2},
                                     3)) {
    constrained.push_back(std::move(m));
  }
  int meshes = 0;
  for (const auto& m : constrained) {
    for (const auto& profile : {uniform_profile(m), test::random_profile(m, rng)}) {
      for (int i = 0; i < m.player_count(); ++i) {
        const auto& rho = m.rho()[i];
        if (!(slater_check(m, i, profile, m.eta(), rho) > 0.0)) continue;
        auto br = best_response(m, i, profile, m.eta(), rho);
        double excess = -kInf;
        for (const auto& point : test::strategy_mesh(m, i, profile, m.eta(), 10'000)) {
          bool feasible = true;
          for (int j = 0; j < m.constraint_count(); ++j) {
            feasible = feasible && point.C[j] >= rho[j];
          }
          if (feasible) excess = std::max(excess, point.R - br.value);
        }
        t.worst("max mesh excess", excess);
        t.check(excess <= 1e-9, "mesh point beats LP by " + std::to_string(excess));
        auto pay = realized(m, i, profile, br.strategy);
        const double attained = std::abs(pay.R[i] - br.value);
        t.worst("max |R(recovered) - LP|", attained);
        t.check(attained <= 1e-8, "recovered strategy off by " + std::to_string(attained));
        for (int j = 0; j < m.constraint_count(); ++j) {
          t.check(pay.C[i][j] >= rho[j] - 1e-8, "recovered strategy infeasible");
        }
        ++meshes;
      }
    }
  }
  t.check(meshes >= 20, "too few constrained cases");
  return t.outcome(std::to_string(compared) + " unconstrained, " + std::to_string(meshes) +
                   " constrained cases");
}

Outcome pennies_equilibrium() {
  Tally t;
  auto m = test::fixture("g2_pennies");
  const auto rho = unconstrained_rho(m, m.eta());
  const auto target = uniform_profile(m);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SolveConfig config;
    config.seed = seed;
    config.restarts = 5;
    config.uniform_start = false;  // random starts only, so the dynamics must work
    config.tolerance = 1e-3;
    config.record_trace = false;
    auto r = solve_equilibrium(m, m.eta(), rho, config);
    const double d = profile_distance(r.profile, target);
    t.worst("max TV distance", d);
    t.worst("max epsilon", r.certificate.epsilon);
    const auto tag = "seed " + std::to_string(seed);
    t.check(r.status == SolveStatus::success, tag + " did not converge");
    t.check(d < 1e-3, tag + " distance " + std::to_string(d));
    t.check(r.certificate.epsilon < 1e-3, tag + " epsilon");
    auto again = verify_equilibrium(m, r.profile, m.eta(), rho, 1e-3);
    t.check(again.equilibrium, tag + " failed re-verification");
  }
  return t.outcome("10 seeds, random starts");
}

Outcome budget_single_player() {
  Tally t;
  auto m = test::fixture("g4_budget");
  SolveConfig config;
  config.seed = 5;
  auto r = solve_equilibrium(m, m.eta(), m.rho(), config);
  const double eR = std::abs(r.certificate.payoffs.R[0] - 0.5);
  const double eC = std::abs(r.certificate.payoffs.C[0][0] - 0.5);
  t.worst("|R - 0.5|", eR);
  t.worst("|C - 0.5|", eC);
  t.check(r.status == SolveStatus::success, "no convergence");
  t.check(eR <= 1e-8 && eC <= 1e-8, "payoffs off");
  return t.outcome();
}

Outcome discounted_reduction() {
  Tally t;
  Xoshiro256 rng(6006);
  for (double beta : {0.5, 0.9, 0.99}) {
    for (int k = 0; k < 20; ++k) {
      DiscountedModel d(test::random_stage_description(rng, 4, 3, 3), beta);
      const auto& stage = d.stage();
      auto g = discount_to_absorbing(d);
      auto profile = test::random_profile(stage, rng);
      auto extended = profile;
      for (auto& player : extended.pi) player.push_back({1.0});
      auto pay = payoffs(g, occupation_measure(g, extended, g.eta()));
      auto series = test::discounted_series(stage, profile, stage.eta(), beta);
      for (int i = 0; i < stage.player_count(); ++i) {
        const double e = std::abs(pay.R[i] - series[i]);
        t.worst("max payoff error", e);
        t.check(e <= 1e-8, "payoff error " + std::to_string(e));
      }
      const double eb = std::abs(uniform_absorption_bound(g, g.eta()) - 1.0 / (1.0 - beta));
      t.worst("max bound error", eb);
      t.check(eb <= 1e-9, "bound error " + std::to_string(eb));
    }
  }
  return t.outcome("60 models");
}

/// Rewrites the kernel with explicit entries and turns one reachable pair
/// into a self-loop.
ModelDescription inject_loop(const std::string& name, Xoshiro256& rng, int& state) {
  auto d = test::fixture_description(name);
  auto m = build_model(d);
  std::vector<bool> seen(m.state_count(), false);
  std::queue<int> frontier;
  for (int x = 0; x < m.state_count(); ++x) {
    if (m.eta()[x] > 0.0) {
      seen[x] = true;
      frontier.push(x);
    }
  }
  std::vector<int> candidates;
  while (!frontier.empty()) {
    const int x = frontier.front();
    frontier.pop();
    if (m.in_delta(x)) continue;
    candidates.push_back(x);
    for (int k = 0; k < m.joint_count(x); ++k) {
      for (int y = 0; y < m.state_count(); ++y) {
        if (m.transition(x, k, y) > 0.0 && !seen[y]) {
          seen[y] = true;
          frontier.push(y);
        }
      }
    }
  }
  state = candidates[test::uniform_int(rng, 0, static_cast<int>(candidates.size()) - 1)];
  const int victim = test::uniform_int(rng, 0, m.joint_count(state) - 1);
  d.kernel.clear();
  for (int x = 0; x < m.state_count(); ++x) {
    for (int k = 0; k < m.joint_count(x); ++k) {
      if (x == state && k == victim) {
        d.kernel.push_back({x, m.joint_action(x, k), x, 1.0});
        continue;
      }
      for (int y = 0; y < m.state_count(); ++y) {
        const double p = m.transition(x, k, y);
        if (p > 0.0) d.kernel.push_back({x, m.joint_action(x, k), y, p});
      }
    }
  }
  return d;
}

Outcome absorption_detection() {
  Tally t;
  auto g5 = test::fixture("g5_loop");
  auto r5 = check_absorbing(g5, g5.eta());
  t.check(!r5.is_absorbing, "G5 passed");
  t.check(r5.offending_component && test::is_trap(g5, *r5.offending_component),
          "G5 witness is not a trap");

  Xoshiro256 rng(7007);
  const std::vector<std::string> sources{"g1_patrol", "g2_pennies", "g3_geometric",
                                         "g4_budget", "g6_two_speeds"};
  for (int k = 0; k < 10; ++k) {
    const auto& name = sources[k % sources.size()];
    int state = -1;
    auto m = build_model(inject_loop(name, rng, state));
    auto r = check_absorbing(m, m.eta());
    const auto tag = name + " loop at " + m.states()[state];
    t.check(!r.is_absorbing, tag + " passed");
    t.check(r.offending_component && test::is_trap(m, *r.offending_component),
            tag + " witness is not a trap");
  }
  int absorbing = 0;
  for (const auto& name : test::absorbing_fixtures()) {
    auto m = test::fixture(name);
    t.check(check_absorbing(m, m.eta()).is_absorbing, name + " flagged");
    ++absorbing;
  }
  return t.outcome("G5 + 10 mutants flagged, " + std::to_string(absorbing) +
                   " absorbing fixtures pass");
}

Outcome bound_dominance() {
  Tally t;
  Xoshiro256 rng(8008);
  for (const auto& name : test::absorbing_fixtures()) {
    auto m = test::fixture(name);
    const double bound = uniform_absorption_bound(m, m.eta());
    for (int k = 0; k < 100; ++k) {
      const double h = expected_hitting_time(m, test::random_strategy(m, rng), m.eta());
      t.worst("max E[T] - bound", h - bound);
      t.check(h <= bound + 1e-9, name + " strategy exceeds bound");
    }
    auto lp = characteristic_lp(m, m.eta());
    std::fill(lp.objective.begin(), lp.objective.end(), 1.0);
    auto sol = solve_lp(lp);
    t.check(sol.status == LpStatus::optimal, name + " LP not optimal");
    if (sol.status != LpStatus::optimal) continue;
    auto mu = measure_from_lp(m, lp, sol.primal, m.eta());
    auto sigma = disintegrate(m, mu, uniform_strategy(m));
    const double e = std::abs(expected_hitting_time(m, sigma, m.eta()) - bound);
    t.worst("max |E[T](maximizer) - bound|", e);
    t.check(e <= 1e-8, name + " maximizer misses bound");
  }
  return t.outcome();
}

Outcome monte_carlo() {
  Tally t;
  Xoshiro256 rng(9009);
  std::uint64_t seed = 90;
  double worst_z = 0.0;
  auto close = [&](double exact, const Estimate& e, const std::string& what) {
    const double diff = std::abs(exact - e.mean);
    if (e.standard_error > 0.0) worst_z = std::max(worst_z, diff / e.standard_error);
    t.check(diff <= 4.0 * e.standard_error + 1e-12, what);
  };
  for (const auto& name : test::absorbing_fixtures()) {
    auto m = test::fixture(name);
    for (const auto& profile : {uniform_profile(m), test::random_profile(m, rng)}) {
      auto exact = payoffs(m, occupation_measure(m, profile, m.eta()));
      const double h = expected_hitting_time(m, product_strategy(m, profile), m.eta());
      auto est = estimate(m, profile, m.eta(), 100'000, seed++);
      t.check(est.truncated == 0, name + " truncated trajectories");
      close(h, est.hitting_time, name + " E[T]");
      for (int i = 0; i < m.player_count(); ++i) {
        close(exact.R[i], est.reward[i], name + " R");
        for (int j = 0; j < m.constraint_count(); ++j) {
          close(exact.C[i][j], est.cost[i][j], name + " C");
        }
      }
    }
  }
  t.worst("max |z|", worst_z);
  return t.outcome(std::to_string(test::absorbing_fixtures().size()) +
                   " fixtures x 2 profiles, n = 1e5");
}

Outcome unconstrained_consistency() {
  Tally t;
  auto m = test::fixture("g2_pennies");
  const auto rho = unconstrained_rho(m, m.eta());
  auto compare = [&](const StationaryProfile& p, const EquilibriumCertificate& a) {
    auto b = verify_unconstrained_equilibrium(m, p, m.eta(), a.tolerance);
    double e = std::abs(a.epsilon - b.epsilon);
    for (int i = 0; i < m.player_count(); ++i) {
      e = std::max(e, std::abs(a.gap[i] - b.gap[i]));
      e = std::max(e, std::abs(a.best_response_value[i] - b.best_response_value[i]));
      e = std::max(e, std::abs(a.payoffs.R[i] - b.payoffs.R[i]));
      t.check(a.feasible[i] && a.response_feasible[i], "constrained path infeasible");
    }
    t.worst("max certificate difference", e);
    t.check(e <= 1e-8, "certificates differ by " + std::to_string(e));
    t.check(a.equilibrium == b.equilibrium, "verdicts differ");
  };
  SolveConfig config;
  config.seed = 10;
  config.restarts = 2;
  config.uniform_start = false;
  config.tolerance = 1e-3;
  auto r = solve_equilibrium(m, m.eta(), rho, config);
  compare(r.profile, r.certificate);
  Xoshiro256 rng(1010);
  for (int k = 0; k < 20; ++k) {
    auto p = test::random_profile(m, rng);
    compare(p, verify_equilibrium(m, p, m.eta(), rho, 1e-3));
  }
  return t.outcome("solver result + 20 random profiles");
}

}  // namespace

int main() {
  struct Criterion {
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"characteristic-equation fidelity", characteristic_fidelity},
      {"disintegration round trip", disintegration_round_trip},
      {"best-response oracle equivalence", best_response_oracles},
      {"equilibrium on absorbing matching pennies", pennies_equilibrium},
      {"constrained single-player budget game", budget_single_player},
      {"discounted reduction", discounted_reduction},
      {"absorption detection", absorption_detection},
      {"uniform bound dominance", bound_dominance},
      {"Monte Carlo agreement", monte_carlo},
      {"unconstrained-as-constrained consistency", unconstrained_consistency},
  };
  const auto start = std::chrono::steady_clock::now();
  int failures = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[c].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += o.pass ? 0 : 1;
    std::printf("[%s] criterion %zu: %s (%s; %.2fs)\n", o.pass ? "PASS" : "FAIL", c + 1,
                criteria[c].title, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of %zu criteria passed in %.1fs\n",
              static_cast<int>(criteria.size()) - failures, criteria.size(), total);
  return failures == 0 ? 0 : 1;
}
