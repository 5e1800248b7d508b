#include "cmg/best_response.hpp"

#include <cmath>
#include <limits>

#include "chain.hpp"

namespace cmg {

GameModel freeze_opponents(const GameModel& model, int player,
                           const StationaryProfile& others) {
  const int N = model.player_count();
  if (player < 0 || player >= N) {
    throw Error(ErrorCode::InvalidArgument, "player index out of range");
  }
  validate_profile(model, others);
  const int S = model.state_count();
  const int p = model.constraint_count();

  ModelDescription d;
  d.states = model.states();
  d.actions = {model.actions(player)};
  d.admissible.resize(1);
  for (int x = 0; x < S; ++x) d.admissible[0].push_back(model.admissible(player, x));
  d.delta = model.delta();
  d.eta = model.eta();
  d.constraint_count = p;
  d.rho = {model.rho()[player]};

  for (int x = 0; x < S; ++x) {
    // Renormalize by the opponents' own totals so that rounding in the input
    // profile cannot push averaged rows off the simplex.
    double norm = 1.0;
    for (int j = 0; j < N; ++j) {
      if (j == player) continue;
      double total = 0.0;
      for (double w : others.pi[j][x]) total += w;
      norm *= total;
    }
    const auto& own = model.admissible(player, x);
    std::vector<std::vector<double>> kernel(own.size(), std::vector<double>(S, 0.0));
    std::vector<double> reward(own.size(), 0.0);
    std::vector<std::vector<double>> cost(p, std::vector<double>(own.size(), 0.0));
    for (int k = 0; k < model.joint_count(x); ++k) {
      const auto& a = model.joint_action(x, k);
      double w = 1.0 / norm;
      for (int j = 0; j < N; ++j) {
        if (j == player) continue;
        w *= others.pi[j][x][model.admissible_position(j, x, a[j])];
      }
      if (w == 0.0) continue;
      const int pos = model.admissible_position(player, x, a[player]);
      const auto row = model.transition_row(x, k);
      for (int y = 0; y < S; ++y) kernel[pos][y] += w * row[y];
      reward[pos] += w * model.reward(player, x, k);
      for (int r = 0; r < p; ++r) cost[r][pos] += w * model.cost(player, r, x, k);
    }
    for (std::size_t pos = 0; pos < own.size(); ++pos) {
      const JointAction a{own[pos]};
      for (int y = 0; y < S; ++y) {
        if (kernel[pos][y] != 0.0) d.kernel.push_back({x, a, y, kernel[pos][y]});
      }
      if (reward[pos] != 0.0) d.rewards.push_back({0, x, a, reward[pos]});
      for (int r = 0; r < p; ++r) {
        if (cost[r][pos] != 0.0) d.costs.push_back({0, r, x, a, cost[r][pos]});
      }
    }
  }
  return build_model(d);
}

namespace {

void check_rho(const GameModel& view, const std::vector<double>& rho_i) {
  if (static_cast<int>(rho_i.size()) != view.constraint_count()) {
    throw Error(ErrorCode::InvalidArgument,
                "rho has " + std::to_string(rho_i.size()) + " entries, model has " +
                    std::to_string(view.constraint_count()) + " constraint rows");
  }
}

void add_constraint_rows(const GameModel& view, const std::vector<double>& rho_i,
                         LinearProgram& lp) {
  for (int j = 0; j < view.constraint_count(); ++j) {
    if (!std::isfinite(rho_i[j])) continue;  // -inf: no constraint
    LinearProgram::Row row{std::vector<double>(lp.variable_count(), 0.0), rho_i[j]};
    for (int v = 0; v < lp.variable_count(); ++v) {
      const auto key = lp.variable_index[v];
      if (key.state >= 0) row.coefficients[v] = view.cost(0, j, key.state, key.action);
    }
    lp.ge_rows.push_back(std::move(row));
  }
}

bool has_finite_rho(const std::vector<double>& rho_i) {
  for (double r : rho_i) {
    if (std::isfinite(r)) return true;
  }
  return false;
}

}  // namespace

LinearProgram build_br_lp(const GameModel& view, const Distribution& eta,
                          const std::vector<double>& rho_i) {
  if (view.player_count() != 1) {
    throw Error(ErrorCode::InvalidArgument, "build_br_lp expects a frozen view");
  }
  check_rho(view, rho_i);
  auto lp = characteristic_lp(view, eta);
  for (int v = 0; v < lp.variable_count(); ++v) {
    const auto key = lp.variable_index[v];
    lp.objective[v] = view.reward(0, key.state, key.action);
  }
  add_constraint_rows(view, rho_i, lp);
  return lp;
}

LinearProgram build_br_lp(const GameModel& model, int player,
                          const StationaryProfile& others, const Distribution& eta,
                          const std::vector<double>& rho_i) {
  return build_br_lp(freeze_opponents(model, player, others), eta, rho_i);
}

BestResponse best_response(const GameModel& view, const Distribution& eta,
                           const std::vector<double>& rho_i,
                           const PlayerStrategy& fallback) {
  const auto lp = build_br_lp(view, eta, rho_i);
  BestResponse out;
  out.lp = solve_lp(lp);
  switch (out.lp.status) {
    case LpStatus::optimal: break;
    case LpStatus::infeasible:
      throw Error(ErrorCode::ConstraintInfeasible,
                  "no response satisfies the player's constraints");
    case LpStatus::unbounded:
      throw Error(ErrorCode::Unbounded,
                  "best-response LP unbounded: the frozen model is not absorbing");
    case LpStatus::numerical_failure:
      throw Error(ErrorCode::InfeasibleLP, "simplex failed on the best-response LP");
  }
  auto mu = measure_from_lp(view, lp, out.lp.primal, eta);
  out.value = out.lp.value;
  out.constraint_values = payoffs(view, mu).C[0];
  mu.kind = MeasureKind::player_marginal;
  mu.player = 0;
  PlayerStrategy theta = fallback;
  if (theta.empty()) theta = uniform_profile(view).pi[0];
  out.strategy = disintegrate_player(view, mu, theta);
  out.marginal = std::move(mu);
  return out;
}

BestResponse best_response(const GameModel& model, int player,
                           const StationaryProfile& others, const Distribution& eta,
                           const std::vector<double>& rho_i,
                           const PlayerStrategy& fallback) {
  auto out = best_response(freeze_opponents(model, player, others), eta, rho_i,
                           fallback);
  out.marginal.player = player;
  return out;
}

double slater_check(const GameModel& view, const Distribution& eta,
                    const std::vector<double>& rho_i) {
  check_rho(view, rho_i);
  if (!has_finite_rho(rho_i)) return std::numeric_limits<double>::infinity();
  auto lp = characteristic_lp(view, eta);
  add_constraint_rows(view, rho_i, lp);
  // s = s_plus - s_minus enters every constraint row as C_j - s >= rho_j.
  const int plus = lp.add_variable({-1, 0}, 1.0);
  const int minus = lp.add_variable({-1, 1}, -1.0);
  for (auto& row : lp.ge_rows) {
    row.coefficients[plus] = -1.0;
    row.coefficients[minus] = 1.0;
  }
  const auto solution = solve_lp(lp);
  switch (solution.status) {
    case LpStatus::optimal: return solution.value;
    case LpStatus::unbounded:
      throw Error(ErrorCode::Unbounded,
                  "Slater LP unbounded: the frozen model is not absorbing");
    case LpStatus::infeasible:
      throw Error(ErrorCode::InfeasibleLP, "Slater LP infeasible");
    case LpStatus::numerical_failure: break;
  }
  throw Error(ErrorCode::InfeasibleLP, "simplex failed on the Slater LP");
}

double slater_check(const GameModel& model, int player,
                    const StationaryProfile& others, const Distribution& eta,
                    const std::vector<double>& rho_i) {
  return slater_check(freeze_opponents(model, player, others), eta, rho_i);
}

double unconstrained_best_value(const GameModel& view, const Distribution& eta) {
  if (view.player_count() != 1) {
    throw Error(ErrorCode::InvalidArgument,
                "unconstrained_best_value expects a frozen view");
  }
  validate_distribution(view, eta);
  const int S = view.state_count();
  const auto reach = detail::reachable_transient(view, eta, nullptr);
  std::vector<int> states;
  std::vector<int> local(S, -1);
  for (int x = 0; x < S; ++x) {
    if (reach[x]) {
      local[x] = static_cast<int>(states.size());
      states.push_back(x);
    }
  }
  const auto n = static_cast<Eigen::Index>(states.size());
  if (n == 0) return 0.0;

  std::vector<int> policy(n, 0);
  Eigen::VectorXd v;
  for (int round = 0; round < 10000; ++round) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd r(n);
    for (Eigen::Index s = 0; s < n; ++s) {
      const int x = states[s];
      r(s) = view.reward(0, x, policy[s]);
      const auto row = view.transition_row(x, policy[s]);
      for (int y = 0; y < S; ++y) {
        if (local[y] >= 0) P(s, local[y]) = row[y];
      }
    }
    v = detail::solve_fundamental(P, r, false);

    bool improved = false;
    for (Eigen::Index s = 0; s < n; ++s) {
      const int x = states[s];
      auto q = [&](int k) {
        double total = view.reward(0, x, k);
        const auto row = view.transition_row(x, k);
        for (int y = 0; y < S; ++y) {
          if (local[y] >= 0) total += row[y] * v(local[y]);
        }
        return total;
      };
      const double current = q(policy[s]);
      for (int k = 0; k < view.joint_count(x); ++k) {
        if (q(k) > current + 1e-12 * (1.0 + std::abs(current))) {
          policy[s] = k;
          improved = true;
          break;
        }
      }
    }
    if (!improved) break;
  }
  double value = 0.0;
  for (Eigen::Index s = 0; s < n; ++s) value += eta[states[s]] * v(s);
  return value;
}

}  // namespace cmg
