#include "cmg/absorption.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "chain.hpp"
#include "cmg/lp.hpp"
#include "cmg/occupation.hpp"

namespace cmg {

namespace {

/// Tarjan SCC over the candidate states using the currently allowed pairs.
std::vector<int> strongly_connected(const GameModel& model,
                                    const std::vector<bool>& candidate,
                                    const std::vector<std::vector<bool>>& allowed) {
  const int S = model.state_count();
  std::vector<int> index(S, -1), low(S, 0), component(S, -1), stack;
  std::vector<bool> on_stack(S, false);
  int counter = 0;
  int components = 0;

  std::function<void(int)> visit = [&](int x) {
    index[x] = low[x] = counter++;
    stack.push_back(x);
    on_stack[x] = true;
    for (int k = 0; k < model.joint_count(x); ++k) {
      if (!allowed[x][k]) continue;
      const auto row = model.transition_row(x, k);
      for (int y = 0; y < S; ++y) {
        if (row[y] <= 0.0 || !candidate[y]) continue;
        if (index[y] < 0) {
          visit(y);
          low[x] = std::min(low[x], low[y]);
        } else if (on_stack[y]) {
          low[x] = std::min(low[x], index[y]);
        }
      }
    }
    if (low[x] == index[x]) {
      while (true) {
        const int y = stack.back();
        stack.pop_back();
        on_stack[y] = false;
        component[y] = components;
        if (y == x) break;
      }
      ++components;
    }
  };
  for (int x = 0; x < S; ++x) {
    if (candidate[x] && index[x] < 0) visit(x);
  }
  return component;
}

std::vector<EndComponent> maximal_end_components(const GameModel& model,
                                                 const Distribution& eta) {
  const int S = model.state_count();
  std::vector<bool> candidate = detail::reachable_transient(model, eta, nullptr);
  std::vector<std::vector<bool>> allowed(S);
  for (int x = 0; x < S; ++x) allowed[x].assign(model.joint_count(x), candidate[x]);

  std::vector<int> component;
  bool changed = true;
  while (changed) {
    changed = false;
    // Drop pairs that can leave the candidate set, then states left without
    // any pair, until stable.
    bool pruned = true;
    while (pruned) {
      pruned = false;
      for (int x = 0; x < S; ++x) {
        if (!candidate[x]) continue;
        bool any = false;
        for (int k = 0; k < model.joint_count(x); ++k) {
          if (!allowed[x][k]) continue;
          const auto row = model.transition_row(x, k);
          for (int y = 0; y < S; ++y) {
            if (row[y] > 0.0 && !candidate[y]) {
              allowed[x][k] = false;
              pruned = true;
              break;
            }
          }
          any = any || allowed[x][k];
        }
        if (!any) {
          candidate[x] = false;
          pruned = true;
        }
      }
    }
    component = strongly_connected(model, candidate, allowed);
    for (int x = 0; x < S; ++x) {
      if (!candidate[x]) continue;
      for (int k = 0; k < model.joint_count(x); ++k) {
        if (!allowed[x][k]) continue;
        const auto row = model.transition_row(x, k);
        for (int y = 0; y < S; ++y) {
          if (row[y] > 0.0 && component[y] != component[x]) {
            allowed[x][k] = false;
            changed = true;
            break;
          }
        }
      }
    }
  }

  std::vector<EndComponent> out;
  std::vector<int> slot(S + 1, -1);
  for (int x = 0; x < S; ++x) {
    if (!candidate[x]) continue;
    int& s = slot[component[x]];
    if (s < 0) {
      s = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[s].states.push_back(x);
    for (int k = 0; k < model.joint_count(x); ++k) {
      if (allowed[x][k]) out[s].pairs.emplace_back(x, k);
    }
  }
  return out;
}

}  // namespace

AbsorptionReport check_absorbing(const GameModel& model, const Distribution& eta) {
  validate_distribution(model, eta);
  AbsorptionReport report;
  report.end_components = maximal_end_components(model, eta);
  report.is_absorbing = report.end_components.empty();
  if (!report.is_absorbing) {
    report.offending_component = report.end_components.front();
  } else {
    report.uniform_bound = uniform_absorption_bound(model, eta);
  }
  return report;
}

AbsorptionReport check_absorbing(const GameModel& model) {
  return check_absorbing(model, model.eta());
}

AbsorptionReport check_absorbing_everywhere(const GameModel& model) {
  const int S = model.state_count();
  return check_absorbing(model, Distribution(S, 1.0 / S));
}

double expected_hitting_time(const GameModel& model,
                             const CorrelatedStrategy& strategy,
                             const Distribution& eta) {
  validate_strategy(model, strategy);
  validate_distribution(model, eta);
  const auto block = detail::transient_block(model, strategy, eta);
  const auto n = static_cast<Eigen::Index>(block.states.size());
  const Eigen::VectorXd h =
      detail::solve_fundamental(block.P, Eigen::VectorXd::Ones(n), false);
  double total = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) total += eta[block.states[r]] * h(r);
  return total;
}

double uniform_absorption_bound(const GameModel& model, const Distribution& eta) {
  auto lp = characteristic_lp(model, eta);
  std::fill(lp.objective.begin(), lp.objective.end(), 1.0);
  const auto solution = solve_lp(lp);
  switch (solution.status) {
    case LpStatus::optimal: return solution.value;
    case LpStatus::unbounded:
      throw Error(ErrorCode::Unbounded,
                  "occupation mass is unbounded: the model is not absorbing");
    case LpStatus::infeasible:
      throw Error(ErrorCode::InfeasibleLP,
                  "characteristic equations infeasible: the model is not absorbing");
    case LpStatus::numerical_failure: break;
  }
  throw Error(ErrorCode::InfeasibleLP, "simplex failed on the absorption bound LP");
}

std::vector<double> tail_probabilities(const GameModel& model,
                                       const CorrelatedStrategy& strategy,
                                       const Distribution& eta, int horizon) {
  if (horizon < 0) throw Error(ErrorCode::InvalidArgument, "negative horizon");
  const Eigen::MatrixXd Q = induced_chain(model, strategy);
  validate_distribution(model, eta);
  const int S = model.state_count();
  Eigen::RowVectorXd v(S);
  for (int x = 0; x < S; ++x) v(x) = model.in_delta(x) ? 0.0 : eta[x];
  Eigen::MatrixXd P = Q;
  for (int y = 0; y < S; ++y) {
    if (model.in_delta(y)) P.col(y).setZero();
  }
  std::vector<double> out;
  out.reserve(horizon + 1);
  for (int t = 0; t <= horizon; ++t) {
    out.push_back(v.sum());
    v = v * P;
  }
  return out;
}

DecayBound geometric_decay(const GameModel& model, const Distribution& eta) {
  validate_distribution(model, eta);
  const int S = model.state_count();
  const auto reach = detail::reachable_transient(model, eta, nullptr);
  std::vector<int> states;
  for (int x = 0; x < S; ++x) {
    if (reach[x]) states.push_back(x);
  }
  DecayBound bound;
  bound.period = std::max<int>(1, static_cast<int>(states.size()));
  if (states.empty()) return bound;

  // survival[x] = max over strategies of P_x{T_delta > t}; deterministic
  // Markov strategies attain the finite-horizon maximum.
  std::vector<double> survival(S, 0.0);
  for (int x : states) survival[x] = 1.0;
  for (int t = 0; t < bound.period; ++t) {
    std::vector<double> next(S, 0.0);
    for (int x : states) {
      double best = 0.0;
      for (int k = 0; k < model.joint_count(x); ++k) {
        const auto row = model.transition_row(x, k);
        double stay = 0.0;
        for (int y : states) stay += row[y] * survival[y];
        best = std::max(best, stay);
      }
      next[x] = best;
    }
    survival = std::move(next);
  }
  double worst = 0.0;
  for (int x : states) worst = std::max(worst, survival[x]);
  bound.epsilon = 1.0 - worst;
  return bound;
}

}  // namespace cmg
