#include "cmg/occupation.hpp"

#include <algorithm>
#include <cmath>

#include "chain.hpp"

namespace cmg {

double OccupationMeasure::state_mass(int state) const {
  double total = 0.0;
  for (double w : weights[state]) total += w;
  return total;
}

double OccupationMeasure::total_mass() const {
  double total = 0.0;
  for (std::size_t x = 0; x < weights.size(); ++x) {
    total += state_mass(static_cast<int>(x));
  }
  return total;
}

std::vector<double> OccupationMeasure::state_marginal() const {
  std::vector<double> out(weights.size());
  for (std::size_t x = 0; x < weights.size(); ++x) {
    out[x] = state_mass(static_cast<int>(x));
  }
  return out;
}

std::vector<double> state_occupancy(const GameModel& model,
                                    const CorrelatedStrategy& strategy,
                                    const Distribution& eta) {
  validate_strategy(model, strategy);
  validate_distribution(model, eta);
  const auto block = detail::transient_block(model, strategy, eta);
  const auto n = static_cast<Eigen::Index>(block.states.size());
  Eigen::VectorXd source(n);
  for (Eigen::Index r = 0; r < n; ++r) source(r) = eta[block.states[r]];
  // Row-vector equation xi (I - P) = eta, solved as (I - P)^T xi = eta.
  const Eigen::VectorXd xi = detail::solve_fundamental(block.P, source, true);
  std::vector<double> out(model.state_count(), 0.0);
  for (Eigen::Index r = 0; r < n; ++r) out[block.states[r]] = std::max(0.0, xi(r));
  return out;
}

OccupationMeasure occupation_measure(const GameModel& model,
                                     const CorrelatedStrategy& strategy,
                                     const Distribution& eta) {
  const auto xi = state_occupancy(model, strategy, eta);
  OccupationMeasure mu;
  mu.eta_ref = eta;
  mu.weights.resize(model.state_count());
  for (int x = 0; x < model.state_count(); ++x) {
    mu.weights[x].resize(model.joint_count(x));
    for (int k = 0; k < model.joint_count(x); ++k) {
      mu.weights[x][k] = xi[x] * strategy.pi[x][k];
    }
  }
  return mu;
}

OccupationMeasure occupation_measure(const GameModel& model,
                                     const StationaryProfile& profile,
                                     const Distribution& eta) {
  return occupation_measure(model, product_strategy(model, profile), eta);
}

double residual(const GameModel& model, const OccupationMeasure& mu,
                const Distribution& eta) {
  const int S = model.state_count();
  std::vector<double> inflow(S, 0.0);
  double misplaced = 0.0;
  for (int x = 0; x < S; ++x) {
    for (int k = 0; k < model.joint_count(x); ++k) {
      const double w = mu.weights[x][k];
      if (w < 0.0) misplaced += -w;
      if (model.in_delta(x)) {
        misplaced += std::abs(w);
        continue;
      }
      if (w == 0.0) continue;
      const auto row = model.transition_row(x, k);
      for (int y = 0; y < S; ++y) inflow[y] += w * row[y];
    }
  }
  double worst = 0.0;
  for (int y = 0; y < S; ++y) {
    if (model.in_delta(y)) continue;
    worst = std::max(worst, std::abs(mu.state_mass(y) - eta[y] - inflow[y]));
  }
  return worst + misplaced;
}

CorrelatedStrategy disintegrate(const GameModel& model,
                                const OccupationMeasure& mu,
                                const CorrelatedStrategy& fallback) {
  validate_strategy(model, fallback);
  CorrelatedStrategy out;
  out.pi.resize(model.state_count());
  for (int x = 0; x < model.state_count(); ++x) {
    const double mass = model.in_delta(x) ? 0.0 : mu.state_mass(x);
    if (mass <= kNullOccupancy) {
      out.pi[x] = fallback.pi[x];
      continue;
    }
    out.pi[x].resize(model.joint_count(x));
    for (int k = 0; k < model.joint_count(x); ++k) {
      out.pi[x][k] = std::max(0.0, mu.weights[x][k]) / mass;
    }
  }
  return out;
}

std::vector<std::vector<double>> disintegrate_player(
    const GameModel& model, const OccupationMeasure& mu,
    const std::vector<std::vector<double>>& fallback) {
  std::vector<std::vector<double>> out(model.state_count());
  for (int x = 0; x < model.state_count(); ++x) {
    const double mass = model.in_delta(x) ? 0.0 : mu.state_mass(x);
    if (mass <= kNullOccupancy) {
      out[x] = fallback[x];
      continue;
    }
    out[x].resize(mu.weights[x].size());
    for (std::size_t p = 0; p < mu.weights[x].size(); ++p) {
      out[x][p] = std::max(0.0, mu.weights[x][p]) / mass;
    }
  }
  return out;
}

StationaryProfile disintegrate(const GameModel& model,
                               const OccupationMeasure& mu,
                               const StationaryProfile& fallback) {
  validate_profile(model, fallback);
  StationaryProfile out;
  out.pi.resize(model.player_count());
  for (int i = 0; i < model.player_count(); ++i) {
    const auto marginal =
        mu.kind == MeasureKind::joint ? player_marginal(model, mu, i) : mu;
    out.pi[i] = disintegrate_player(model, marginal, fallback.pi[i]);
  }
  return out;
}

OccupationMeasure player_marginal(const GameModel& model,
                                  const OccupationMeasure& mu, int player) {
  if (mu.kind != MeasureKind::joint) {
    throw Error(ErrorCode::InvalidArgument, "player_marginal expects a joint measure");
  }
  OccupationMeasure out;
  out.kind = MeasureKind::player_marginal;
  out.player = player;
  out.eta_ref = mu.eta_ref;
  out.weights.resize(model.state_count());
  for (int x = 0; x < model.state_count(); ++x) {
    out.weights[x].assign(model.admissible(player, x).size(), 0.0);
    for (int k = 0; k < model.joint_count(x); ++k) {
      const int a = model.joint_action(x, k)[player];
      out.weights[x][model.admissible_position(player, x, a)] += mu.weights[x][k];
    }
  }
  return out;
}

PayoffVector payoffs(const GameModel& model, const OccupationMeasure& mu) {
  if (mu.kind != MeasureKind::joint) {
    throw Error(ErrorCode::InvalidArgument, "payoffs expects a joint measure");
  }
  const int N = model.player_count();
  const int p = model.constraint_count();
  PayoffVector out;
  out.R.assign(N, 0.0);
  out.C.assign(N, std::vector<double>(p, 0.0));
  for (int x = 0; x < model.state_count(); ++x) {
    for (int k = 0; k < model.joint_count(x); ++k) {
      const double w = mu.weights[x][k];
      if (w == 0.0) continue;
      for (int i = 0; i < N; ++i) {
        out.R[i] += w * model.reward(i, x, k);
        for (int j = 0; j < p; ++j) out.C[i][j] += w * model.cost(i, j, x, k);
      }
    }
  }
  return out;
}

LinearProgram characteristic_lp(const GameModel& model, const Distribution& eta) {
  validate_distribution(model, eta);
  const int S = model.state_count();
  const auto reach = detail::reachable_transient(model, eta, nullptr);
  LinearProgram lp;
  std::vector<int> row_of(S, -1);
  for (int y = 0; y < S; ++y) {
    if (!reach[y]) continue;
    row_of[y] = static_cast<int>(lp.eq_rows.size());
    lp.eq_rows.push_back({{}, eta[y]});
  }
  for (int x = 0; x < S; ++x) {
    if (!reach[x]) continue;
    for (int k = 0; k < model.joint_count(x); ++k) {
      const int v = lp.add_variable({x, k});
      // sum_a mu(y, a) - sum_{x,a} mu(x, a) Q(y|x,a) = eta(y)
      lp.eq_rows[row_of[x]].coefficients[v] += 1.0;
      const auto row = model.transition_row(x, k);
      for (int y = 0; y < S; ++y) {
        if (row_of[y] >= 0 && row[y] != 0.0) {
          lp.eq_rows[row_of[y]].coefficients[v] -= row[y];
        }
      }
    }
  }
  return lp;
}

OccupationMeasure measure_from_lp(const GameModel& model, const LinearProgram& lp,
                                  const std::vector<double>& primal,
                                  const Distribution& eta) {
  OccupationMeasure mu;
  mu.eta_ref = eta;
  mu.weights.resize(model.state_count());
  for (int x = 0; x < model.state_count(); ++x) {
    mu.weights[x].assign(model.joint_count(x), 0.0);
  }
  for (int v = 0; v < lp.variable_count(); ++v) {
    const auto key = lp.variable_index[v];
    if (key.state < 0) continue;
    mu.weights[key.state][key.action] = primal[v];
  }
  return mu;
}

}  // namespace cmg
