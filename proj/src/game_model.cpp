#include "cmg/game_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

namespace cmg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonStochasticRow: return "NonStochasticRow";
    case ErrorCode::AbsorbingViolation: return "AbsorbingViolation";
    case ErrorCode::EmptyActionSet: return "EmptyActionSet";
    case ErrorCode::BadDistribution: return "BadDistribution";
    case ErrorCode::ProfileModelMismatch: return "ProfileModelMismatch";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotAbsorbingUnderStrategy: return "NotAbsorbingUnderStrategy";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::InfeasibleLP: return "InfeasibleLP";
    case ErrorCode::ConstraintInfeasible: return "ConstraintInfeasible";
    case ErrorCode::SlaterFailure: return "SlaterFailure";
    case ErrorCode::Schema: return "Schema";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

std::string describe_pair(const ModelDescription& d, int state,
                          const JointAction& action) {
  std::ostringstream out;
  out << "(" << d.states[state] << ", (";
  for (std::size_t i = 0; i < action.size(); ++i) {
    if (i) out << ",";
    out << d.actions[i][action[i]];
  }
  out << "))";
  return out.str();
}

bool matches(const JointAction& pattern, const JointAction& joint) {
  for (std::size_t i = 0; i < joint.size(); ++i) {
    if (pattern[i] != kAnyAction && pattern[i] != joint[i]) return false;
  }
  return true;
}

void check_pattern(const ModelDescription& d,
                   const std::vector<std::vector<std::vector<int>>>& admissible,
                   int state, const JointAction& pattern, const char* what) {
  const int players = static_cast<int>(d.actions.size());
  if (state < 0 || state >= static_cast<int>(d.states.size())) {
    fail(ErrorCode::InvalidModel, std::string(what) + ": state out of range");
  }
  if (static_cast<int>(pattern.size()) != players) {
    fail(ErrorCode::InvalidModel,
         std::string(what) + ": joint action has wrong arity at state " +
             d.states[state]);
  }
  for (int i = 0; i < players; ++i) {
    if (pattern[i] == kAnyAction) continue;
    const auto& adm = admissible[i][state];
    if (!std::binary_search(adm.begin(), adm.end(), pattern[i])) {
      fail(ErrorCode::InvalidModel,
           std::string(what) + ": action of player " + std::to_string(i) +
               " is not admissible at state " + d.states[state]);
    }
  }
}

}  // namespace

GameModel build_model(const ModelDescription& d) {
  GameModel m;
  const int S = static_cast<int>(d.states.size());
  const int N = static_cast<int>(d.actions.size());
  if (S < 1) fail(ErrorCode::InvalidModel, "model has no states");
  if (N < 1) fail(ErrorCode::InvalidModel, "model has no players");
  {
    std::set<std::string> seen(d.states.begin(), d.states.end());
    if (static_cast<int>(seen.size()) != S) {
      fail(ErrorCode::InvalidModel, "duplicate state identifier");
    }
  }
  for (int i = 0; i < N; ++i) {
    std::set<std::string> seen(d.actions[i].begin(), d.actions[i].end());
    if (seen.size() != d.actions[i].size()) {
      fail(ErrorCode::InvalidModel,
           "duplicate action identifier for player " + std::to_string(i));
    }
  }
  m.states_ = d.states;
  m.actions_ = d.actions;

  // Admissible sets.
  m.admissible_.assign(N, std::vector<std::vector<int>>(S));
  for (int i = 0; i < N; ++i) {
    const int A = static_cast<int>(d.actions[i].size());
    const bool given = i < static_cast<int>(d.admissible.size()) &&
                       !d.admissible[i].empty();
    if (given && static_cast<int>(d.admissible[i].size()) != S) {
      fail(ErrorCode::InvalidModel, "admissible sets of player " +
                                        std::to_string(i) +
                                        " do not cover every state");
    }
    for (int x = 0; x < S; ++x) {
      std::vector<int> set;
      if (given) {
        set = d.admissible[i][x];
      } else {
        for (int a = 0; a < A; ++a) set.push_back(a);
      }
      std::sort(set.begin(), set.end());
      set.erase(std::unique(set.begin(), set.end()), set.end());
      if (set.empty()) {
        fail(ErrorCode::EmptyActionSet, "player " + std::to_string(i) +
                                            " has no admissible action at " +
                                            d.states[x]);
      }
      if (set.front() < 0 || set.back() >= A) {
        fail(ErrorCode::InvalidModel, "admissible action index out of range");
      }
      m.admissible_[i][x] = std::move(set);
    }
  }

  // Joint actions, lexicographic with player 0 most significant.
  m.joints_.assign(S, {});
  m.pair_offsets_.assign(S + 1, 0);
  for (int x = 0; x < S; ++x) {
    std::vector<std::size_t> pos(N, 0);
    while (true) {
      JointAction a(N);
      for (int i = 0; i < N; ++i) a[i] = m.admissible_[i][x][pos[i]];
      m.joints_[x].push_back(std::move(a));
      int i = N - 1;
      while (i >= 0 && ++pos[i] == m.admissible_[i][x].size()) {
        pos[i] = 0;
        --i;
      }
      if (i < 0) break;
    }
    m.pair_offsets_[x + 1] = m.pair_offsets_[x] + m.joints_[x].size();
  }
  const std::size_t pairs = m.pair_offsets_.back();

  // Absorbing set.
  m.in_delta_.assign(S, false);
  for (int x : d.delta) {
    if (x < 0 || x >= S) fail(ErrorCode::InvalidModel, "delta state out of range");
    if (m.in_delta_[x]) fail(ErrorCode::InvalidModel, "duplicate delta state");
    m.in_delta_[x] = true;
  }

  // Initial distribution.
  if (static_cast<int>(d.eta.size()) != S) {
    fail(ErrorCode::BadDistribution, "eta must have one entry per state");
  }
  double eta_sum = 0.0;
  for (double v : d.eta) {
    if (!(v >= 0.0) || v > 1.0 + kInputTolerance) {
      fail(ErrorCode::BadDistribution, "eta entries must lie in [0,1]");
    }
    eta_sum += v;
  }
  if (std::abs(eta_sum - 1.0) > kInputTolerance) {
    fail(ErrorCode::BadDistribution, "eta does not sum to 1");
  }
  m.eta_ = d.eta;

  // Constraints.
  if (d.constraint_count < 0) fail(ErrorCode::InvalidModel, "negative constraint count");
  m.constraint_count_ = d.constraint_count;
  if (d.rho.empty() && d.constraint_count == 0) {
    m.rho_.assign(N, {});
  } else {
    if (static_cast<int>(d.rho.size()) != N) {
      fail(ErrorCode::InvalidModel, "rho must have one row per player");
    }
    for (const auto& row : d.rho) {
      if (static_cast<int>(row.size()) != d.constraint_count) {
        fail(ErrorCode::InvalidModel,
             "every player needs exactly one rho entry per constraint row");
      }
    }
    m.rho_ = d.rho;
  }

  // Kernel.
  m.kernel_.assign(pairs * S, 0.0);
  std::set<std::tuple<int, int, int>> seen_kernel;
  for (const auto& e : d.kernel) {
    check_pattern(d, m.admissible_, e.state, e.action, "kernel entry");
    if (e.next < 0 || e.next >= S) {
      fail(ErrorCode::InvalidModel, "kernel entry: next state out of range");
    }
    if (!(e.probability >= 0.0) || e.probability > 1.0 + kInputTolerance) {
      fail(ErrorCode::InvalidModel, "kernel entry: probability outside [0,1] at state " +
                                        d.states[e.state]);
    }
    for (int k = 0; k < m.joint_count(e.state); ++k) {
      if (!matches(e.action, m.joints_[e.state][k])) continue;
      if (!seen_kernel.emplace(e.state, k, e.next).second) {
        fail(ErrorCode::InvalidModel,
             "duplicate kernel entry for " +
                 describe_pair(d, e.state, m.joints_[e.state][k]) + " -> " +
                 d.states[e.next]);
      }
      m.kernel_[m.pair_offset(e.state, k) * S + e.next] = e.probability;
    }
  }

  // Rewards and costs.
  m.reward_.assign(N, std::vector<double>(pairs, 0.0));
  std::set<std::tuple<int, int, int>> seen_reward;
  for (const auto& e : d.rewards) {
    if (e.player < 0 || e.player >= N) {
      fail(ErrorCode::InvalidModel, "reward entry: player out of range");
    }
    check_pattern(d, m.admissible_, e.state, e.action, "reward entry");
    for (int k = 0; k < m.joint_count(e.state); ++k) {
      if (!matches(e.action, m.joints_[e.state][k])) continue;
      if (!seen_reward.emplace(e.player, e.state, k).second) {
        fail(ErrorCode::InvalidModel,
             "duplicate reward entry for player " + std::to_string(e.player) +
                 " at " + describe_pair(d, e.state, m.joints_[e.state][k]));
      }
      m.reward_[e.player][m.pair_offset(e.state, k)] = e.value;
    }
  }
  m.cost_.assign(N, std::vector<std::vector<double>>(
                        d.constraint_count, std::vector<double>(pairs, 0.0)));
  std::set<std::tuple<int, int, int, int>> seen_cost;
  for (const auto& e : d.costs) {
    if (e.player < 0 || e.player >= N) {
      fail(ErrorCode::InvalidModel, "cost entry: player out of range");
    }
    if (e.row < 0 || e.row >= d.constraint_count) {
      fail(ErrorCode::InvalidModel, "cost entry: constraint row out of range");
    }
    check_pattern(d, m.admissible_, e.state, e.action, "cost entry");
    for (int k = 0; k < m.joint_count(e.state); ++k) {
      if (!matches(e.action, m.joints_[e.state][k])) continue;
      if (!seen_cost.emplace(e.player, e.row, e.state, k).second) {
        fail(ErrorCode::InvalidModel,
             "duplicate cost entry for player " + std::to_string(e.player) +
                 " at " + describe_pair(d, e.state, m.joints_[e.state][k]));
      }
      m.cost_[e.player][e.row][m.pair_offset(e.state, k)] = e.value;
    }
  }

  // Row checks.
  for (int x = 0; x < S; ++x) {
    for (int k = 0; k < m.joint_count(x); ++k) {
      const auto row = m.transition_row(x, k);
      double total = 0.0;
      double into_delta = 0.0;
      for (int y = 0; y < S; ++y) {
        total += row[y];
        if (m.in_delta_[y]) into_delta += row[y];
      }
      if (std::abs(total - 1.0) > kInputTolerance) {
        fail(ErrorCode::NonStochasticRow,
             "transition row " + describe_pair(d, x, m.joints_[x][k]) +
                 " sums to " + std::to_string(total));
      }
      if (!m.in_delta_[x]) continue;
      if (std::abs(into_delta - 1.0) > kInputTolerance) {
        fail(ErrorCode::AbsorbingViolation,
             "absorbing state row " + describe_pair(d, x, m.joints_[x][k]) +
                 " leaks out of delta");
      }
      for (int i = 0; i < N; ++i) {
        bool nonzero = m.reward(i, x, k) != 0.0;
        for (int j = 0; j < d.constraint_count; ++j) {
          nonzero = nonzero || m.cost(i, j, x, k) != 0.0;
        }
        if (nonzero) {
          fail(ErrorCode::AbsorbingViolation,
               "nonzero reward or cost on absorbing pair " +
                   describe_pair(d, x, m.joints_[x][k]));
        }
      }
    }
  }

  double bound = 0.0;
  for (int i = 0; i < N; ++i) {
    for (double v : m.reward_[i]) bound = std::max(bound, std::abs(v));
    for (const auto& row : m.cost_[i]) {
      for (double v : row) bound = std::max(bound, std::abs(v));
    }
  }
  m.reward_bound_ = bound;
  return m;
}

int GameModel::joint_index(int state, const JointAction& action) const {
  const auto& js = joints_[state];
  auto it = std::lower_bound(js.begin(), js.end(), action);
  if (it == js.end() || *it != action) return -1;
  return static_cast<int>(it - js.begin());
}

int GameModel::admissible_position(int player, int state, int action) const {
  const auto& adm = admissible_[player][state];
  auto it = std::lower_bound(adm.begin(), adm.end(), action);
  if (it == adm.end() || *it != action) return -1;
  return static_cast<int>(it - adm.begin());
}

std::vector<int> GameModel::delta() const {
  std::vector<int> out;
  for (int x = 0; x < state_count(); ++x) {
    if (in_delta_[x]) out.push_back(x);
  }
  return out;
}

int GameModel::state_index(const std::string& name) const {
  auto it = std::find(states_.begin(), states_.end(), name);
  return it == states_.end() ? -1 : static_cast<int>(it - states_.begin());
}

ModelDescription GameModel::describe() const {
  ModelDescription d;
  d.states = states_;
  d.actions = actions_;
  d.admissible = admissible_;
  d.delta = delta();
  d.eta = eta_;
  d.constraint_count = constraint_count_;
  d.rho = rho_;
  const int S = state_count();
  for (int x = 0; x < S; ++x) {
    for (int k = 0; k < joint_count(x); ++k) {
      const auto row = transition_row(x, k);
      for (int y = 0; y < S; ++y) {
        if (row[y] != 0.0) d.kernel.push_back({x, joints_[x][k], y, row[y]});
      }
      for (int i = 0; i < player_count(); ++i) {
        if (reward(i, x, k) != 0.0) {
          d.rewards.push_back({i, x, joints_[x][k], reward(i, x, k)});
        }
        for (int j = 0; j < constraint_count_; ++j) {
          if (cost(i, j, x, k) != 0.0) {
            d.costs.push_back({i, j, x, joints_[x][k], cost(i, j, x, k)});
          }
        }
      }
    }
  }
  return d;
}

namespace {

void check_probability_vector(const std::vector<double>& v, std::size_t size,
                              ErrorCode code, const std::string& where) {
  if (v.size() != size) fail(code, where + ": wrong number of entries");
  double total = 0.0;
  for (double p : v) {
    if (!(p >= 0.0)) fail(code, where + ": negative or NaN probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kInputTolerance) {
    fail(code, where + ": probabilities sum to " + std::to_string(total));
  }
}

}  // namespace

void validate_profile(const GameModel& model, const StationaryProfile& profile) {
  const int N = model.player_count();
  const int S = model.state_count();
  if (static_cast<int>(profile.pi.size()) != N) {
    fail(ErrorCode::ProfileModelMismatch, "profile has wrong number of players");
  }
  for (int i = 0; i < N; ++i) {
    if (static_cast<int>(profile.pi[i].size()) != S) {
      fail(ErrorCode::ProfileModelMismatch,
           "profile of player " + std::to_string(i) + " has wrong number of states");
    }
    for (int x = 0; x < S; ++x) {
      check_probability_vector(profile.pi[i][x], model.admissible(i, x).size(),
                               ErrorCode::ProfileModelMismatch,
                               "player " + std::to_string(i) + " at state " +
                                   model.states()[x]);
    }
  }
}

void validate_strategy(const GameModel& model, const CorrelatedStrategy& strategy) {
  const int S = model.state_count();
  if (static_cast<int>(strategy.pi.size()) != S) {
    fail(ErrorCode::ProfileModelMismatch, "strategy has wrong number of states");
  }
  for (int x = 0; x < S; ++x) {
    check_probability_vector(strategy.pi[x], model.joint_count(x),
                             ErrorCode::ProfileModelMismatch,
                             "joint strategy at state " + model.states()[x]);
  }
}

void validate_distribution(const GameModel& model, const Distribution& eta) {
  check_probability_vector(eta, model.state_count(), ErrorCode::BadDistribution,
                           "initial distribution");
}

StationaryProfile uniform_profile(const GameModel& model) {
  StationaryProfile p;
  p.pi.resize(model.player_count());
  for (int i = 0; i < model.player_count(); ++i) {
    for (int x = 0; x < model.state_count(); ++x) {
      const auto n = model.admissible(i, x).size();
      p.pi[i].emplace_back(n, 1.0 / static_cast<double>(n));
    }
  }
  return p;
}

CorrelatedStrategy uniform_strategy(const GameModel& model) {
  CorrelatedStrategy s;
  for (int x = 0; x < model.state_count(); ++x) {
    const int n = model.joint_count(x);
    s.pi.emplace_back(n, 1.0 / n);
  }
  return s;
}

CorrelatedStrategy product_strategy(const GameModel& model,
                                    const StationaryProfile& profile) {
  validate_profile(model, profile);
  CorrelatedStrategy s;
  s.pi.resize(model.state_count());
  for (int x = 0; x < model.state_count(); ++x) {
    auto& row = s.pi[x];
    row.resize(model.joint_count(x));
    for (int k = 0; k < model.joint_count(x); ++k) {
      const auto& a = model.joint_action(x, k);
      double w = 1.0;
      for (int i = 0; i < model.player_count(); ++i) {
        w *= profile.pi[i][x][model.admissible_position(i, x, a[i])];
      }
      row[k] = w;
    }
  }
  return s;
}

Eigen::MatrixXd induced_chain(const GameModel& model,
                              const CorrelatedStrategy& strategy) {
  validate_strategy(model, strategy);
  const int S = model.state_count();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(S, S);
  for (int x = 0; x < S; ++x) {
    for (int k = 0; k < model.joint_count(x); ++k) {
      const double w = strategy.pi[x][k];
      if (w == 0.0) continue;
      const auto row = model.transition_row(x, k);
      for (int y = 0; y < S; ++y) P(x, y) += w * row[y];
    }
  }
  return P;
}

double profile_distance(const StationaryProfile& a, const StationaryProfile& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.pi.size(); ++i) {
    for (std::size_t x = 0; x < a.pi[i].size(); ++x) {
      double tv = 0.0;
      for (std::size_t p = 0; p < a.pi[i][x].size(); ++p) {
        tv += std::abs(a.pi[i][x][p] - b.pi[i][x][p]);
      }
      worst = std::max(worst, 0.5 * tv);
    }
  }
  return worst;
}

}  // namespace cmg
