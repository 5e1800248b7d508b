#include "chain.hpp"

#include <cmath>
#include <deque>

namespace cmg::detail {

std::vector<bool> reachable_transient(const GameModel& model,
                                      const Distribution& eta,
                                      const CorrelatedStrategy* strategy) {
  const int S = model.state_count();
  std::vector<bool> seen(S, false);
  std::deque<int> queue;
  for (int x = 0; x < S; ++x) {
    if (eta[x] > 0.0 && !model.in_delta(x)) {
      seen[x] = true;
      queue.push_back(x);
    }
  }
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop_front();
    for (int k = 0; k < model.joint_count(x); ++k) {
      if (strategy != nullptr && strategy->pi[x][k] <= 0.0) continue;
      const auto row = model.transition_row(x, k);
      for (int y = 0; y < S; ++y) {
        if (row[y] > 0.0 && !seen[y] && !model.in_delta(y)) {
          seen[y] = true;
          queue.push_back(y);
        }
      }
    }
  }
  return seen;
}

TransientBlock transient_block(const GameModel& model,
                               const CorrelatedStrategy& strategy,
                               const Distribution& eta) {
  const int S = model.state_count();
  const auto reach = reachable_transient(model, eta, &strategy);
  TransientBlock block;
  std::vector<int> local(S, -1);
  for (int x = 0; x < S; ++x) {
    if (reach[x]) {
      local[x] = static_cast<int>(block.states.size());
      block.states.push_back(x);
    }
  }
  const int n = static_cast<int>(block.states.size());
  block.P = Eigen::MatrixXd::Zero(n, n);
  std::vector<bool> exits(n, false);
  for (int r = 0; r < n; ++r) {
    const int x = block.states[r];
    for (int k = 0; k < model.joint_count(x); ++k) {
      const double w = strategy.pi[x][k];
      if (w <= 0.0) continue;
      const auto row = model.transition_row(x, k);
      for (int y = 0; y < S; ++y) {
        if (row[y] <= 0.0) continue;
        if (model.in_delta(y)) {
          exits[r] = true;
        } else {
          block.P(r, local[y]) += w * row[y];
        }
      }
    }
  }

  // Every reachable state must be able to reach delta: propagate "exits"
  // backwards along positive-probability edges.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int r = 0; r < n; ++r) {
      if (exits[r]) continue;
      for (int c = 0; c < n; ++c) {
        if (block.P(r, c) > 0.0 && exits[c]) {
          exits[r] = true;
          changed = true;
          break;
        }
      }
    }
  }
  for (int r = 0; r < n; ++r) {
    if (!exits[r]) {
      throw Error(ErrorCode::NotAbsorbingUnderStrategy,
                  "state " + model.states()[block.states[r]] +
                      " never reaches the absorbing set under this strategy");
    }
  }
  return block;
}

Eigen::VectorXd solve_fundamental(const Eigen::MatrixXd& P,
                                  const Eigen::VectorXd& rhs, bool transpose) {
  const auto n = P.rows();
  if (n == 0) return Eigen::VectorXd(0);
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - P;
  if (transpose) M.transposeInPlace();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() < 1e-10) {
    throw Error(ErrorCode::NotAbsorbingUnderStrategy,
                "transient block is numerically singular");
  }
  return lu.solve(rhs);
}

}  // namespace cmg::detail
