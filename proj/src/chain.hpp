#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cmg/game_model.hpp"

namespace cmg::detail {

/// States reachable from supp(eta) without passing through delta. Edges use
/// every admissible joint action when `strategy` is null, otherwise only
/// those with positive weight. Delta states are never marked.
std::vector<bool> reachable_transient(const GameModel& model,
                                      const Distribution& eta,
                                      const CorrelatedStrategy* strategy);

/// Sub-stochastic block of Q_pi on the transient states reachable under a
/// strategy, in increasing state order.
struct TransientBlock {
  std::vector<int> states;
  Eigen::MatrixXd P;
};

/// Throws NotAbsorbingUnderStrategy when some reachable state cannot reach
/// delta under the strategy.
TransientBlock transient_block(const GameModel& model,
                               const CorrelatedStrategy& strategy,
                               const Distribution& eta);

/// LU solve of (I - P) z = rhs (or its transpose) with partial pivoting;
/// throws NotAbsorbingUnderStrategy when a pivot falls below 1e-10.
Eigen::VectorXd solve_fundamental(const Eigen::MatrixXd& P,
                                  const Eigen::VectorXd& rhs, bool transpose);

}  // namespace cmg::detail
