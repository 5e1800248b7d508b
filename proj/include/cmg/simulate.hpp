#pragma once

#include <cstdint>
#include <vector>

#include "cmg/game_model.hpp"
#include "cmg/rng.hpp"

namespace cmg {

inline constexpr long kDefaultStepCap = 1'000'000;

struct Step {
  int state = 0;
  int joint = 0;  // position in joint_action(state, .)
};

/// Visited (state, joint action) pairs up to the first entry into delta. The
/// entry state itself is recorded in final_state.
struct Trajectory {
  std::vector<Step> steps;
  int final_state = -1;
  bool truncated = false;
};

Trajectory sample_trajectory(const GameModel& model, const StationaryProfile& profile,
                             const Distribution& eta, Xoshiro256& rng,
                             long cap = kDefaultStepCap);
Trajectory sample_trajectory(const GameModel& model,
                             const CorrelatedStrategy& strategy,
                             const Distribution& eta, Xoshiro256& rng,
                             long cap = kDefaultStepCap);

struct Estimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

struct EstimateReport {
  Estimate hitting_time;
  std::vector<Estimate> reward;               // [player]
  std::vector<std::vector<Estimate>> cost;    // [player][row]
  std::vector<std::vector<double>> occupation;  // [state][joint] visits / n
  long samples = 0;
  long truncated = 0;
  std::uint64_t seed = 0;
};

struct SimulateOptions {
  long cap = kDefaultStepCap;
  /// 0 picks hardware concurrency. Results do not depend on this value.
  int threads = 0;
};

/// Monte Carlo estimates over n trajectories. Trajectory t draws from its own
/// stream stream_seed(seed, t), and per-trajectory totals are reduced by
/// pairwise summation in index order, so the report is bit-identical for a
/// given seed regardless of thread count. Truncated trajectories contribute
/// their partial totals and are counted in `truncated`.
EstimateReport estimate(const GameModel& model, const StationaryProfile& profile,
                        const Distribution& eta, long n, std::uint64_t seed,
                        const SimulateOptions& options = {});
EstimateReport estimate(const GameModel& model, const CorrelatedStrategy& strategy,
                        const Distribution& eta, long n, std::uint64_t seed,
                        const SimulateOptions& options = {});

/// Pairwise (cascade) summation.
double pairwise_sum(const double* values, std::size_t count);

}  // namespace cmg
