#include "cmg/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace cmg {

namespace {

int sample_index(const std::vector<double>& weights, Xoshiro256& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  int last = -1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cumulative += weights[i];
    last = static_cast<int>(i);
    if (u < cumulative) return last;
  }
  return last;  // rounding: u landed above the final partial sum
}

int sample_next(std::span<const double> row, Xoshiro256& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  int last = -1;
  for (std::size_t y = 0; y < row.size(); ++y) {
    if (row[y] <= 0.0) continue;
    cumulative += row[y];
    last = static_cast<int>(y);
    if (u < cumulative) return last;
  }
  return last;
}

/// Players draw independently given the state; the joint position follows
/// from the lexicographic enumeration over admissible positions.
struct IndependentSampler {
  const GameModel& model;
  const StationaryProfile& profile;
  int operator()(int x, Xoshiro256& rng) const {
    int index = 0;
    for (int i = 0; i < model.player_count(); ++i) {
      const int p = sample_index(profile.pi[i][x], rng);
      index = index * static_cast<int>(model.admissible(i, x).size()) + p;
    }
    return index;
  }
};

struct JointSampler {
  const CorrelatedStrategy& strategy;
  int operator()(int x, Xoshiro256& rng) const {
    return sample_index(strategy.pi[x], rng);
  }
};

/// Runs one trajectory, calling visit(state, joint) at each step.
template <typename Sampler, typename Visit>
std::pair<int, bool> run(const GameModel& model, const Sampler& sampler,
                         const Distribution& eta, Xoshiro256& rng, long cap,
                         Visit&& visit) {
  int x = sample_index(eta, rng);
  long steps = 0;
  while (!model.in_delta(x)) {
    if (steps >= cap) return {x, true};
    const int k = sampler(x, rng);
    visit(x, k);
    ++steps;
    x = sample_next(model.transition_row(x, k), rng);
  }
  return {x, false};
}

template <typename Sampler>
Trajectory sample_with(const GameModel& model, const Sampler& sampler,
                       const Distribution& eta, Xoshiro256& rng, long cap) {
  Trajectory t;
  auto [last, truncated] = run(model, sampler, eta, rng, cap, [&](int x, int k) {
    t.steps.push_back({x, k});
  });
  t.final_state = last;
  t.truncated = truncated;
  return t;
}

Estimate summarize(const std::vector<double>& values) {
  const std::size_t n = values.size();
  Estimate e;
  e.mean = pairwise_sum(values.data(), n) / static_cast<double>(n);
  if (n > 1) {
    std::vector<double> squares(n);
    for (std::size_t t = 0; t < n; ++t) {
      const double d = values[t] - e.mean;
      squares[t] = d * d;
    }
    const double variance =
        pairwise_sum(squares.data(), n) / static_cast<double>(n - 1);
    e.standard_error = std::sqrt(variance / static_cast<double>(n));
  }
  return e;
}

template <typename Sampler>
EstimateReport estimate_with(const GameModel& model, const Sampler& sampler,
                             const Distribution& eta, long n, std::uint64_t seed,
                             const SimulateOptions& options) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
  validate_distribution(model, eta);
  const int N = model.player_count();
  const int p = model.constraint_count();
  const auto count = static_cast<std::size_t>(n);

  std::vector<double> hitting(count);
  std::vector<std::vector<double>> reward(N, std::vector<double>(count));
  std::vector<std::vector<std::vector<double>>> cost(
      N, std::vector<std::vector<double>>(p, std::vector<double>(count)));
  std::vector<char> truncated(count, 0);

  int workers = options.threads > 0
                    ? options.threads
                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(std::min<long>(workers, n));
  std::vector<std::vector<long>> visits(workers,
                                        std::vector<long>(model.pair_count(), 0));

  auto work = [&](int w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    auto& local = visits[w];
    std::vector<double> r(N), c(static_cast<std::size_t>(N) * p);
    for (std::size_t t = begin; t < end; ++t) {
      Xoshiro256 rng(stream_seed(seed, t));
      std::fill(r.begin(), r.end(), 0.0);
      std::fill(c.begin(), c.end(), 0.0);
      long steps = 0;
      auto [last, cut] = run(model, sampler, eta, rng, options.cap, [&](int x, int k) {
        ++steps;
        ++local[model.pair_offset(x, k)];
        for (int i = 0; i < N; ++i) {
          r[i] += model.reward(i, x, k);
          for (int j = 0; j < p; ++j) c[i * p + j] += model.cost(i, j, x, k);
        }
      });
      (void)last;
      hitting[t] = static_cast<double>(steps);
      truncated[t] = cut ? 1 : 0;
      for (int i = 0; i < N; ++i) {
        reward[i][t] = r[i];
        for (int j = 0; j < p; ++j) cost[i][j][t] = c[i * p + j];
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  EstimateReport report;
  report.samples = n;
  report.seed = seed;
  report.hitting_time = summarize(hitting);
  for (int i = 0; i < N; ++i) {
    report.reward.push_back(summarize(reward[i]));
    report.cost.emplace_back();
    for (int j = 0; j < p; ++j) report.cost[i].push_back(summarize(cost[i][j]));
  }
  report.truncated = std::count(truncated.begin(), truncated.end(), 1);
  report.occupation.resize(model.state_count());
  for (int x = 0; x < model.state_count(); ++x) {
    for (int k = 0; k < model.joint_count(x); ++k) {
      long total = 0;
      for (const auto& local : visits) total += local[model.pair_offset(x, k)];
      report.occupation[x].push_back(static_cast<double>(total) /
                                     static_cast<double>(n));
    }
  }
  return report;
}

}  // namespace

double pairwise_sum(const double* values, std::size_t count) {
  if (count <= 8) {
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) total += values[i];
    return total;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, count - half);
}

Trajectory sample_trajectory(const GameModel& model, const StationaryProfile& profile,
                             const Distribution& eta, Xoshiro256& rng, long cap) {
  validate_profile(model, profile);
  validate_distribution(model, eta);
  return sample_with(model, IndependentSampler{model, profile}, eta, rng, cap);
}

Trajectory sample_trajectory(const GameModel& model,
                             const CorrelatedStrategy& strategy,
                             const Distribution& eta, Xoshiro256& rng, long cap) {
  validate_strategy(model, strategy);
  validate_distribution(model, eta);
  return sample_with(model, JointSampler{strategy}, eta, rng, cap);
}

EstimateReport estimate(const GameModel& model, const StationaryProfile& profile,
                        const Distribution& eta, long n, std::uint64_t seed,
                        const SimulateOptions& options) {
  validate_profile(model, profile);
  return estimate_with(model, IndependentSampler{model, profile}, eta, n, seed,
                       options);
}

EstimateReport estimate(const GameModel& model, const CorrelatedStrategy& strategy,
                        const Distribution& eta, long n, std::uint64_t seed,
                        const SimulateOptions& options) {
  validate_strategy(model, strategy);
  return estimate_with(model, JointSampler{strategy}, eta, n, seed, options);
}

}  // namespace cmg
