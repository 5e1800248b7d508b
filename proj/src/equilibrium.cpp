#include "cmg/equilibrium.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include "cmg/absorption.hpp"
#include "cmg/rng.hpp"

namespace cmg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_rho_shape(const GameModel& model, const Rho& rho) {
  if (static_cast<int>(rho.size()) != model.player_count()) {
    throw Error(ErrorCode::InvalidArgument, "rho must have one row per player");
  }
  for (const auto& row : rho) {
    if (static_cast<int>(row.size()) != model.constraint_count()) {
      throw Error(ErrorCode::InvalidArgument,
                  "rho rows must have one entry per constraint row");
    }
  }
}

/// Certificate plus the per-player objects the search needs to take a step.
struct Evaluation {
  EquilibriumCertificate certificate;
  std::vector<GameModel> views;
  std::vector<OccupationMeasure> current;  // own measure in each view
  std::vector<std::optional<BestResponse>> responses;
};

void finish(EquilibriumCertificate& c, double tolerance) {
  c.epsilon = 0.0;
  bool ok = true;
  for (std::size_t i = 0; i < c.gap.size(); ++i) {
    ok = ok && c.feasible[i] && c.response_feasible[i];
    if (!c.response_feasible[i]) {
      c.epsilon = kInf;
    } else {
      c.epsilon = std::max(c.epsilon, std::max(c.gap[i], 0.0));
    }
  }
  c.tolerance = tolerance;
  c.equilibrium = ok && c.epsilon <= tolerance;
}

void fill_feasibility(const GameModel& model, const Rho& rho,
                      EquilibriumCertificate& c) {
  const int N = model.player_count();
  c.feasible.assign(N, true);
  c.slack.assign(N, kInf);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < model.constraint_count(); ++j) {
      if (!std::isfinite(rho[i][j])) continue;
      const double s = c.payoffs.C[i][j] - rho[i][j];
      c.slack[i] = std::min(c.slack[i], s);
      if (s < -kFeasibilityTolerance) c.feasible[i] = false;
    }
  }
}

Evaluation evaluate(const GameModel& model, const StationaryProfile& profile,
                    const Distribution& eta, const Rho& rho, double tolerance) {
  const int N = model.player_count();
  Evaluation ev;
  auto& c = ev.certificate;
  c.payoffs = payoffs(model, occupation_measure(model, profile, eta));
  fill_feasibility(model, rho, c);
  c.response_feasible.assign(N, true);
  c.gap.assign(N, std::numeric_limits<double>::quiet_NaN());
  c.best_response_value.assign(N, std::numeric_limits<double>::quiet_NaN());
  ev.responses.resize(N);
  for (int i = 0; i < N; ++i) {
    ev.views.push_back(freeze_opponents(model, i, profile));
    ev.current.push_back(
        occupation_measure(ev.views[i], CorrelatedStrategy{profile.pi[i]}, eta));
    try {
      ev.responses[i] = best_response(ev.views[i], eta, rho[i], profile.pi[i]);
      c.best_response_value[i] = ev.responses[i]->value;
      c.gap[i] = ev.responses[i]->value - c.payoffs.R[i];
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ConstraintInfeasible) throw;
      c.response_feasible[i] = false;
    }
  }
  finish(c, tolerance);
  return ev;
}

/// Strict-weak "better certificate" order: fully feasible first, then lower
/// epsilon.
bool better(const EquilibriumCertificate& a, const EquilibriumCertificate& b) {
  auto feasible = [](const EquilibriumCertificate& c) {
    for (std::size_t i = 0; i < c.feasible.size(); ++i) {
      if (!c.feasible[i] || !c.response_feasible[i]) return false;
    }
    return true;
  };
  const bool fa = feasible(a);
  const bool fb = feasible(b);
  if (fa != fb) return fa;
  return a.epsilon < b.epsilon;
}

StationaryProfile dirichlet_profile(const GameModel& model, Xoshiro256& rng) {
  StationaryProfile p;
  p.pi.resize(model.player_count());
  for (int i = 0; i < model.player_count(); ++i) {
    for (int x = 0; x < model.state_count(); ++x) {
      std::vector<double> w(model.admissible(i, x).size());
      double total = 0.0;
      for (auto& v : w) {
        v = -std::log1p(-rng.uniform());  // Exp(1)
        total += v;
      }
      for (auto& v : w) v /= total;
      p.pi[i].push_back(std::move(w));
    }
  }
  return p;
}

struct RestartOutcome {
  StationaryProfile profile;
  EquilibriumCertificate certificate;
  int iteration = 0;
  bool from_average = false;
  int iterations = 0;
  std::vector<TraceRecord> trace;
  bool has_candidate = false;
};

RestartOutcome run_restart(const GameModel& model, const Distribution& eta,
                           const Rho& rho, const SolveConfig& config, int restart) {
  const int N = model.player_count();
  const int S = model.state_count();
  Xoshiro256 rng(stream_seed(config.seed, static_cast<std::uint64_t>(restart)));
  StationaryProfile pi = (restart == 0 && config.uniform_start)
                             ? uniform_profile(model)
                             : dirichlet_profile(model, rng);

  // Fixed fallback on null states, so unreached states settle instead of
  // carrying the random start forever.
  const auto theta = uniform_profile(model);

  RestartOutcome out;
  auto consider = [&](const EquilibriumCertificate& c, const StationaryProfile& p,
                      int k, bool average) {
    if (!out.has_candidate || better(c, out.certificate)) {
      out.has_candidate = true;
      out.certificate = c;
      out.profile = p;
      out.iteration = k;
      out.from_average = average;
    }
  };

  // Running sums of each player's own occupation measure.
  std::vector<std::vector<std::vector<double>>> sums(N);
  for (int i = 0; i < N; ++i) {
    for (int x = 0; x < S; ++x) {
      sums[i].emplace_back(model.admissible(i, x).size(), 0.0);
    }
  }

  const double alpha = config.damping;
  for (int k = 0; k < config.max_iterations; ++k) {
    out.iterations = k + 1;
    auto ev = evaluate(model, pi, eta, rho, config.tolerance);
    consider(ev.certificate, pi, k, false);
    TraceRecord record;
    record.restart = restart;
    record.iteration = k;
    record.gap = ev.certificate.gap;
    record.epsilon = ev.certificate.epsilon;
    record.average_epsilon = kInf;
    if (ev.certificate.equilibrium) {
      if (config.record_trace) out.trace.push_back(std::move(record));
      break;
    }
    bool stuck = false;
    for (int i = 0; i < N; ++i) stuck = stuck || !ev.responses[i].has_value();
    if (stuck) {
      if (config.record_trace) out.trace.push_back(std::move(record));
      break;
    }

    bool average_done = false;
    if (config.certify_average) {
      StationaryProfile average;
      average.pi.resize(N);
      for (int i = 0; i < N; ++i) {
        for (int x = 0; x < S; ++x) {
          for (std::size_t p = 0; p < sums[i][x].size(); ++p) {
            sums[i][x][p] += ev.current[i].weights[x][p];
          }
        }
        OccupationMeasure m;
        m.kind = MeasureKind::player_marginal;
        m.player = i;
        m.weights = sums[i];
        average.pi[i] = disintegrate_player(model, m, theta.pi[i]);
      }
      if (k > 0) {
        const auto c = verify_equilibrium(model, average, eta, rho, config.tolerance);
        record.average_epsilon = c.epsilon;
        consider(c, average, k, true);
        average_done = c.equilibrium;
      }
    }

    StationaryProfile next;
    next.pi.resize(N);
    for (int i = 0; i < N; ++i) {
      OccupationMeasure mixed;
      mixed.kind = MeasureKind::player_marginal;
      mixed.player = i;
      mixed.weights = ev.current[i].weights;
      const auto& target = ev.responses[i]->marginal.weights;
      for (int x = 0; x < S; ++x) {
        for (std::size_t p = 0; p < mixed.weights[x].size(); ++p) {
          mixed.weights[x][p] =
              (1.0 - alpha) * mixed.weights[x][p] + alpha * target[x][p];
        }
      }
      next.pi[i] = disintegrate_player(model, mixed, theta.pi[i]);
    }
    record.distance = profile_distance(next, pi);
    if (config.record_trace) out.trace.push_back(record);
    if (average_done) break;
    pi = std::move(next);
    if (record.distance < config.convergence_tol) {
      const auto c = verify_equilibrium(model, pi, eta, rho, config.tolerance);
      consider(c, pi, k + 1, false);
      break;
    }
  }
  return out;
}

}  // namespace

EquilibriumCertificate verify_equilibrium(const GameModel& model,
                                          const StationaryProfile& profile,
                                          const Distribution& eta, const Rho& rho,
                                          double tolerance) {
  validate_profile(model, profile);
  validate_distribution(model, eta);
  check_rho_shape(model, rho);
  return evaluate(model, profile, eta, rho, tolerance).certificate;
}

EquilibriumCertificate verify_unconstrained_equilibrium(
    const GameModel& model, const StationaryProfile& profile,
    const Distribution& eta, double tolerance) {
  validate_profile(model, profile);
  validate_distribution(model, eta);
  const int N = model.player_count();
  EquilibriumCertificate c;
  c.payoffs = payoffs(model, occupation_measure(model, profile, eta));
  c.feasible.assign(N, true);
  c.response_feasible.assign(N, true);
  c.slack.assign(N, kInf);
  for (int i = 0; i < N; ++i) {
    const double value =
        unconstrained_best_value(freeze_opponents(model, i, profile), eta);
    c.best_response_value.push_back(value);
    c.gap.push_back(value - c.payoffs.R[i]);
  }
  finish(c, tolerance);
  return c;
}

Rho unconstrained_rho(const GameModel& model, const Distribution& eta) {
  const double bound = uniform_absorption_bound(model, eta);
  const double value = -(model.reward_bound() * bound + 1.0);
  return Rho(model.player_count(),
             std::vector<double>(model.constraint_count(), value));
}

void SolveConfig::validate() const {
  auto bad = [](const char* what) {
    throw Error(ErrorCode::InvalidArgument, std::string("SolveConfig: ") + what);
  };
  if (max_iterations < 1) bad("max_iterations must be >= 1");
  if (!(damping > 0.0 && damping <= 1.0)) bad("damping must lie in (0, 1]");
  if (!(convergence_tol >= 0.0)) bad("convergence_tol must be >= 0");
  if (!(tolerance >= 0.0)) bad("tolerance must be >= 0");
  if (restarts < 1) bad("restarts must be >= 1");
  if (threads < 0) bad("threads must be >= 0");
}

std::string_view to_string(SolveStatus status) {
  return status == SolveStatus::success ? "success" : "no_convergence";
}

SolveResult solve_equilibrium(const GameModel& model, const Distribution& eta,
                              const Rho& rho, const SolveConfig& config) {
  config.validate();
  validate_distribution(model, eta);
  check_rho_shape(model, rho);

  const auto start = uniform_profile(model);
  for (int i = 0; i < model.player_count(); ++i) {
    const double slack = slater_check(model, i, start, eta, rho[i]);
    if (!(slack > 0.0)) {
      throw Error(ErrorCode::SlaterFailure,
                  "player " + std::to_string(i) +
                      " cannot strictly satisfy its constraints (max slack " +
                      std::to_string(slack) + ")");
    }
  }

  std::vector<RestartOutcome> outcomes(config.restarts);
  std::vector<std::exception_ptr> errors(config.restarts);
  int workers = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, config.restarts);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int r = next++; r < config.restarts; r = next++) {
      try {
        outcomes[r] = run_restart(model, eta, rho, config, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SolveResult result;
  int best = -1;
  for (int r = 0; r < config.restarts; ++r) {
    result.total_iterations += outcomes[r].iterations;
    if (!outcomes[r].has_candidate) continue;
    if (best < 0 || better(outcomes[r].certificate, outcomes[best].certificate)) {
      best = r;
    }
  }
  for (auto& o : outcomes) {
    for (auto& t : o.trace) result.trace.push_back(std::move(t));
  }
  if (best >= 0) {
    auto& o = outcomes[best];
    result.profile = std::move(o.profile);
    result.certificate = std::move(o.certificate);
    result.restart = best;
    result.iteration = o.iteration;
    result.from_average = o.from_average;
    result.status = result.certificate.equilibrium ? SolveStatus::success
                                                   : SolveStatus::no_convergence;
  }
  return result;
}

}  // namespace cmg
