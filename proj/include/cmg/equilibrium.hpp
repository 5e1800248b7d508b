#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "cmg/best_response.hpp"
#include "cmg/game_model.hpp"
#include "cmg/occupation.hpp"

namespace cmg {

/// Feasibility tolerance for C^i >= rho^i in certificates.
inline constexpr double kFeasibilityTolerance = 1e-8;

struct EquilibriumCertificate {
  /// C^i(eta, pi) >= rho^i componentwise, within kFeasibilityTolerance.
  std::vector<bool> feasible;
  /// Whether a feasible unilateral deviation exists at all for player i.
  std::vector<bool> response_feasible;
  /// Best-response value minus R^i(eta, pi). NaN when no feasible response.
  std::vector<double> gap;
  std::vector<double> best_response_value;
  /// min_j (C^{i,j} - rho^{i,j}); +inf without finite constraints.
  std::vector<double> slack;
  /// max_i max(gap_i, 0); +inf if any response is infeasible.
  double epsilon = 0.0;
  PayoffVector payoffs;
  /// The tolerance the certificate was issued for, and the verdict.
  double tolerance = 0.0;
  bool equilibrium = false;
};

/// Certifies `profile` with one best-response LP per player. The profile is
/// an epsilon-equilibrium iff every feasible[i] holds and epsilon <= tolerance.
EquilibriumCertificate verify_equilibrium(const GameModel& model,
                                          const StationaryProfile& profile,
                                          const Distribution& eta, const Rho& rho,
                                          double tolerance);

/// Unconstrained certificate computed without any LP: best-response values
/// come from policy iteration on each frozen view, and every player counts as
/// feasible.
EquilibriumCertificate verify_unconstrained_equilibrium(
    const GameModel& model, const StationaryProfile& profile,
    const Distribution& eta, double tolerance);

/// Constraint constants so negative that every strategy satisfies them
/// strictly: -(reward_bound * uniform_absorption_bound + 1) everywhere.
Rho unconstrained_rho(const GameModel& model, const Distribution& eta);

struct SolveConfig {
  int max_iterations = 5000;
  double damping = 0.5;          // in (0, 1]
  double convergence_tol = 1e-10;  // on the profile update distance
  double tolerance = 1e-4;       // certificate epsilon counted as success
  int restarts = 8;
  std::uint64_t seed = 0;
  /// Restart 0 starts from the uniform profile; the rest draw Dirichlet(1).
  bool uniform_start = true;
  /// Also certify the running average of the iterates.
  bool certify_average = true;
  /// Worker threads for restarts; 0 picks hardware concurrency.
  int threads = 0;
  /// Keep per-iteration trace records.
  bool record_trace = true;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

struct TraceRecord {
  int restart = 0;
  int iteration = 0;
  std::vector<double> gap;
  double epsilon = 0.0;
  double average_epsilon = 0.0;
  double distance = 0.0;
};

enum class SolveStatus { success, no_convergence };
std::string_view to_string(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::no_convergence;
  StationaryProfile profile;
  EquilibriumCertificate certificate;
  std::vector<TraceRecord> trace;
  /// Where the returned profile came from.
  int restart = 0;
  int iteration = 0;
  bool from_average = false;
  int total_iterations = 0;
};

/// Damped simultaneous best-response search. Each player's occupation
/// measure against the current opponents is mixed with its best response,
///   mu_{k+1}^i = (1 - damping) mu_k^i + damping * BR^i(pi_k^{-i}),
/// and the new strategy is read back by disintegration. Every iterate (and
/// the running average of the iterates) is certified; the search stops at
/// the first certificate with epsilon <= tolerance, when the update distance
/// drops below convergence_tol, or at max_iterations. The best certificate
/// across restarts is returned; NoConvergence is reported via the status.
///
/// Throws SlaterFailure when some player cannot strictly satisfy its
/// constraints against the initial (uniform) profile.
SolveResult solve_equilibrium(const GameModel& model, const Distribution& eta,
                              const Rho& rho, const SolveConfig& config);

}  // namespace cmg
