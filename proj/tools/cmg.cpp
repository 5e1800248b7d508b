// cmg: command-line front end for the absorbing-game solver.
//
// Exit codes: 0 ok / verified, 1 validation failure or not an equilibrium,
// 2 infeasible or Slater failure, 3 no convergence, 4 I/O or schema error.
// Errors go to stderr as one JSON record per line.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>

#include "CLI11.hpp"

#include "cmg/absorption.hpp"
#include "cmg/best_response.hpp"
#include "cmg/equilibrium.hpp"
#include "cmg/model_io.hpp"
#include "cmg/occupation.hpp"
#include "cmg/simulate.hpp"
#include "cmg/transforms.hpp"

namespace {

using cmg::io::Json;

enum Exit { kOk = 0, kInvalid = 1, kInfeasible = 2, kNoConvergence = 3, kIo = 4 };

int exit_code(cmg::ErrorCode code) {
  switch (code) {
    case cmg::ErrorCode::Schema:
    case cmg::ErrorCode::Io:
      return kIo;
    case cmg::ErrorCode::ConstraintInfeasible:
    case cmg::ErrorCode::SlaterFailure:
    case cmg::ErrorCode::InfeasibleLP:
      return kInfeasible;
    default:
      return kInvalid;
  }
}

void diagnostic(const Json& record) { std::cerr << record.dump() << '\n'; }

void emit(const Json& document, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << document.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw cmg::Error(cmg::ErrorCode::Io, "cannot write " + path);
  out << document.dump(2) << '\n';
}

std::uint64_t effective_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void echo_seed(const char* command, std::uint64_t seed) {
  diagnostic({{"event", "seed"}, {"command", command}, {"seed", seed}});
}

struct Common {
  std::string model;
  std::string output;
};

int cmd_validate(const Common& c) {
  auto doc = cmg::io::read_model_document(c.model);
  Json report;
  if (doc.discount) {
    cmg::DiscountedModel dm(doc.description, *doc.discount);
    report["kind"] = "discounted";
    report["beta"] = dm.beta();
    report["states"] = dm.stage().state_count();
    report["players"] = dm.stage().player_count();
    report["constraints"] = dm.stage().constraint_count();
    report["reward_bound"] = dm.stage().reward_bound();
  } else {
    auto model = cmg::build_model(doc.description);
    report["kind"] = "absorbing";
    report["states"] = model.state_count();
    report["players"] = model.player_count();
    report["constraints"] = model.constraint_count();
    report["reward_bound"] = model.reward_bound();
    report["pairs"] = model.pair_count();
  }
  report["valid"] = true;
  emit(report, c.output);
  return kOk;
}

int cmd_absorption(const Common& c, bool everywhere) {
  auto model = cmg::io::load_model(c.model);
  auto report = everywhere ? cmg::check_absorbing_everywhere(model)
                           : cmg::check_absorbing(model);
  Json out = cmg::io::absorption_to_json(model, report);
  if (report.is_absorbing) {
    auto decay = cmg::geometric_decay(model, model.eta());
    out["decay"] = {{"period", decay.period}, {"epsilon", decay.epsilon}};
  }
  emit(out, c.output);
  return kOk;
}

cmg::StationaryProfile load_profile(const cmg::GameModel& model,
                                    const std::string& path) {
  if (path.empty()) return cmg::uniform_profile(model);
  return cmg::io::profile_from_json(model, cmg::io::read_json(path));
}

int cmd_occupancy(const Common& c, const std::string& profile_path) {
  auto model = cmg::io::load_model(c.model);
  auto profile = load_profile(model, profile_path);
  auto mu = cmg::occupation_measure(model, profile, model.eta());
  Json out;
  out["measure"] = cmg::io::measure_to_json(model, mu);
  out["payoffs"] = cmg::io::payoffs_to_json(cmg::payoffs(model, mu));
  out["residual"] = cmg::residual(model, mu, model.eta());
  out["expected_hitting_time"] = cmg::expected_hitting_time(
      model, cmg::product_strategy(model, profile), model.eta());
  emit(out, c.output);
  return kOk;
}

int cmd_best_response(const Common& c, int player, const std::string& profile_path,
                      const std::string& dump_path) {
  auto model = cmg::io::load_model(c.model);
  if (player < 0 || player >= model.player_count()) {
    throw cmg::Error(cmg::ErrorCode::InvalidArgument, "no such player");
  }
  auto profile = load_profile(model, profile_path);
  const auto& rho_i = model.rho()[player];
  auto view = cmg::freeze_opponents(model, player, profile);
  if (!dump_path.empty()) {
    std::ofstream out(dump_path);
    if (!out) throw cmg::Error(cmg::ErrorCode::Io, "cannot write " + dump_path);
    cmg::write_lp(out, cmg::build_br_lp(view, model.eta(), rho_i));
  }
  auto br = cmg::best_response(view, model.eta(), rho_i, profile.pi[player]);
  Json strategy = Json::object();
  for (int x = 0; x < model.state_count(); ++x) {
    Json row = Json::object();
    const auto& adm = model.admissible(player, x);
    for (std::size_t p = 0; p < adm.size(); ++p) {
      row[model.actions(player)[adm[p]]] = br.strategy[x][p];
    }
    strategy[model.states()[x]] = row;
  }
  Json slack = Json::array();
  for (std::size_t j = 0; j < rho_i.size(); ++j) {
    slack.push_back(br.constraint_values[j] - rho_i[j]);
  }
  const double slater = cmg::slater_check(view, model.eta(), rho_i);
  emit({{"player", player},
        {"strategy", strategy},
        {"value", br.value},
        {"constraint_values", br.constraint_values},
        {"slack", slack},
        {"slater", std::isfinite(slater) ? Json(slater) : Json(nullptr)},
        {"lp", {{"status", cmg::to_string(br.lp.status)},
                {"iterations", br.lp.iterations}}}},
       c.output);
  return kOk;
}

struct SolveArgs {
  bool constrained = false;
  bool unconstrained = false;
  std::optional<std::uint64_t> seed;
  std::string trace;
  cmg::SolveConfig config;
};

int cmd_solve(const Common& c, SolveArgs args) {
  auto model = cmg::io::load_model(c.model);
  const auto seed = effective_seed(args.seed);
  echo_seed("solve", seed);
  args.config.seed = seed;
  args.config.record_trace = !args.trace.empty();
  const auto rho = args.unconstrained ? cmg::unconstrained_rho(model, model.eta())
                                      : model.rho();
  const auto start = std::chrono::steady_clock::now();
  auto result = cmg::solve_equilibrium(model, model.eta(), rho, args.config);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!args.trace.empty()) {
    std::ofstream out(args.trace);
    if (!out) throw cmg::Error(cmg::ErrorCode::Io, "cannot write " + args.trace);
    for (const auto& r : result.trace) out << cmg::io::trace_to_json(r).dump() << '\n';
  }

  Json doc;
  doc["format"] = cmg::io::kResultFormat;
  doc["version"] = cmg::io::kFormatVersion;
  doc["profile"] = cmg::io::profile_to_json(model, result.profile);
  doc["rho"] = cmg::io::rho_to_json(rho);
  doc["certificate"] = cmg::io::certificate_to_json(result.certificate);
  doc["solver"] = {{"status", cmg::to_string(result.status)},
                   {"mode", args.unconstrained ? "unconstrained" : "constrained"},
                   {"seed", seed},
                   {"restarts", args.config.restarts},
                   {"damping", args.config.damping},
                   {"tolerance", args.config.tolerance},
                   {"restart", result.restart},
                   {"iteration", result.iteration},
                   {"from_average", result.from_average},
                   {"iterations", result.total_iterations},
                   {"wall_time_seconds", wall}};
  emit(doc, c.output);
  if (result.status != cmg::SolveStatus::success) {
    diagnostic({{"error", "NoConvergence"},
                {"message", "no certified equilibrium within the iteration budget"},
                {"epsilon", result.certificate.epsilon}});
    return kNoConvergence;
  }
  return kOk;
}

int cmd_verify(const Common& c, const std::string& profile_path, double epsilon,
               bool unconstrained) {
  auto model = cmg::io::load_model(c.model);
  const auto document = cmg::io::read_json(profile_path);
  auto profile = cmg::io::profile_from_json(model, document);
  cmg::Rho rho = model.rho();
  if (unconstrained) {
    rho = cmg::unconstrained_rho(model, model.eta());
  } else if (auto it = document.find("rho"); it != document.end()) {
    rho = cmg::io::rho_from_json(model, *it);
  }
  auto cert = cmg::verify_equilibrium(model, profile, model.eta(), rho, epsilon);
  emit(cmg::io::certificate_to_json(cert), c.output);
  return cert.equilibrium ? kOk : kInvalid;
}

int cmd_simulate(const Common& c, const std::string& profile_path, long samples,
                 const std::optional<std::uint64_t>& seed_arg, int threads, long cap) {
  auto model = cmg::io::load_model(c.model);
  auto profile = load_profile(model, profile_path);
  const auto seed = effective_seed(seed_arg);
  echo_seed("simulate", seed);
  cmg::SimulateOptions options;
  options.threads = threads;
  options.cap = cap;
  auto report = cmg::estimate(model, profile, model.eta(), samples, seed, options);
  emit(cmg::io::estimate_to_json(model, report), c.output);
  return kOk;
}

int cmd_transform(const Common& c) {
  auto dm = cmg::io::parse_discounted_model(cmg::io::read_json(c.model));
  emit(cmg::io::model_to_json(cmg::discount_to_absorbing(dm)), c.output);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained Nash equilibria of absorbing Markov games"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("model", common.model, "Model file")->required();
    sub->add_option("-o,--output", common.output, "Write the result here instead of stdout");
  };

  auto* validate = app.add_subcommand("validate", "Load a model and report its invariants");
  add_common(validate);

  bool everywhere = false;
  auto* absorption = app.add_subcommand("absorption", "Absorption report and uniform bound");
  add_common(absorption);
  absorption->add_flag("--everywhere", everywhere, "Start from every state");

  std::string profile_path;
  auto* occupancy = app.add_subcommand("occupancy", "Occupation measure of a profile");
  add_common(occupancy);
  occupancy->add_option("--profile", profile_path, "Profile file (default uniform)");

  int player = 0;
  std::string dump_path;
  auto* br = app.add_subcommand("best-response", "Constrained best response of one player");
  add_common(br);
  br->add_option("--player", player, "Player index, 0-based")->required();
  br->add_option("--profile", profile_path, "Opponents' profile (default uniform)");
  br->add_option("--dump-lp", dump_path, "Write the LP in plain-text form");

  SolveArgs solve_args;
  std::uint64_t seed_value = 0;
  auto* solve = app.add_subcommand("solve", "Search for an equilibrium and certify it");
  add_common(solve);
  auto* mode = solve->add_option_group("mode");
  mode->add_flag("--constrained", solve_args.constrained, "Use the model's rho");
  mode->add_flag("--unconstrained", solve_args.unconstrained,
                 "Replace rho by constants every strategy satisfies");
  mode->require_option(0, 1);
  auto* solve_seed = solve->add_option("--seed", seed_value, "Master seed");
  solve->add_option("--restarts", solve_args.config.restarts);
  solve->add_option("--damping", solve_args.config.damping);
  solve->add_option("--tol", solve_args.config.tolerance, "Certificate epsilon for success");
  solve->add_option("--convergence-tol", solve_args.config.convergence_tol);
  solve->add_option("--max-iterations", solve_args.config.max_iterations);
  solve->add_option("--threads", solve_args.config.threads);
  solve->add_option("--trace", solve_args.trace, "Line-delimited trace output");

  double epsilon = 1e-6;
  bool verify_unconstrained = false;
  auto* verify = app.add_subcommand("verify", "Certify a profile as an epsilon-equilibrium");
  add_common(verify);
  verify->add_option("--profile", profile_path, "Profile or result file")->required();
  verify->add_option("--epsilon", epsilon);
  verify->add_flag("--unconstrained", verify_unconstrained);

  long samples = 100000;
  int threads = 0;
  long cap = cmg::kDefaultStepCap;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates under a profile");
  add_common(simulate);
  simulate->add_option("--profile", profile_path, "Profile file (default uniform)");
  simulate->add_option("--samples", samples);
  auto* sim_seed = simulate->add_option("--seed", seed_value, "Master seed");
  simulate->add_option("--threads", threads);
  simulate->add_option("--cap", cap, "Step cap per trajectory");

  auto* transform =
      app.add_subcommand("transform-discounted", "Cemetery-state absorbing model");
  add_common(transform);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalid;
  }

  try {
    if (*validate) return cmd_validate(common);
    if (*absorption) return cmd_absorption(common, everywhere);
    if (*occupancy) return cmd_occupancy(common, profile_path);
    if (*br) return cmd_best_response(common, player, profile_path, dump_path);
    if (*solve) {
      if (*solve_seed) solve_args.seed = seed_value;
      return cmd_solve(common, solve_args);
    }
    if (*verify) return cmd_verify(common, profile_path, epsilon, verify_unconstrained);
    if (*simulate) {
      std::optional<std::uint64_t> seed;
      if (*sim_seed) seed = seed_value;
      return cmd_simulate(common, profile_path, samples, seed, threads, cap);
    }
    if (*transform) return cmd_transform(common);
  } catch (const cmg::Error& e) {
    diagnostic({{"error", std::string(cmg::to_string(e.code()))}, {"message", e.what()}});
    return exit_code(e.code());
  } catch (const std::exception& e) {
    diagnostic({{"error", "Internal"}, {"message", e.what()}});
    return kInvalid;
  }
  return kOk;
}
