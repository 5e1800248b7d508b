// Thin layer over the library. Structured values cross the boundary as JSON
// text in the same shapes the command-line tool reads and writes; the Python
// package decodes them.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "cmg/absorption.hpp"
#include "cmg/best_response.hpp"
#include "cmg/equilibrium.hpp"
#include "cmg/model_io.hpp"
#include "cmg/occupation.hpp"
#include "cmg/simulate.hpp"
#include "cmg/transforms.hpp"

namespace py = pybind11;
using namespace cmg;
using io::Json;

namespace {

PyObject* error_type = nullptr;

StationaryProfile profile_arg(const GameModel& model, const std::optional<std::string>& text) {
  if (!text) return uniform_profile(model);
  return io::profile_from_json(model, Json::parse(*text));
}

Rho rho_arg(const GameModel& model, const std::optional<std::string>& text) {
  if (!text) return model.rho();
  return io::rho_from_json(model, Json::parse(*text));
}

std::string dump(const Json& j) { return j.dump(); }

Json strategy_json(const GameModel& model, int player, const PlayerStrategy& sigma) {
  StationaryProfile p = uniform_profile(model);
  p.pi[player] = sigma;
  return io::profile_to_json(model, p)[player];
}

}  // namespace

PYBIND11_MODULE(_cmgame, m) {
  m.doc() = "Constrained Nash equilibria of absorbing Markov games";

  error_type = py::exception<Error>(m, "Error").release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::tuple args = py::make_tuple(std::string(to_string(e.code())), e.what());
      PyErr_SetObject(error_type, args.ptr());
    } catch (const Json::exception& e) {
      py::tuple args = py::make_tuple(std::string("Schema"), e.what());
      PyErr_SetObject(error_type, args.ptr());
    }
  });

  py::class_<GameModel>(m, "GameModel")
      .def_property_readonly("states", &GameModel::states)
      .def_property_readonly("player_count", &GameModel::player_count)
      .def_property_readonly("constraint_count", &GameModel::constraint_count)
      .def_property_readonly("eta", &GameModel::eta)
      .def_property_readonly("rho", &GameModel::rho)
      .def_property_readonly("delta", &GameModel::delta)
      .def("actions", &GameModel::actions, py::arg("player"))
      .def("admissible", &GameModel::admissible, py::arg("player"), py::arg("state"))
      .def("to_json", [](const GameModel& g) { return dump(io::model_to_json(g)); });

  m.def("parse_model", [](const std::string& text) { return io::parse_model(Json::parse(text)); });
  m.def("load_model", [](const std::string& path) { return io::load_model(path); });
  m.def("discount_to_absorbing", [](const std::string& text) {
    return discount_to_absorbing(io::parse_discounted_model(Json::parse(text)));
  });

  m.def("uniform_profile", [](const GameModel& g) {
    return dump(io::profile_to_json(g, uniform_profile(g)));
  });

  m.def("check_absorbing", [](const GameModel& g, bool everywhere) {
    auto report = everywhere ? check_absorbing_everywhere(g) : check_absorbing(g, g.eta());
    return dump(io::absorption_to_json(g, report));
  }, py::arg("model"), py::arg("everywhere") = false);

  m.def("uniform_absorption_bound",
        [](const GameModel& g) { return uniform_absorption_bound(g, g.eta()); });

  m.def("expected_hitting_time", [](const GameModel& g, std::optional<std::string> profile) {
    return expected_hitting_time(g, product_strategy(g, profile_arg(g, profile)), g.eta());
  }, py::arg("model"), py::arg("profile") = py::none());

  m.def("occupancy", [](const GameModel& g, std::optional<std::string> profile) {
    auto mu = occupation_measure(g, profile_arg(g, profile), g.eta());
    Json out = io::measure_to_json(g, mu);
    out["payoffs"] = io::payoffs_to_json(payoffs(g, mu));
    out["residual"] = residual(g, mu, g.eta());
    out["total_mass"] = mu.total_mass();
    return dump(out);
  }, py::arg("model"), py::arg("profile") = py::none());

  m.def("best_response", [](const GameModel& g, int player, std::optional<std::string> profile,
                            std::optional<std::string> rho) {
    if (player < 0 || player >= g.player_count()) {
      throw Error(ErrorCode::InvalidArgument, "player index out of range");
    }
    const auto p = profile_arg(g, profile);
    const auto r = rho_arg(g, rho);
    auto br = best_response(g, player, p, g.eta(), r[player]);
    return dump(Json{{"player", player},
                     {"value", br.value},
                     {"strategy", strategy_json(g, player, br.strategy)},
                     {"constraint_values", br.constraint_values},
                     {"slater_slack", slater_check(g, player, p, g.eta(), r[player])}});
  }, py::arg("model"), py::arg("player"), py::arg("profile") = py::none(),
     py::arg("rho") = py::none());

  m.def("unconstrained_rho",
        [](const GameModel& g) { return dump(io::rho_to_json(unconstrained_rho(g, g.eta()))); });

  m.def("verify_equilibrium", [](const GameModel& g, std::optional<std::string> profile,
                                 std::optional<std::string> rho, double tolerance,
                                 bool unconstrained) {
    const auto p = profile_arg(g, profile);
    auto c = unconstrained ? verify_unconstrained_equilibrium(g, p, g.eta(), tolerance)
                           : verify_equilibrium(g, p, g.eta(), rho_arg(g, rho), tolerance);
    return dump(io::certificate_to_json(c));
  }, py::arg("model"), py::arg("profile") = py::none(), py::arg("rho") = py::none(),
     py::arg("tolerance") = 1e-6, py::arg("unconstrained") = false);

  m.def("solve_equilibrium", [](const GameModel& g, std::optional<std::string> rho,
                                bool unconstrained, int max_iterations, double damping,
                                double convergence_tol, double tolerance, int restarts,
                                std::uint64_t seed, bool uniform_start, int threads) {
    SolveConfig c;
    c.max_iterations = max_iterations;
    c.damping = damping;
    c.convergence_tol = convergence_tol;
    c.tolerance = tolerance;
    c.restarts = restarts;
    c.seed = seed;
    c.uniform_start = uniform_start;
    c.threads = threads;
    c.record_trace = false;
    const Rho r = unconstrained ? unconstrained_rho(g, g.eta()) : rho_arg(g, rho);
    SolveResult res;
    {
      py::gil_scoped_release release;
      res = solve_equilibrium(g, g.eta(), r, c);
    }
    return dump(Json{{"status", std::string(to_string(res.status))},
                     {"profile", io::profile_to_json(g, res.profile)},
                     {"certificate", io::certificate_to_json(res.certificate)},
                     {"rho", io::rho_to_json(r)},
                     {"restart", res.restart},
                     {"iteration", res.iteration},
                     {"from_average", res.from_average},
                     {"total_iterations", res.total_iterations}});
  }, py::arg("model"), py::arg("rho") = py::none(), py::arg("unconstrained") = false,
     py::arg("max_iterations") = SolveConfig{}.max_iterations,
     py::arg("damping") = SolveConfig{}.damping,
     py::arg("convergence_tol") = SolveConfig{}.convergence_tol,
     py::arg("tolerance") = SolveConfig{}.tolerance,
     py::arg("restarts") = SolveConfig{}.restarts, py::arg("seed") = 0,
     py::arg("uniform_start") = true, py::arg("threads") = 0);

  m.def("simulate", [](const GameModel& g, std::optional<std::string> profile, long samples,
                       std::uint64_t seed, long cap, int threads) {
    const auto p = profile_arg(g, profile);
    EstimateReport report;
    {
      py::gil_scoped_release release;
      report = estimate(g, p, g.eta(), samples, seed, {.cap = cap, .threads = threads});
    }
    return dump(io::estimate_to_json(g, report));
  }, py::arg("model"), py::arg("profile") = py::none(), py::arg("samples") = 10'000,
     py::arg("seed") = 0, py::arg("cap") = kDefaultStepCap, py::arg("threads") = 0);
}
