#include "cmg/model_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace cmg::io {

namespace {

[[noreturn]] void schema(const std::string& message) {
  throw Error(ErrorCode::Schema, message);
}

const Json& require(const Json& object, const char* key) {
  auto it = object.find(key);
  if (it == object.end()) schema(std::string("missing key \"") + key + "\"");
  return *it;
}

void check_keys(const Json& object, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!object.is_object()) schema(where + " must be an object");
  for (const auto& item : object.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) schema("unknown key \"" + item.key() + "\" in " + where);
  }
}

std::vector<std::string> string_list(const Json& value, const std::string& where) {
  if (!value.is_array()) schema(where + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& item : value) {
    if (!item.is_string()) schema(where + " must be an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

int lookup(const std::vector<std::string>& names, const std::string& name,
           const std::string& what) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  schema("unknown " + what + " \"" + name + "\"");
}

int state_of(const ModelDescription& d, const Json& value) {
  if (!value.is_string()) schema("state references must be strings");
  return lookup(d.states, value.get<std::string>(), "state");
}

int integer(const Json& value, const std::string& where) {
  if (!value.is_number_integer()) schema(where + " must be an integer");
  return value.get<int>();
}

JointAction joint_of(const ModelDescription& d, const Json& value) {
  if (!value.is_array() || value.size() != d.actions.size()) {
    schema("joint actions must list one action per player");
  }
  JointAction a;
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_string()) schema("action references must be strings");
    const auto name = value[i].get<std::string>();
    a.push_back(name == "*" ? kAnyAction
                            : lookup(d.actions[i], name,
                                     "action of player " + std::to_string(i)));
  }
  return a;
}

void check_header(const Json& document, const char* format) {
  if (!document.is_object()) schema("document must be a JSON object");
  const auto& f = require(document, "format");
  if (!f.is_string() || f.get<std::string>() != format) {
    schema(std::string("expected format \"") + format + "\"");
  }
  const auto& v = require(document, "version");
  if (!v.is_number_integer() || v.get<int>() != kFormatVersion) {
    schema("unsupported format version");
  }
}

Json joint_names(const GameModel& model, const JointAction& a) {
  Json out = Json::array();
  for (int i = 0; i < model.player_count(); ++i) out.push_back(model.actions(i)[a[i]]);
  return out;
}

Json number_or_null(double v) {
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

}  // namespace

double parse_number(const Json& value) {
  if (value.is_number()) return value.get<double>();
  if (!value.is_string()) schema("expected a number or a numeric string");
  const auto text = value.get<std::string>();
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    long long num = 0;
    long long den = 0;
    auto r1 = std::from_chars(begin, begin + slash, num);
    auto r2 = std::from_chars(begin + slash + 1, end, den);
    if (r1.ec != std::errc() || r1.ptr != begin + slash || r2.ec != std::errc() ||
        r2.ptr != end || den <= 0) {
      schema("malformed fraction \"" + text + "\"");
    }
    return static_cast<double>(num) / static_cast<double>(den);
  }
  double out = 0.0;
  auto r = std::from_chars(begin, end, out);
  if (r.ec != std::errc() || r.ptr != end) schema("malformed number \"" + text + "\"");
  return out;
}

ModelDocument parse_model_document(const Json& document) {
  check_header(document, kModelFormat);
  check_keys(document,
             {"format", "version", "states", "players", "actions", "admissible",
              "delta", "eta", "constraints", "rho", "kernel", "rewards", "costs",
              "discount", "description"},
             "model");
  ModelDocument doc;
  auto& d = doc.description;
  d.states = string_list(require(document, "states"), "states");
  const int players = integer(require(document, "players"), "players");
  const auto& actions = require(document, "actions");
  if (!actions.is_array() || static_cast<int>(actions.size()) != players) {
    schema("actions must list one array per player");
  }
  for (std::size_t i = 0; i < actions.size(); ++i) {
    d.actions.push_back(string_list(actions[i], "actions"));
  }

  if (auto it = document.find("admissible"); it != document.end()) {
    if (!it->is_array() || static_cast<int>(it->size()) != players) {
      schema("admissible must list one object per player");
    }
    d.admissible.resize(players);
    for (int i = 0; i < players; ++i) {
      const auto& per_state = (*it)[i];
      if (!per_state.is_object()) schema("admissible entries must be objects");
      auto& sets = d.admissible[i];
      sets.resize(d.states.size());
      for (std::size_t x = 0; x < d.states.size(); ++x) {
        for (std::size_t a = 0; a < d.actions[i].size(); ++a) {
          sets[x].push_back(static_cast<int>(a));
        }
      }
      for (const auto& item : per_state.items()) {
        const int x = lookup(d.states, item.key(), "state");
        sets[x].clear();
        for (const auto& name : string_list(item.value(), "admissible actions")) {
          sets[x].push_back(lookup(d.actions[i], name,
                                   "action of player " + std::to_string(i)));
        }
      }
    }
  }

  if (auto it = document.find("delta"); it != document.end()) {
    for (const auto& name : string_list(*it, "delta")) {
      d.delta.push_back(lookup(d.states, name, "state"));
    }
  }

  d.eta.assign(d.states.size(), 0.0);
  const auto& eta = require(document, "eta");
  if (!eta.is_object()) schema("eta must map state names to probabilities");
  for (const auto& item : eta.items()) {
    d.eta[lookup(d.states, item.key(), "state")] = parse_number(item.value());
  }

  if (auto it = document.find("constraints"); it != document.end()) {
    d.constraint_count = integer(*it, "constraints");
  }
  if (auto it = document.find("rho"); it != document.end()) {
    if (!it->is_array()) schema("rho must be an array of arrays");
    for (const auto& row : *it) {
      if (!row.is_array()) schema("rho must be an array of arrays");
      std::vector<double> values;
      for (const auto& v : row) values.push_back(parse_number(v));
      d.rho.push_back(std::move(values));
    }
  }

  const auto& kernel = require(document, "kernel");
  if (!kernel.is_array()) schema("kernel must be an array");
  std::set<std::tuple<int, JointAction, int>> seen;
  for (const auto& e : kernel) {
    check_keys(e, {"state", "action", "next", "p"}, "kernel entry");
    TransitionEntry t{state_of(d, require(e, "state")), joint_of(d, require(e, "action")),
                      state_of(d, require(e, "next")), parse_number(require(e, "p"))};
    if (!seen.emplace(t.state, t.action, t.next).second) {
      schema("duplicate kernel entry at state " + d.states[t.state]);
    }
    d.kernel.push_back(std::move(t));
  }

  if (auto it = document.find("rewards"); it != document.end()) {
    if (!it->is_array()) schema("rewards must be an array");
    for (const auto& e : *it) {
      check_keys(e, {"player", "state", "action", "value"}, "reward entry");
      d.rewards.push_back({integer(require(e, "player"), "player"),
                           state_of(d, require(e, "state")),
                           joint_of(d, require(e, "action")),
                           parse_number(require(e, "value"))});
    }
  }
  if (auto it = document.find("costs"); it != document.end()) {
    if (!it->is_array()) schema("costs must be an array");
    for (const auto& e : *it) {
      check_keys(e, {"player", "row", "state", "action", "value"}, "cost entry");
      d.costs.push_back({integer(require(e, "player"), "player"),
                         integer(require(e, "row"), "row"),
                         state_of(d, require(e, "state")),
                         joint_of(d, require(e, "action")),
                         parse_number(require(e, "value"))});
    }
  }

  if (auto it = document.find("discount"); it != document.end()) {
    check_keys(*it, {"beta"}, "discount");
    doc.discount = parse_number(require(*it, "beta"));
  }
  return doc;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::Schema, path.string() + ": " + e.what());
  }
}

ModelDocument read_model_document(const std::filesystem::path& path) {
  return parse_model_document(read_json(path));
}

GameModel parse_model(const Json& document) {
  auto doc = parse_model_document(document);
  if (doc.discount) {
    schema("model has a discount block; transform it to an absorbing model first");
  }
  return build_model(doc.description);
}

GameModel load_model(const std::filesystem::path& path) {
  return parse_model(read_json(path));
}

DiscountedModel parse_discounted_model(const Json& document) {
  auto doc = parse_model_document(document);
  if (!doc.discount) schema("model has no discount block");
  return DiscountedModel(doc.description, *doc.discount);
}

Json model_to_json(const GameModel& model) {
  const auto d = model.describe();
  Json out;
  out["format"] = kModelFormat;
  out["version"] = kFormatVersion;
  out["states"] = model.states();
  out["players"] = model.player_count();
  Json actions = Json::array();
  for (int i = 0; i < model.player_count(); ++i) actions.push_back(model.actions(i));
  out["actions"] = actions;
  Json admissible = Json::array();
  for (int i = 0; i < model.player_count(); ++i) {
    Json per_state = Json::object();
    for (int x = 0; x < model.state_count(); ++x) {
      Json names = Json::array();
      for (int a : model.admissible(i, x)) names.push_back(model.actions(i)[a]);
      per_state[model.states()[x]] = names;
    }
    admissible.push_back(per_state);
  }
  out["admissible"] = admissible;
  Json delta = Json::array();
  for (int x : d.delta) delta.push_back(model.states()[x]);
  out["delta"] = delta;
  Json eta = Json::object();
  for (int x = 0; x < model.state_count(); ++x) {
    if (model.eta()[x] != 0.0) eta[model.states()[x]] = model.eta()[x];
  }
  out["eta"] = eta;
  out["constraints"] = model.constraint_count();
  out["rho"] = rho_to_json(model.rho());
  Json kernel = Json::array();
  for (const auto& e : d.kernel) {
    kernel.push_back({{"state", model.states()[e.state]},
                      {"action", joint_names(model, e.action)},
                      {"next", model.states()[e.next]},
                      {"p", e.probability}});
  }
  out["kernel"] = kernel;
  Json rewards = Json::array();
  for (const auto& e : d.rewards) {
    rewards.push_back({{"player", e.player},
                       {"state", model.states()[e.state]},
                       {"action", joint_names(model, e.action)},
                       {"value", e.value}});
  }
  out["rewards"] = rewards;
  Json costs = Json::array();
  for (const auto& e : d.costs) {
    costs.push_back({{"player", e.player},
                     {"row", e.row},
                     {"state", model.states()[e.state]},
                     {"action", joint_names(model, e.action)},
                     {"value", e.value}});
  }
  out["costs"] = costs;
  return out;
}

StationaryProfile profile_from_json(const GameModel& model, const Json& document) {
  const Json* body = &document;
  if (document.is_object()) {
    auto it = document.find("profile");
    if (it == document.end()) schema("profile document has no \"profile\" key");
    body = &*it;
  }
  if (!body->is_array() || static_cast<int>(body->size()) != model.player_count()) {
    schema("profile must list one object per player");
  }
  StationaryProfile profile = uniform_profile(model);
  for (int i = 0; i < model.player_count(); ++i) {
    const auto& per_state = (*body)[i];
    if (!per_state.is_object()) schema("profile entries must be objects");
    for (const auto& item : per_state.items()) {
      const int x = model.state_index(item.key());
      if (x < 0) schema("unknown state \"" + item.key() + "\" in profile");
      if (!item.value().is_object()) schema("profile state entries must be objects");
      auto& row = profile.pi[i][x];
      std::fill(row.begin(), row.end(), 0.0);
      for (const auto& action : item.value().items()) {
        const auto& names = model.actions(i);
        const int a = lookup(names, action.key(), "action of player " + std::to_string(i));
        const int pos = model.admissible_position(i, x, a);
        if (pos < 0) {
          schema("action \"" + action.key() + "\" is not admissible at state " +
                 item.key());
        }
        row[pos] = parse_number(action.value());
      }
    }
  }
  validate_profile(model, profile);
  return profile;
}

Json profile_to_json(const GameModel& model, const StationaryProfile& profile) {
  Json out = Json::array();
  for (int i = 0; i < model.player_count(); ++i) {
    Json per_state = Json::object();
    for (int x = 0; x < model.state_count(); ++x) {
      Json row = Json::object();
      const auto& adm = model.admissible(i, x);
      for (std::size_t p = 0; p < adm.size(); ++p) {
        row[model.actions(i)[adm[p]]] = profile.pi[i][x][p];
      }
      per_state[model.states()[x]] = row;
    }
    out.push_back(per_state);
  }
  return out;
}

Json profile_document(const GameModel& model, const StationaryProfile& profile) {
  return {{"format", kProfileFormat},
          {"version", kFormatVersion},
          {"profile", profile_to_json(model, profile)}};
}

Rho rho_from_json(const GameModel& model, const Json& value) {
  if (!value.is_array() || static_cast<int>(value.size()) != model.player_count()) {
    schema("rho must list one array per player");
  }
  Rho rho;
  for (const auto& row : value) {
    if (!row.is_array() || static_cast<int>(row.size()) != model.constraint_count()) {
      schema("rho rows must have one entry per constraint row");
    }
    std::vector<double> values;
    for (const auto& v : row) values.push_back(parse_number(v));
    rho.push_back(std::move(values));
  }
  return rho;
}

Json rho_to_json(const Rho& rho) {
  Json out = Json::array();
  for (const auto& row : rho) out.push_back(row);
  return out;
}

Json payoffs_to_json(const PayoffVector& payoffs) {
  return {{"R", payoffs.R}, {"C", payoffs.C}};
}

Json certificate_to_json(const EquilibriumCertificate& c) {
  Json gap = Json::array(), value = Json::array(), slack = Json::array();
  Json feasible = Json::array(), response = Json::array();
  for (std::size_t i = 0; i < c.gap.size(); ++i) {
    gap.push_back(number_or_null(c.gap[i]));
    value.push_back(number_or_null(c.best_response_value[i]));
    slack.push_back(number_or_null(c.slack[i]));
    feasible.push_back(static_cast<bool>(c.feasible[i]));
    response.push_back(static_cast<bool>(c.response_feasible[i]));
  }
  return {{"feasible", feasible},
          {"response_feasible", response},
          {"gap", gap},
          {"best_response_value", value},
          {"slack", slack},
          {"epsilon", number_or_null(c.epsilon)},
          {"tolerance", c.tolerance},
          {"equilibrium", c.equilibrium},
          {"payoffs", payoffs_to_json(c.payoffs)}};
}

Json absorption_to_json(const GameModel& model, const AbsorptionReport& report) {
  auto component = [&](const EndComponent& ec) {
    Json pairs = Json::array();
    for (const auto& [x, k] : ec.pairs) {
      pairs.push_back({{"state", model.states()[x]},
                       {"action", joint_names(model, model.joint_action(x, k))}});
    }
    Json states = Json::array();
    for (int x : ec.states) states.push_back(model.states()[x]);
    return Json{{"states", states}, {"pairs", pairs}};
  };
  Json out;
  out["is_absorbing"] = report.is_absorbing;
  out["offending_component"] =
      report.offending_component ? component(*report.offending_component) : Json(nullptr);
  Json all = Json::array();
  for (const auto& ec : report.end_components) all.push_back(component(ec));
  out["end_components"] = all;
  out["uniform_bound"] =
      report.uniform_bound ? Json(*report.uniform_bound) : Json(nullptr);
  return out;
}

Json measure_to_json(const GameModel& model, const OccupationMeasure& mu) {
  Json weights = Json::array();
  for (int x = 0; x < model.state_count(); ++x) {
    for (std::size_t k = 0; k < mu.weights[x].size(); ++k) {
      if (mu.weights[x][k] == 0.0) continue;
      Json action;
      if (mu.kind == MeasureKind::joint) {
        action = joint_names(model, model.joint_action(x, static_cast<int>(k)));
      } else {
        action = model.actions(mu.player)[model.admissible(mu.player, x)[k]];
      }
      weights.push_back({{"state", model.states()[x]},
                         {"action", action},
                         {"weight", mu.weights[x][k]}});
    }
  }
  return {{"kind", mu.kind == MeasureKind::joint ? "joint" : "player_marginal"},
          {"player", mu.player},
          {"total_mass", mu.total_mass()},
          {"weights", weights}};
}

Json estimate_to_json(const GameModel& model, const EstimateReport& report) {
  auto est = [](const Estimate& e) {
    return Json{{"mean", e.mean}, {"standard_error", e.standard_error}};
  };
  Json reward = Json::array();
  for (const auto& e : report.reward) reward.push_back(est(e));
  Json cost = Json::array();
  for (const auto& row : report.cost) {
    Json r = Json::array();
    for (const auto& e : row) r.push_back(est(e));
    cost.push_back(r);
  }
  Json occupation = Json::array();
  for (int x = 0; x < model.state_count(); ++x) {
    for (int k = 0; k < model.joint_count(x); ++k) {
      if (report.occupation[x][k] == 0.0) continue;
      occupation.push_back({{"state", model.states()[x]},
                            {"action", joint_names(model, model.joint_action(x, k))},
                            {"weight", report.occupation[x][k]}});
    }
  }
  return {{"hitting_time", est(report.hitting_time)},
          {"reward", reward},
          {"cost", cost},
          {"occupation", occupation},
          {"samples", report.samples},
          {"truncated", report.truncated},
          {"seed", report.seed}};
}

Json trace_to_json(const TraceRecord& r) {
  Json gap = Json::array();
  for (double g : r.gap) gap.push_back(number_or_null(g));
  return {{"restart", r.restart},
          {"iteration", r.iteration},
          {"gap", gap},
          {"epsilon", number_or_null(r.epsilon)},
          {"average_epsilon", number_or_null(r.average_epsilon)},
          {"distance", r.distance}};
}

}  // namespace cmg::io
