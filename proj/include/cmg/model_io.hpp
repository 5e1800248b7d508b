#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "cmg/absorption.hpp"
#include "cmg/equilibrium.hpp"
#include "cmg/game_model.hpp"
#include "cmg/occupation.hpp"
#include "cmg/simulate.hpp"
#include "cmg/transforms.hpp"

namespace cmg::io {

using Json = nlohmann::json;

inline constexpr const char* kModelFormat = "cmg-model";
inline constexpr const char* kProfileFormat = "cmg-profile";
inline constexpr const char* kResultFormat = "cmg-result";
inline constexpr int kFormatVersion = 1;

/// A parsed model file: either an absorbing game or, when a discount block is
/// present, the stage game of a discounted one.
struct ModelDocument {
  ModelDescription description;
  std::optional<double> discount;
};

/// Accepts a JSON number, or a string holding a decimal or an exact
/// fraction "p/q". Throws Schema.
double parse_number(const Json& value);

ModelDocument parse_model_document(const Json& document);
ModelDocument read_model_document(const std::filesystem::path& path);

/// Loads an absorbing model; a discounted file is rejected with Schema.
GameModel parse_model(const Json& document);
GameModel load_model(const std::filesystem::path& path);
DiscountedModel parse_discounted_model(const Json& document);

Json model_to_json(const GameModel& model);

StationaryProfile profile_from_json(const GameModel& model, const Json& document);
/// Per player, per state, action name -> probability.
Json profile_to_json(const GameModel& model, const StationaryProfile& profile);
Json profile_document(const GameModel& model, const StationaryProfile& profile);

Rho rho_from_json(const GameModel& model, const Json& value);
Json rho_to_json(const Rho& rho);

Json payoffs_to_json(const PayoffVector& payoffs);
Json certificate_to_json(const EquilibriumCertificate& certificate);
Json absorption_to_json(const GameModel& model, const AbsorptionReport& report);
Json measure_to_json(const GameModel& model, const OccupationMeasure& mu);
Json estimate_to_json(const GameModel& model, const EstimateReport& report);
Json trace_to_json(const TraceRecord& record);

Json read_json(const std::filesystem::path& path);

}  // namespace cmg::io
