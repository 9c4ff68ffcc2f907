#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "gemreason/model.hpp"

namespace gemreason {

/// Native model document: one JSON object with keys model_id, version,
/// compartments, species, reactions, genes, biomass_goal, exchange_species
/// and optionally objective. See docs/native-format.md.
MetabolicModel parse_native(std::string_view document);

/// Canonical rendering: sorted keys, entities in identifier order, two-space indent.
std::string render_native(const MetabolicModel& model);

// Entity-level (de)serialisers shared with the revision ledger. Readers throw
// ParseError carrying a JSON path such as `reactions[2].products[0].species`.
nlohmann::json to_json(const MetabolicModel& model);
nlohmann::json to_json(const Compartment& c);
nlohmann::json to_json(const Species& s);
nlohmann::json to_json(const Reaction& r);
nlohmann::json bound_to_json(double value);

MetabolicModel model_from_json(const nlohmann::json& j);
Compartment compartment_from_json(const nlohmann::json& j, const std::string& path);
Species species_from_json(const nlohmann::json& j, const std::string& path);
Reaction reaction_from_json(const nlohmann::json& j, const std::string& path);
double bound_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace gemreason
