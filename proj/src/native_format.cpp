#include "gemreason/native_format.hpp"

#include <cmath>

#include "gemreason/errors.hpp"

namespace gemreason {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "." + key, "missing required field");
  return *it;
}

std::string string_of(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key,
                                           const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return string_of(*it, path + "." + key);
}

const json& array_of(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array");
  return j;
}

std::string at(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

json terms_to_json(const std::vector<StoichTerm>& terms) {
  json out = json::array();
  for (const auto& t : terms) out.push_back({{"species", t.species.str()}, {"coefficient", t.coefficient}});
  return out;
}

std::vector<StoichTerm> terms_from_json(const json& j, const std::string& path) {
  std::vector<StoichTerm> out;
  for (std::size_t i = 0; i < array_of(j, path).size(); ++i) {
    const std::string p = at(path, i);
    StoichTerm t;
    t.species = SpeciesId{string_of(field(j[i], "species", p), p + ".species")};
    const json& c = field(j[i], "coefficient", p);
    if (!c.is_number()) schema_error(p + ".coefficient", "expected a number");
    t.coefficient = c.get<double>();
    out.push_back(std::move(t));
  }
  return out;
}

template <typename Id>
json ids_to_json(const std::set<Id>& ids) {
  json out = json::array();
  for (const auto& id : ids) out.push_back(id.str());
  return out;
}

template <typename Id>
std::set<Id> ids_from_json(const json& j, const std::string& path) {
  std::set<Id> out;
  for (std::size_t i = 0; i < array_of(j, path).size(); ++i) {
    Id id{string_of(j[i], at(path, i))};
    if (!out.insert(id).second) schema_error(at(path, i), "duplicate identifier '" + id.str() + "'");
  }
  return out;
}

}  // namespace

json bound_to_json(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

double bound_from_json(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
  }
  schema_error(path, "expected a number, \"inf\" or \"-inf\"");
}

json to_json(const Compartment& c) {
  json j = {{"id", c.id.str()}};
  if (c.name) j["name"] = *c.name;
  return j;
}

json to_json(const Species& s) {
  json j = {{"id", s.id.str()}, {"compartment", s.compartment.str()}};
  if (s.name) j["name"] = *s.name;
  return j;
}

json to_json(const Reaction& r) {
  return {{"id", r.id.str()},
          {"substrates", terms_to_json(r.substrates)},
          {"products", terms_to_json(r.products)},
          {"reversible", r.reversible},
          {"gpr", to_string(r.gpr)},
          {"lower_bound", bound_to_json(r.lower_bound)},
          {"upper_bound", bound_to_json(r.upper_bound)}};
}

Compartment compartment_from_json(const json& j, const std::string& path) {
  Compartment c;
  c.id = CompartmentId{string_of(field(j, "id", path), path + ".id")};
  c.name = optional_string(j, "name", path);
  return c;
}

Species species_from_json(const json& j, const std::string& path) {
  Species s;
  s.id = SpeciesId{string_of(field(j, "id", path), path + ".id")};
  s.compartment = CompartmentId{string_of(field(j, "compartment", path), path + ".compartment")};
  s.name = optional_string(j, "name", path);
  return s;
}

Reaction reaction_from_json(const json& j, const std::string& path) {
  Reaction r;
  r.id = ReactionId{string_of(field(j, "id", path), path + ".id")};
  r.substrates = terms_from_json(field(j, "substrates", path), path + ".substrates");
  r.products = terms_from_json(field(j, "products", path), path + ".products");
  const json& rev = field(j, "reversible", path);
  if (!rev.is_boolean()) schema_error(path + ".reversible", "expected a boolean");
  r.reversible = rev.get<bool>();
  auto gpr = optional_string(j, "gpr", path);
  try {
    r.gpr = parse_gpr(gpr.value_or(""));
  } catch (const ParseError& e) {
    schema_error(path + ".gpr", e.what());
  }
  r.lower_bound = bound_from_json(field(j, "lower_bound", path), path + ".lower_bound");
  r.upper_bound = bound_from_json(field(j, "upper_bound", path), path + ".upper_bound");
  return r;
}

json to_json(const MetabolicModel& m) {
  json j;
  j["model_id"] = m.id;
  j["version"] = m.version;
  j["compartments"] = json::array();
  for (const auto& [_, c] : m.compartments) j["compartments"].push_back(to_json(c));
  j["species"] = json::array();
  for (const auto& [_, s] : m.species) j["species"].push_back(to_json(s));
  j["reactions"] = json::array();
  for (const auto& [_, r] : m.reactions) j["reactions"].push_back(to_json(r));
  j["genes"] = ids_to_json(m.genes);
  j["biomass_goal"] = ids_to_json(m.biomass_goal);
  j["exchange_species"] = ids_to_json(m.exchange_species);
  if (m.objective) j["objective"] = m.objective->str();
  return j;
}

MetabolicModel model_from_json(const json& j) {
  const std::string root = "$";
  if (!j.is_object()) schema_error(root, "expected an object");
  MetabolicModel m;
  m.id = string_of(field(j, "model_id", root), "$.model_id");
  m.version = string_of(field(j, "version", root), "$.version");

  const json& comps = array_of(field(j, "compartments", root), "$.compartments");
  for (std::size_t i = 0; i < comps.size(); ++i) {
    Compartment c = compartment_from_json(comps[i], at("$.compartments", i));
    if (m.compartments.count(c.id))
      schema_error(at("$.compartments", i), "duplicate compartment '" + c.id.str() + "'");
    m.compartments.emplace(c.id, std::move(c));
  }

  const json& species = array_of(field(j, "species", root), "$.species");
  for (std::size_t i = 0; i < species.size(); ++i) {
    Species s = species_from_json(species[i], at("$.species", i));
    if (m.species.count(s.id)) schema_error(at("$.species", i), "duplicate species '" + s.id.str() + "'");
    m.species.emplace(s.id, std::move(s));
  }

  const json& reactions = array_of(field(j, "reactions", root), "$.reactions");
  for (std::size_t i = 0; i < reactions.size(); ++i) {
    Reaction r = reaction_from_json(reactions[i], at("$.reactions", i));
    if (m.reactions.count(r.id))
      schema_error(at("$.reactions", i), "duplicate reaction '" + r.id.str() + "'");
    m.reactions.emplace(r.id, std::move(r));
  }

  m.genes = ids_from_json<GeneId>(field(j, "genes", root), "$.genes");
  if (!j.contains("biomass_goal")) schema_error("$.biomass_goal", "biomass goal required");
  m.biomass_goal = ids_from_json<SpeciesId>(j["biomass_goal"], "$.biomass_goal");
  if (m.biomass_goal.empty()) schema_error("$.biomass_goal", "biomass goal required");
  m.exchange_species = ids_from_json<SpeciesId>(field(j, "exchange_species", root), "$.exchange_species");
  if (auto obj = optional_string(j, "objective", root)) m.objective = ReactionId{*obj};
  return m;
}

MetabolicModel parse_native(std::string_view document) {
  json j;
  try {
    j = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return model_from_json(j);
}

std::string render_native(const MetabolicModel& model) { return to_json(model).dump(2) + "\n"; }

}  // namespace gemreason
