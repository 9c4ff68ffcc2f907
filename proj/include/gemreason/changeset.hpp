#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gemreason/errors.hpp"
#include "gemreason/model.hpp"

namespace gemreason {

enum class ChangeVerb { Add, Remove, Modify };

/// Entity kinds in application order.
enum class EntityKind {
  Compartment,
  Species,
  Gene,
  Reaction,
  Gpr,
  Bounds,
  BiomassGoal,
  ExchangeSpecies,
  Objective,
};

const char* to_string(ChangeVerb v) noexcept;
const char* to_string(EntityKind k) noexcept;
ChangeVerb change_verb_from_string(const std::string& s);
EntityKind entity_kind_from_string(const std::string& s);

/// One edit. Payloads are native-format JSON fragments:
///   COMPARTMENT/SPECIES/REACTION  entity object
///   GENE, EXCHANGE_SPECIES         identifier string (ADD/REMOVE only)
///   GPR                            GPR text; ADD ors a disjunct in, REMOVE
///                                  takes one top-level disjunct out, MODIFY
///                                  replaces the whole rule
///   BOUNDS                         [lower, upper] (MODIFY only)
///   BIOMASS_GOAL                   sorted species array (MODIFY only)
///   OBJECTIVE                      reaction id or null (MODIFY only)
struct ChangeItem {
  ChangeVerb verb = ChangeVerb::Add;
  EntityKind kind = EntityKind::Reaction;
  std::string entity;
  std::optional<nlohmann::json> before;
  std::optional<nlohmann::json> after;

  friend bool operator==(const ChangeItem&, const ChangeItem&) = default;
};

using Changeset = std::vector<ChangeItem>;

nlohmann::json to_json(const ChangeItem& item);
ChangeItem change_item_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json to_json(const Changeset& changes);
Changeset changeset_from_json(const nlohmann::json& j, const std::string& path);

/// Thrown when an item does not apply cleanly; `index` is the failing item
/// (equal to the changeset size when only the final validation fails).
class ChangesetError : public LedgerError {
 public:
  ChangesetError(std::size_t index, const std::string& message)
      : LedgerError("change " + std::to_string(index) + ": " + message), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Applies items in order to a copy of `model`. The result must validate
/// without errors; otherwise nothing is returned (ChangesetError).
MetabolicModel apply_changeset(const MetabolicModel& model, const Changeset& changes);

/// Minimal changeset with apply_changeset(a, diff(a, b)) == b, ignoring the
/// model id and version. Items are ordered by kind, then entity id.
Changeset diff(const MetabolicModel& a, const MetabolicModel& b);

// Single-item constructors.
ChangeItem add_reaction(const Reaction& r);
ChangeItem remove_reaction(const Reaction& r);
ChangeItem add_gpr_disjunct(const ReactionId& r, const GprExpr& disjunct);
ChangeItem modify_bounds(const Reaction& r, double lower, double upper);

}  // namespace gemreason
