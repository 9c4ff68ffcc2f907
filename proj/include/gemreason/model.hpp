#pragma once

#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gemreason/gpr.hpp"
#include "gemreason/ids.hpp"

namespace gemreason {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
/// Flux bound used when a document does not state one.
inline constexpr double kDefaultFluxBound = 1000.0;

struct Compartment {
  CompartmentId id;
  std::optional<std::string> name;

  friend bool operator==(const Compartment&, const Compartment&) = default;
};

struct Species {
  SpeciesId id;
  CompartmentId compartment;
  std::optional<std::string> name;

  friend bool operator==(const Species&, const Species&) = default;
};

struct StoichTerm {
  SpeciesId species;
  double coefficient = 1.0;

  friend bool operator==(const StoichTerm&, const StoichTerm&) = default;
};

struct Reaction {
  ReactionId id;
  std::vector<StoichTerm> substrates;
  std::vector<StoichTerm> products;
  bool reversible = false;
  GprExpr gpr;
  double lower_bound = 0.0;
  double upper_bound = kDefaultFluxBound;

  /// One side empty: the reaction crosses the model boundary.
  bool is_boundary() const noexcept { return substrates.empty() != products.empty(); }

  friend bool operator==(const Reaction&, const Reaction&) = default;
};

struct MetabolicModel {
  std::string id;
  std::string version;
  std::map<CompartmentId, Compartment> compartments;
  std::map<SpeciesId, Species> species;
  std::map<ReactionId, Reaction> reactions;
  std::set<GeneId> genes;
  /// Species whose joint presence defines growth.
  std::set<SpeciesId> biomass_goal;
  /// Species in the extracellular compartment that a medium may supply.
  std::set<SpeciesId> exchange_species;
  /// Reaction maximised by flux-balance analysis.
  std::optional<ReactionId> objective;

  const Compartment* find_compartment(const CompartmentId& id) const;
  const Species* find_species(const SpeciesId& id) const;
  const Reaction* find_reaction(const ReactionId& id) const;

  /// Boundary reaction whose only participants are exchange species; its
  /// uptake is governed by the medium rather than by the logic theory.
  bool is_exchange_reaction(const Reaction& r) const;

  friend bool operator==(const MetabolicModel&, const MetabolicModel&) = default;
};

enum class Severity { Info, Warning, Error };

const char* to_string(Severity s) noexcept;

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string entity;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Checks every structural invariant of the model. Empty result means valid.
std::vector<Diagnostic> validate(const MetabolicModel& model);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace gemreason
