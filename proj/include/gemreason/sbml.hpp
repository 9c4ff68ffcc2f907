#pragma once

#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "gemreason/model.hpp"

namespace gemreason {

struct SbmlOptions {
  /// Replaces the goal derived from the FBC objective.
  std::optional<std::set<SpeciesId>> biomass_goal;
  /// Compartment whose species form the exchange set. When unset, the
  /// compartment with id "e" or a name containing "extracellular" is used.
  std::optional<CompartmentId> extracellular;
};

struct SbmlDocument {
  MetabolicModel model;
  /// INFO entries for ignored constructs followed by validate() output.
  std::vector<Diagnostic> diagnostics;
};

/// Reads the SBML Level 3 core + FBC subset: compartments, species,
/// reactions with reactant/product references, flux-bound parameters,
/// gene products and associations, and the active objective.
/// Dangling references and unsupported required packages throw ParseError.
SbmlDocument parse_sbml(std::string_view document, const SbmlOptions& options = {});

}  // namespace gemreason
