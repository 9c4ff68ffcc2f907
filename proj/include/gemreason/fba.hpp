#pragma once

#include <set>
#include <vector>

#include "gemreason/logic.hpp"
#include "gemreason/lp.hpp"
#include "gemreason/model.hpp"

namespace gemreason {

/// Biomass flux above this counts as growth.
inline constexpr double kGrowthThreshold = 1e-6;

/// Steady-state LP: one variable per reaction (identifier order), one
/// balance row per species (identifier order), S = products - substrates.
/// Exchange uptake of species outside the medium is closed (export stays
/// open) and reactions whose GPR is false under the knockouts get [0,0].
/// Throws PreconditionError without an objective reaction, QueryError for
/// bad medium species or genes.
LinearProgram<double> build_lp(const MetabolicModel& model, const std::set<SpeciesId>& medium,
                               const std::set<GeneId>& knockouts);

FluxSolution<double> run_fba(const MetabolicModel& model, const std::set<SpeciesId>& medium,
                             const std::set<GeneId>& knockouts, const SimplexOptions& options = {});

struct LogicFbaResult {
  FluxSolution<double> solution;
  /// Reactions closed because neither direction is derivable, in id order.
  std::vector<ReactionId> pinned;
};

/// Saturates the theory (plus overlay, for an installed hypothesis) under
/// the query, pins every non-exchange reaction without a derived act atom
/// to zero flux, then solves. Spontaneous source reactions (no substrates,
/// no GPR) are never pinned. `model` must already contain the reactions a
/// hypothesis adds.
LogicFbaResult logic_constrained_fba(const MetabolicModel& model, const LogicTheory& theory,
                                     const std::set<SpeciesId>& medium, const std::set<GeneId>& knockouts,
                                     const TheoryOverlay* overlay = nullptr, const SimplexOptions& options = {});

}  // namespace gemreason
