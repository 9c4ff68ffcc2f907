#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "gemreason/changeset.hpp"
#include "gemreason/logic.hpp"
#include "gemreason/reasoner.hpp"

namespace gemreason {

/// Gene `gene` alone forms a new isoenzyme of `reaction`.
struct GeneFunction {
  GeneId gene;
  ReactionId reaction;
  friend bool operator==(const GeneFunction&, const GeneFunction&) = default;
};

/// Species is available unconditionally.
struct MetaboliteSource {
  SpeciesId species;
  CompartmentId compartment;
  friend bool operator==(const MetaboliteSource&, const MetaboliteSource&) = default;
};

/// A reaction absent from the model exists, with its whole clause block.
struct ReactionExists {
  Reaction reaction;
  friend bool operator==(const ReactionExists&, const ReactionExists&) = default;
};

using Abducible = std::variant<GeneFunction, MetaboliteSource, ReactionExists>;

/// `gene_function(g5,r2)`, `met(C,c)`, `reaction_exists(r2)`.
std::string label(const Abducible& a);
/// Kind first, then label.
bool abducible_less(const Abducible& a, const Abducible& b);

/// Identifier of the source reaction that realises a MetaboliteSource in a model.
ReactionId source_reaction_id(const SpeciesId& species);

struct AbductionPolicy {
  bool gene_function = false;
  bool metabolite_source = false;
  bool reaction_exists = false;
  /// Genes considered for GENE_FUNCTION; all model genes when unset.
  std::optional<std::set<GeneId>> genes;
  /// Target reactions for GENE_FUNCTION; all enzymatic, compiled reactions when unset.
  std::optional<std::set<ReactionId>> reactions;
  /// Species for METABOLITE_SOURCE; all non-exchange species when unset.
  std::optional<std::set<SpeciesId>> species;
  /// Candidate reactions for REACTION_EXISTS, e.g. from a reference network.
  std::vector<Reaction> reaction_pool;
};

/// Deterministic, deduplicated candidate list. Throws PreconditionError when
/// the policy enables no kind.
std::vector<Abducible> enumerate_abducibles(const MetabolicModel& model, const AbductionPolicy& policy);

/// Adds the clauses of a hypothesis to an overlay of the model's theory.
void install(TheoryOverlay& overlay, const MetabolicModel& model, std::span<const Abducible> hypothesis);

/// Model edits that realise a hypothesis: GPR disjunct additions, new
/// reactions, and spontaneous source reactions for metabolite sources.
Changeset hypothesis_changeset(const MetabolicModel& model, std::span<const Abducible> hypothesis);

struct Observation {
  std::set<SpeciesId> medium;
  std::set<GeneId> knockouts;
  Growth observed = Growth::Growth;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Rejects duplicate (medium, knockouts) keys with conflicting labels.
class ObservationSet {
 public:
  ObservationSet() = default;
  explicit ObservationSet(std::vector<Observation> observations);

  const std::vector<Observation>& items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }

 private:
  std::vector<Observation> items_;
};

enum class Stage2Status {
  Pending,
  /// Passed the consistency check; FBA check not yet run.
  Consistent,
  Inconsistent,
  FbaRejected,
  Accepted,
};
const char* to_string(Stage2Status s) noexcept;

struct VerdictDelta {
  std::size_t observation = 0;
  Growth observed = Growth::Growth;
  Growth before = Growth::NoGrowth;
  Growth after = Growth::NoGrowth;
};

struct Hypothesis {
  std::vector<Abducible> abducibles;  // canonical order
  bool stage1 = false;
  Stage2Status stage2 = Stage2Status::Pending;
  /// Observations whose predicted verdict changes under the hypothesis.
  std::vector<VerdictDelta> deltas;
  /// Logic-constrained biomass flux per GROWTH observation, when FBA ran.
  std::vector<double> fba_objectives;

  std::size_t cardinality() const noexcept { return abducibles.size(); }
};

struct FailingCase {
  std::set<SpeciesId> medium;
  std::set<GeneId> knockouts;
};

/// Stage 1: every subset-minimal set of at most `max_cardinality`
/// abducibles that restores growth, by iterative deepening on cardinality.
/// Abducibles that would assert a goal atom outright are not used.
/// Throws PreconditionError when the case already grows.
std::vector<Hypothesis> abduce(const LogicTheory& theory, const MetabolicModel& model,
                               const FailingCase& failing, std::vector<Abducible> abducibles,
                               std::size_t max_cardinality = 2, unsigned workers = 1);

struct FbaFilterOptions {
  /// Biomass flux at or below this counts as no growth.
  double growth_threshold = 1e-6;
};

/// Stage 2: INCONSISTENT if the hypothesis breaks a correct prediction;
/// otherwise FBA_REJECTED if FBA is requested and some GROWTH observation
/// has no biomass flux under logic-constrained FBA; otherwise ACCEPTED.
std::vector<Hypothesis> filter_hypotheses(std::vector<Hypothesis> hypotheses, const LogicTheory& theory,
                                          const MetabolicModel& model, const ObservationSet& observations,
                                          const std::optional<FbaFilterOptions>& fba = std::nullopt);

/// One JSON object per line: abducibles, cardinality, stage1, stage2, deltas.
std::string hypothesis_report(const std::vector<Hypothesis>& hypotheses);

}  // namespace gemreason
