#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gemreason/logic.hpp"

namespace gemreason {

/// Why an atom holds: a query fact or a clause (base clauses first, then
/// overlay clauses, numbered consecutively).
struct Justification {
  enum class Source : std::uint8_t { None, Fact, Clause };
  Source source = Source::None;
  std::uint32_t index = 0;
};

/// Least model of theory + facts, with the first derivation of every atom.
class DerivedSet {
 public:
  DerivedSet() = default;
  explicit DerivedSet(std::size_t atom_count) : derived_(atom_count, 0), why_(atom_count) {}

  bool contains(AtomId atom) const { return atom < derived_.size() && derived_[atom] != 0; }
  const Justification& justification(AtomId atom) const { return why_[atom]; }
  std::size_t atom_count() const noexcept { return derived_.size(); }
  std::size_t size() const noexcept { return count_; }
  /// Derived atom ids in increasing order.
  std::vector<AtomId> atoms() const;

  /// Returns false if the atom was already derived.
  bool insert(AtomId atom, Justification why);

 private:
  std::vector<std::uint8_t> derived_;
  std::vector<Justification> why_;
  std::size_t count_ = 0;
};

/// Semi-naive forward chaining: each round only clauses that gained a newly
/// derived body atom are examined. Clauses completing in the same round fire
/// in canonical order, so justifications are deterministic.
DerivedSet saturate(const LogicTheory& theory, std::span<const HornClause> facts,
                    const TheoryOverlay* overlay = nullptr);

enum class Growth : std::uint8_t { NoGrowth, Growth };
const char* to_string(Growth g) noexcept;

/// One node of a derivation DAG; premises appear earlier in the list.
struct DerivationStep {
  Atom atom;
  bool is_fact = false;
  ClauseTag tag = ClauseTag::Medium;
  std::vector<Atom> premises;
};

struct GrowthVerdict {
  Growth verdict = Growth::NoGrowth;
  std::vector<Atom> goal;
  std::vector<Atom> missing;
  /// Dependency-ordered derivation of every goal atom (GROWTH only).
  std::vector<DerivationStep> derivation;
};

/// Goal atoms met(s, compartment(s)) for the model's biomass goal.
std::vector<Atom> goal_atoms(const MetabolicModel& model);

/// Extracts the derivation DAG of `targets` from the justifications.
std::vector<DerivationStep> extract_derivation(const LogicTheory& theory,
                                               std::span<const HornClause> facts,
                                               const DerivedSet& derived,
                                               std::span<const AtomId> targets,
                                               const TheoryOverlay* overlay = nullptr);

GrowthVerdict predict_growth(const LogicTheory& theory, const MetabolicModel& model,
                             const std::set<SpeciesId>& medium, const std::set<GeneId>& knockouts,
                             const TheoryOverlay* overlay = nullptr);

/// Growth verdict only, without evidence.
Growth quick_verdict(const LogicTheory& theory, const MetabolicModel& model,
                     const std::set<SpeciesId>& medium, const std::set<GeneId>& knockouts,
                     const TheoryOverlay* overlay = nullptr);

enum class Essentiality : std::uint8_t { NonEssential, Essential };
const char* to_string(Essentiality e) noexcept;

struct GeneEssentiality {
  GeneId gene;
  Essentiality status = Essentiality::NonEssential;
  std::vector<Atom> missing;
  double runtime_ms = 0.0;
};

struct EssentialityReport {
  std::vector<GeneEssentiality> genes;  // ordered by gene id
  std::size_t essential = 0;
  std::size_t non_essential = 0;

  const GeneEssentiality* find(const GeneId& g) const;
};

/// Single-knockout screen under one medium. Reuses the compiled theory and
/// only swaps genotype facts. Throws PreconditionError if the wild type does
/// not grow. `workers` threads share the theory read-only.
EssentialityReport essentiality_screen(const LogicTheory& theory, const MetabolicModel& model,
                                       const std::set<SpeciesId>& medium,
                                       const std::optional<std::set<GeneId>>& genes = std::nullopt,
                                       unsigned workers = 1);

/// Writes gene_id, verdict, wildtype_goal_atoms_missing, runtime_ms. Runtimes
/// are printed only when `timings` is set ("-" otherwise) so that output is
/// reproducible byte for byte.
std::string essentiality_tsv(const EssentialityReport& report, bool timings = false);

/// Positive class is ESSENTIAL.
struct ConfusionMatrix {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  /// Report genes without an observation.
  std::size_t uncompared = 0;

  std::size_t compared() const noexcept { return tp + tn + fp + fn; }
  /// NaN when the denominator is zero.
  double accuracy() const noexcept;
  double sensitivity() const noexcept;
  double specificity() const noexcept;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix compare_to_observations(const EssentialityReport& report,
                                        const std::map<GeneId, Essentiality>& observed);

}  // namespace gemreason
