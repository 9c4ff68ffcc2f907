#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gemreason/model.hpp"

namespace gemreason {

enum class AtomKind : std::uint8_t { Met, Enz, Iso, Gene, Act };
enum class Direction : std::uint8_t { Forward, Reverse };

/// Ground atom of the presence/activation vocabulary:
///   met(species, compartment)  metabolite present
///   enz(reaction)              some isoenzyme of the reaction is present
///   iso(reaction, i)           isoenzyme i is formed
///   gn(gene)                   gene product is present
///   act(reaction, dir)         reaction is active in one direction
struct Atom {
  AtomKind kind = AtomKind::Met;
  std::string name;       // species, reaction or gene id
  std::string qualifier;  // compartment id for met, empty otherwise
  std::uint32_t index = 0;
  Direction direction = Direction::Forward;

  static Atom met(const SpeciesId& s, const CompartmentId& c) {
    return {AtomKind::Met, s.str(), c.str(), 0, Direction::Forward};
  }
  static Atom enz(const ReactionId& r) { return {AtomKind::Enz, r.str(), {}, 0, Direction::Forward}; }
  static Atom iso(const ReactionId& r, std::uint32_t i) {
    return {AtomKind::Iso, r.str(), {}, i, Direction::Forward};
  }
  static Atom gene(const GeneId& g) { return {AtomKind::Gene, g.str(), {}, 0, Direction::Forward}; }
  static Atom act(const ReactionId& r, Direction d) { return {AtomKind::Act, r.str(), {}, 0, d}; }

  friend auto operator<=>(const Atom&, const Atom&) = default;
  friend bool operator==(const Atom&, const Atom&) = default;
};

/// `met(s0340,c)`, `enz(r0889)`, `iso(r0889,1)`, `gn(YGR240C)`, `act(r0889,fwd)`.
std::string to_string(const Atom& atom);
std::ostream& operator<<(std::ostream& os, const Atom& atom);

using AtomId = std::uint32_t;

/// Interns atoms to dense integers.
class AtomTable {
 public:
  AtomId intern(const Atom& atom);
  std::optional<AtomId> find(const Atom& atom) const;
  const Atom& operator[](AtomId id) const { return atoms_[id]; }
  std::size_t size() const noexcept { return atoms_.size(); }

 private:
  std::vector<Atom> atoms_;
  std::map<Atom, AtomId> ids_;
};

enum class ClauseTag : std::uint8_t {
  Activation,
  Enzyme,
  Isoenzyme,
  Product,
  Medium,
  Genotype,
  Hypothesis,
};
inline constexpr std::size_t kClauseTagCount = 7;

const char* to_string(ClauseTag tag) noexcept;

/// Definite clause `head <- body`; an empty body is a fact. Body ids are sorted.
struct HornClause {
  AtomId head = 0;
  std::vector<AtomId> body;
  ClauseTag tag = ClauseTag::Activation;

  friend bool operator==(const HornClause&, const HornClause&) = default;
};

/// Structural (un-interned) clause, used while building theories.
struct ClauseSpec {
  ClauseTag tag;
  Atom head;
  std::vector<Atom> body;
};

/// Immutable ground Horn theory in canonical order (tag, head atom, body atoms).
class LogicTheory {
 public:
  LogicTheory() = default;
  LogicTheory(AtomTable atoms, std::vector<ClauseSpec> specs,
              std::vector<std::optional<ReactionId>> sources);

  const AtomTable& atoms() const noexcept { return atoms_; }
  std::span<const HornClause> clauses() const noexcept { return clauses_; }
  /// Reaction a clause was emitted for; empty for facts and hypotheses.
  const std::optional<ReactionId>& source(std::size_t clause) const { return sources_[clause]; }
  /// Indices of clauses whose body contains `atom`.
  std::span<const std::uint32_t> clauses_using(AtomId atom) const;

  friend bool operator==(const LogicTheory& a, const LogicTheory& b) { return a.clauses_ == b.clauses_ && a.sources_ == b.sources_; }

 private:
  AtomTable atoms_;
  std::vector<HornClause> clauses_;
  std::vector<std::optional<ReactionId>> sources_;
  std::vector<std::uint32_t> use_offsets_;
  std::vector<std::uint32_t> use_clauses_;
};

struct CompileOptions {
  std::size_t dnf_cap = kDefaultDnfCap;
};

/// Emits the clause block of one reaction: activation per direction, one
/// enzyme clause per isoenzyme, one isoenzyme clause per DNF term and one
/// product clause per output of each direction. Spontaneous reactions skip
/// the enzyme layer. Duplicates (the shared enzyme layer of reversible
/// reactions) are emitted once.
void emit_reaction_clauses(const MetabolicModel& model, const Reaction& reaction,
                           const CompileOptions& options,
                           const std::function<void(ClauseSpec)>& emit);

/// Compiles every reaction except exchange reactions, whose uptake is set by
/// the medium. All species and gene atoms are interned even when unused.
LogicTheory compile(const MetabolicModel& model, const CompileOptions& options = {});

/// MEDIUM facts met(s, compartment) and GENOTYPE facts gn(g) for every gene
/// not knocked out. Throws QueryError for non-exchange medium species or
/// unknown genes.
std::vector<HornClause> facts_for_query(const LogicTheory& theory, const MetabolicModel& model,
                                        const std::set<SpeciesId>& medium,
                                        const std::set<GeneId>& knockouts);

struct TheoryStats {
  std::array<std::size_t, kClauseTagCount> clauses{};
  std::size_t atoms = 0;

  std::size_t count(ClauseTag tag) const { return clauses[static_cast<std::size_t>(tag)]; }
  friend bool operator==(const TheoryStats&, const TheoryStats&) = default;
};

TheoryStats theory_stats(const LogicTheory& theory);
/// `ACT=4 ENZ=4 ISO=4 PROD=4`
std::string to_string(const TheoryStats& stats);

/// One clause per line, `head <- a1, a2` (`head <- true` for facts), grouped
/// under `% TAG` comment lines.
void write_clauses(std::ostream& os, const LogicTheory& theory);

/// Clauses layered over a shared theory without copying it. Atoms unknown to
/// the base receive ids after the base table.
class TheoryOverlay {
 public:
  explicit TheoryOverlay(const LogicTheory& base) : base_(&base) {}

  const LogicTheory& base() const noexcept { return *base_; }
  AtomId intern(const Atom& atom);
  std::optional<AtomId> find(const Atom& atom) const;
  const Atom& atom(AtomId id) const;
  std::size_t atom_count() const noexcept { return base_->atoms().size() + local_.size(); }

  void add(const ClauseSpec& spec);
  std::span<const HornClause> clauses() const noexcept { return clauses_; }
  bool empty() const noexcept { return clauses_.empty(); }

  /// Standalone theory containing base and overlay clauses.
  LogicTheory materialize() const;

 private:
  const LogicTheory* base_;
  AtomTable local_;
  std::vector<HornClause> clauses_;
  std::vector<ClauseSpec> specs_;
};

}  // namespace gemreason
