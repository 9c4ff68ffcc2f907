#include "gemreason/logic.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "gemreason/errors.hpp"

namespace gemreason {

std::string to_string(const Atom& atom) {
  switch (atom.kind) {
    case AtomKind::Met:
      return "met(" + atom.name + "," + atom.qualifier + ")";
    case AtomKind::Enz:
      return "enz(" + atom.name + ")";
    case AtomKind::Iso:
      return "iso(" + atom.name + "," + std::to_string(atom.index) + ")";
    case AtomKind::Gene:
      return "gn(" + atom.name + ")";
    case AtomKind::Act:
      return "act(" + atom.name + (atom.direction == Direction::Forward ? ",fwd)" : ",rev)");
  }
  return "?";
}

std::ostream& operator<<(std::ostream& os, const Atom& atom) { return os << to_string(atom); }

AtomId AtomTable::intern(const Atom& atom) {
  auto [it, inserted] = ids_.emplace(atom, static_cast<AtomId>(atoms_.size()));
  if (inserted) atoms_.push_back(atom);
  return it->second;
}

std::optional<AtomId> AtomTable::find(const Atom& atom) const {
  auto it = ids_.find(atom);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const char* to_string(ClauseTag tag) noexcept {
  switch (tag) {
    case ClauseTag::Activation:
      return "ACTIVATION";
    case ClauseTag::Enzyme:
      return "ENZYME";
    case ClauseTag::Isoenzyme:
      return "ISOENZYME";
    case ClauseTag::Product:
      return "PRODUCT";
    case ClauseTag::Medium:
      return "MEDIUM";
    case ClauseTag::Genotype:
      return "GENOTYPE";
    case ClauseTag::Hypothesis:
      return "HYPOTHESIS";
  }
  return "?";
}

namespace {

void normalise(ClauseSpec& spec) {
  std::sort(spec.body.begin(), spec.body.end());
  spec.body.erase(std::unique(spec.body.begin(), spec.body.end()), spec.body.end());
}

bool canonical_less(const ClauseSpec& a, const ClauseSpec& b) {
  if (a.tag != b.tag) return a.tag < b.tag;
  if (a.head != b.head) return a.head < b.head;
  return a.body < b.body;
}

bool same_clause(const ClauseSpec& a, const ClauseSpec& b) {
  return a.tag == b.tag && a.head == b.head && a.body == b.body;
}

}  // namespace

LogicTheory::LogicTheory(AtomTable atoms, std::vector<ClauseSpec> specs,
                         std::vector<std::optional<ReactionId>> sources)
    : atoms_(std::move(atoms)) {
  sources.resize(specs.size());
  for (auto& s : specs) {
    normalise(s);
    if (std::find(s.body.begin(), s.body.end(), s.head) != s.body.end())
      throw std::invalid_argument("clause head " + to_string(s.head) + " occurs in its own body");
  }

  std::vector<std::size_t> order(specs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return canonical_less(specs[a], specs[b]); });

  for (std::size_t k = 0; k < order.size(); ++k) {
    const ClauseSpec& s = specs[order[k]];
    if (k > 0 && same_clause(specs[order[k - 1]], s)) continue;
    HornClause c;
    c.tag = s.tag;
    c.head = atoms_.intern(s.head);
    for (const auto& b : s.body) c.body.push_back(atoms_.intern(b));
    std::sort(c.body.begin(), c.body.end());
    clauses_.push_back(std::move(c));
    sources_.push_back(sources[order[k]]);
  }

  use_offsets_.assign(atoms_.size() + 1, 0);
  for (const auto& c : clauses_)
    for (AtomId a : c.body) ++use_offsets_[a + 1];
  std::partial_sum(use_offsets_.begin(), use_offsets_.end(), use_offsets_.begin());
  use_clauses_.resize(use_offsets_.back());
  std::vector<std::uint32_t> cursor(use_offsets_.begin(), use_offsets_.end() - 1);
  for (std::uint32_t ci = 0; ci < clauses_.size(); ++ci)
    for (AtomId a : clauses_[ci].body) use_clauses_[cursor[a]++] = ci;
}

std::span<const std::uint32_t> LogicTheory::clauses_using(AtomId atom) const {
  if (atom + 1 >= use_offsets_.size()) return {};
  return std::span<const std::uint32_t>(use_clauses_).subspan(
      use_offsets_[atom], use_offsets_[atom + 1] - use_offsets_[atom]);
}

void emit_reaction_clauses(const MetabolicModel& model, const Reaction& reaction,
                           const CompileOptions& options,
                           const std::function<void(ClauseSpec)>& emit) {
  const GeneDnf dnf = gpr_to_dnf(reaction.gpr, options.dnf_cap);
  auto met = [&](const StoichTerm& t) {
    const Species* s = model.find_species(t.species);
    if (!s) throw ValidationError("reaction " + reaction.id.str() + " references undeclared species " + t.species.str());
    return Atom::met(s->id, s->compartment);
  };

  const Atom enz = Atom::enz(reaction.id);
  auto direction = [&](Direction d, const std::vector<StoichTerm>& inputs,
                       const std::vector<StoichTerm>& outputs) {
    const Atom act = Atom::act(reaction.id, d);
    ClauseSpec activation{ClauseTag::Activation, act, {}};
    for (const auto& t : inputs) activation.body.push_back(met(t));
    if (!dnf.spontaneous) activation.body.push_back(enz);
    emit(std::move(activation));
    for (const auto& t : outputs) emit({ClauseTag::Product, met(t), {act}});
  };

  direction(Direction::Forward, reaction.substrates, reaction.products);
  if (reaction.reversible) direction(Direction::Reverse, reaction.products, reaction.substrates);

  for (std::uint32_t i = 0; i < dnf.terms.size(); ++i) {
    const Atom iso = Atom::iso(reaction.id, i);
    emit({ClauseTag::Enzyme, enz, {iso}});
    ClauseSpec complex{ClauseTag::Isoenzyme, iso, {}};
    for (const auto& g : dnf.terms[i]) complex.body.push_back(Atom::gene(g));
    emit(std::move(complex));
  }
}

LogicTheory compile(const MetabolicModel& model, const CompileOptions& options) {
  std::vector<ClauseSpec> specs;
  std::vector<std::optional<ReactionId>> sources;
  for (const auto& [id, r] : model.reactions) {
    if (model.is_exchange_reaction(r)) continue;
    emit_reaction_clauses(model, r, options, [&](ClauseSpec s) {
      specs.push_back(std::move(s));
      sources.push_back(id);
    });
  }

  // Intern in structural order so that integer order matches atom order.
  std::set<Atom> universe;
  for (const auto& [_, s] : model.species) universe.insert(Atom::met(s.id, s.compartment));
  for (const auto& g : model.genes) universe.insert(Atom::gene(g));
  for (const auto& s : specs) {
    universe.insert(s.head);
    universe.insert(s.body.begin(), s.body.end());
  }
  AtomTable table;
  for (const auto& a : universe) table.intern(a);
  return LogicTheory(std::move(table), std::move(specs), std::move(sources));
}

std::vector<HornClause> facts_for_query(const LogicTheory& theory, const MetabolicModel& model,
                                        const std::set<SpeciesId>& medium,
                                        const std::set<GeneId>& knockouts) {
  std::vector<HornClause> facts;
  for (const auto& sid : medium) {
    const Species* s = model.find_species(sid);
    if (!s) throw QueryError("medium species '" + sid.str() + "' is not declared");
    if (!model.exchange_species.count(sid))
      throw QueryError("medium species '" + sid.str() + "' is not an exchange species");
    auto atom = theory.atoms().find(Atom::met(s->id, s->compartment));
    if (!atom) throw QueryError("theory was not compiled from this model (missing " + sid.str() + ")");
    facts.push_back({*atom, {}, ClauseTag::Medium});
  }
  for (const auto& g : knockouts)
    if (!model.genes.count(g)) throw QueryError("knocked-out gene '" + g.str() + "' is not declared");
  for (const auto& g : model.genes) {
    if (knockouts.count(g)) continue;
    auto atom = theory.atoms().find(Atom::gene(g));
    if (!atom) throw QueryError("theory was not compiled from this model (missing gene " + g.str() + ")");
    facts.push_back({*atom, {}, ClauseTag::Genotype});
  }
  return facts;
}

TheoryStats theory_stats(const LogicTheory& theory) {
  TheoryStats stats;
  for (const auto& c : theory.clauses()) ++stats.clauses[static_cast<std::size_t>(c.tag)];
  stats.atoms = theory.atoms().size();
  return stats;
}

std::string to_string(const TheoryStats& stats) {
  std::ostringstream os;
  os << "ACT=" << stats.count(ClauseTag::Activation) << " ENZ=" << stats.count(ClauseTag::Enzyme)
     << " ISO=" << stats.count(ClauseTag::Isoenzyme) << " PROD=" << stats.count(ClauseTag::Product);
  return os.str();
}

void write_clauses(std::ostream& os, const LogicTheory& theory) {
  std::optional<ClauseTag> section;
  for (const auto& c : theory.clauses()) {
    if (section != c.tag) {
      os << "% " << to_string(c.tag) << '\n';
      section = c.tag;
    }
    os << to_string(theory.atoms()[c.head]) << " <- ";
    if (c.body.empty()) os << "true";
    std::vector<Atom> body;
    for (AtomId b : c.body) body.push_back(theory.atoms()[b]);
    std::sort(body.begin(), body.end());
    for (std::size_t i = 0; i < body.size(); ++i) os << (i ? ", " : "") << to_string(body[i]);
    os << '\n';
  }
}

AtomId TheoryOverlay::intern(const Atom& atom) {
  if (auto id = base_->atoms().find(atom)) return *id;
  return static_cast<AtomId>(base_->atoms().size()) + local_.intern(atom);
}

std::optional<AtomId> TheoryOverlay::find(const Atom& atom) const {
  if (auto id = base_->atoms().find(atom)) return id;
  if (auto id = local_.find(atom)) return static_cast<AtomId>(base_->atoms().size()) + *id;
  return std::nullopt;
}

const Atom& TheoryOverlay::atom(AtomId id) const {
  const auto base_size = base_->atoms().size();
  return id < base_size ? base_->atoms()[id] : local_[static_cast<AtomId>(id - base_size)];
}

void TheoryOverlay::add(const ClauseSpec& spec) {
  ClauseSpec s = spec;
  normalise(s);
  HornClause c;
  c.tag = s.tag;
  c.head = intern(s.head);
  for (const auto& b : s.body) c.body.push_back(intern(b));
  std::sort(c.body.begin(), c.body.end());
  if (std::find(c.body.begin(), c.body.end(), c.head) != c.body.end())
    throw std::invalid_argument("clause head " + to_string(s.head) + " occurs in its own body");
  if (std::find(clauses_.begin(), clauses_.end(), c) != clauses_.end()) return;
  clauses_.push_back(std::move(c));
  specs_.push_back(std::move(s));
}

LogicTheory TheoryOverlay::materialize() const {
  std::vector<ClauseSpec> specs;
  std::vector<std::optional<ReactionId>> sources;
  const auto& atoms = base_->atoms();
  for (std::size_t i = 0; i < base_->clauses().size(); ++i) {
    const auto& c = base_->clauses()[i];
    ClauseSpec s{c.tag, atoms[c.head], {}};
    for (AtomId b : c.body) s.body.push_back(atoms[b]);
    specs.push_back(std::move(s));
    sources.push_back(base_->source(i));
  }
  for (const auto& s : specs_) {
    specs.push_back(s);
    sources.emplace_back();
  }
  return LogicTheory(atoms, std::move(specs), std::move(sources));
}

}  // namespace gemreason
