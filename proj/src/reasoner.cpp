#include "gemreason/reasoner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "gemreason/errors.hpp"

namespace gemreason {

std::vector<AtomId> DerivedSet::atoms() const {
  std::vector<AtomId> out;
  out.reserve(count_);
  for (AtomId a = 0; a < derived_.size(); ++a)
    if (derived_[a]) out.push_back(a);
  return out;
}

bool DerivedSet::insert(AtomId atom, Justification why) {
  if (derived_[atom]) return false;
  derived_[atom] = 1;
  why_[atom] = why;
  ++count_;
  return true;
}

namespace {

/// Clause view over base theory followed by overlay clauses.
class ClauseSpace {
 public:
  ClauseSpace(const LogicTheory& theory, const TheoryOverlay* overlay)
      : theory_(theory), overlay_(overlay), base_count_(theory.clauses().size()) {
    if (overlay_) {
      extra_uses_.resize(overlay_->atom_count());
      const auto extra = overlay_->clauses();
      for (std::uint32_t i = 0; i < extra.size(); ++i)
        for (AtomId a : extra[i].body) extra_uses_[a].push_back(static_cast<std::uint32_t>(base_count_ + i));
    }
  }

  std::size_t atom_count() const {
    return overlay_ ? overlay_->atom_count() : theory_.atoms().size();
  }
  std::size_t size() const { return base_count_ + (overlay_ ? overlay_->clauses().size() : 0); }

  const HornClause& operator[](std::size_t i) const {
    return i < base_count_ ? theory_.clauses()[i] : overlay_->clauses()[i - base_count_];
  }

  template <typename Fn>
  void for_each_use(AtomId atom, Fn&& fn) const {
    for (auto c : theory_.clauses_using(atom)) fn(c);
    if (overlay_)
      for (auto c : extra_uses_[atom]) fn(c);
  }

  const Atom& atom(AtomId id) const { return overlay_ ? overlay_->atom(id) : theory_.atoms()[id]; }

 private:
  const LogicTheory& theory_;
  const TheoryOverlay* overlay_;
  std::size_t base_count_;
  std::vector<std::vector<std::uint32_t>> extra_uses_;
};

}  // namespace

DerivedSet saturate(const LogicTheory& theory, std::span<const HornClause> facts,
                    const TheoryOverlay* overlay) {
  const ClauseSpace space(theory, overlay);
  DerivedSet derived(space.atom_count());

  std::vector<std::uint32_t> remaining(space.size());
  std::vector<AtomId> delta;
  for (std::uint32_t i = 0; i < facts.size(); ++i) {
    if (!facts[i].body.empty()) throw std::invalid_argument("query facts must have empty bodies");
    if (derived.insert(facts[i].head, {Justification::Source::Fact, i})) delta.push_back(facts[i].head);
  }
  for (std::uint32_t c = 0; c < space.size(); ++c) {
    remaining[c] = static_cast<std::uint32_t>(space[c].body.size());
    if (remaining[c] == 0 && derived.insert(space[c].head, {Justification::Source::Clause, c}))
      delta.push_back(space[c].head);
  }

  std::vector<std::uint32_t> fired;
  while (!delta.empty()) {
    fired.clear();
    for (AtomId a : delta)
      space.for_each_use(a, [&](std::uint32_t c) {
        if (--remaining[c] == 0) fired.push_back(c);
      });
    std::sort(fired.begin(), fired.end());
    delta.clear();
    for (std::uint32_t c : fired)
      if (derived.insert(space[c].head, {Justification::Source::Clause, c})) delta.push_back(space[c].head);
  }
  return derived;
}

const char* to_string(Growth g) noexcept { return g == Growth::Growth ? "GROWTH" : "NO_GROWTH"; }

const char* to_string(Essentiality e) noexcept {
  return e == Essentiality::Essential ? "ESSENTIAL" : "NON_ESSENTIAL";
}

std::vector<Atom> goal_atoms(const MetabolicModel& model) {
  std::vector<Atom> out;
  for (const auto& sid : model.biomass_goal) {
    const Species* s = model.find_species(sid);
    if (!s) throw ValidationError("biomass goal species '" + sid.str() + "' is not declared");
    out.push_back(Atom::met(s->id, s->compartment));
  }
  return out;
}

std::vector<DerivationStep> extract_derivation(const LogicTheory& theory,
                                               std::span<const HornClause> facts,
                                               const DerivedSet& derived,
                                               std::span<const AtomId> targets,
                                               const TheoryOverlay* overlay) {
  const ClauseSpace space(theory, overlay);
  std::vector<DerivationStep> steps;
  std::vector<std::uint8_t> state(derived.atom_count(), 0);  // 0 new, 1 open, 2 done

  // Iterative post-order DFS; deep pathways would overflow a recursive walk.
  struct Frame {
    AtomId atom;
    std::size_t next;
  };
  for (AtomId target : targets) {
    if (!derived.contains(target) || state[target] == 2) continue;
    std::vector<Frame> stack{{target, 0}};
    state[target] = 1;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const Justification& why = derived.justification(f.atom);
      const std::vector<AtomId>* body = nullptr;
      if (why.source == Justification::Source::Clause) body = &space[why.index].body;
      if (body && f.next < body->size()) {
        AtomId p = (*body)[f.next++];
        if (state[p] == 0) {
          state[p] = 1;
          stack.push_back({p, 0});
        }
        continue;
      }
      DerivationStep step;
      step.atom = space.atom(f.atom);
      if (why.source == Justification::Source::Fact) {
        step.is_fact = true;
        step.tag = facts[why.index].tag;
      } else {
        step.tag = space[why.index].tag;
        for (AtomId p : *body) step.premises.push_back(space.atom(p));
        std::sort(step.premises.begin(), step.premises.end());
      }
      steps.push_back(std::move(step));
      state[f.atom] = 2;
      stack.pop_back();
    }
  }
  return steps;
}

namespace {

std::vector<AtomId> goal_ids(const MetabolicModel& model, const LogicTheory& theory,
                             const TheoryOverlay* overlay) {
  std::vector<AtomId> ids;
  for (const auto& a : goal_atoms(model)) {
    auto id = overlay ? overlay->find(a) : theory.atoms().find(a);
    if (!id) throw QueryError("goal atom " + to_string(a) + " is not part of the theory");
    ids.push_back(*id);
  }
  return ids;
}

}  // namespace

GrowthVerdict predict_growth(const LogicTheory& theory, const MetabolicModel& model,
                             const std::set<SpeciesId>& medium, const std::set<GeneId>& knockouts,
                             const TheoryOverlay* overlay) {
  const auto facts = facts_for_query(theory, model, medium, knockouts);
  const auto ids = goal_ids(model, theory, overlay);
  const DerivedSet derived = saturate(theory, facts, overlay);

  GrowthVerdict v;
  v.goal = goal_atoms(model);
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (!derived.contains(ids[i])) v.missing.push_back(v.goal[i]);
  v.verdict = v.missing.empty() ? Growth::Growth : Growth::NoGrowth;
  if (v.verdict == Growth::Growth) v.derivation = extract_derivation(theory, facts, derived, ids, overlay);
  return v;
}

Growth quick_verdict(const LogicTheory& theory, const MetabolicModel& model,
                     const std::set<SpeciesId>& medium, const std::set<GeneId>& knockouts,
                     const TheoryOverlay* overlay) {
  const auto facts = facts_for_query(theory, model, medium, knockouts);
  const auto ids = goal_ids(model, theory, overlay);
  const DerivedSet derived = saturate(theory, facts, overlay);
  bool all = std::all_of(ids.begin(), ids.end(), [&](AtomId a) { return derived.contains(a); });
  return all ? Growth::Growth : Growth::NoGrowth;
}

const GeneEssentiality* EssentialityReport::find(const GeneId& g) const {
  auto it = std::lower_bound(genes.begin(), genes.end(), g,
                             [](const GeneEssentiality& e, const GeneId& id) { return e.gene < id; });
  return it != genes.end() && it->gene == g ? &*it : nullptr;
}

EssentialityReport essentiality_screen(const LogicTheory& theory, const MetabolicModel& model,
                                       const std::set<SpeciesId>& medium,
                                       const std::optional<std::set<GeneId>>& genes, unsigned workers) {
  const auto wild_type = facts_for_query(theory, model, medium, {});
  const auto ids = goal_ids(model, theory, nullptr);
  auto grows = [&](const std::vector<HornClause>& facts, std::vector<Atom>* missing) {
    const DerivedSet d = saturate(theory, facts);
    bool ok = true;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (d.contains(ids[i])) continue;
      ok = false;
      if (missing) missing->push_back(theory.atoms()[ids[i]]);
    }
    return ok;
  };
  if (!grows(wild_type, nullptr))
    throw PreconditionError("essentiality screen undefined: wild type does not grow on this medium");

  const std::set<GeneId> selected = genes.value_or(model.genes);
  for (const auto& g : selected)
    if (!model.genes.count(g)) throw QueryError("gene '" + g.str() + "' is not declared");

  EssentialityReport report;
  report.genes.reserve(selected.size());
  for (const auto& g : selected) report.genes.push_back({g, Essentiality::NonEssential, {}, 0.0});

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < report.genes.size(); i = next++) {
      auto& entry = report.genes[i];
      const auto start = std::chrono::steady_clock::now();
      const auto gene_atom = theory.atoms().find(Atom::gene(entry.gene));
      std::vector<HornClause> facts;
      facts.reserve(wild_type.size());
      for (const auto& f : wild_type)
        if (!gene_atom || f.head != *gene_atom) facts.push_back(f);
      entry.status = grows(facts, &entry.missing) ? Essentiality::NonEssential : Essentiality::Essential;
      entry.runtime_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(report.genes.size())));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  for (const auto& e : report.genes)
    (e.status == Essentiality::Essential ? report.essential : report.non_essential)++;
  return report;
}

std::string essentiality_tsv(const EssentialityReport& report, bool timings) {
  std::ostringstream os;
  os << "gene_id\tverdict\twildtype_goal_atoms_missing\truntime_ms\n";
  for (const auto& e : report.genes) {
    os << e.gene << '\t' << to_string(e.status) << '\t';
    for (std::size_t i = 0; i < e.missing.size(); ++i) os << (i ? ";" : "") << to_string(e.missing[i]);
    os << '\t';
    if (timings) {
      os.setf(std::ios::fixed);
      os.precision(3);
      os << e.runtime_ms;
    } else {
      os << '-';
    }
    os << '\n';
  }
  return os.str();
}

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? std::numeric_limits<double>::quiet_NaN() : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double ConfusionMatrix::accuracy() const noexcept { return ratio(tp + tn, compared()); }
double ConfusionMatrix::sensitivity() const noexcept { return ratio(tp, tp + fn); }
double ConfusionMatrix::specificity() const noexcept { return ratio(tn, tn + fp); }

ConfusionMatrix compare_to_observations(const EssentialityReport& report,
                                        const std::map<GeneId, Essentiality>& observed) {
  for (const auto& [g, _] : observed)
    if (!report.find(g)) throw QueryError("observed gene '" + g.str() + "' is not in the report");
  ConfusionMatrix m;
  for (const auto& e : report.genes) {
    auto it = observed.find(e.gene);
    if (it == observed.end()) {
      ++m.uncompared;
      continue;
    }
    const bool predicted = e.status == Essentiality::Essential;
    const bool actual = it->second == Essentiality::Essential;
    if (predicted && actual) ++m.tp;
    else if (!predicted && !actual) ++m.tn;
    else if (predicted) ++m.fp;
    else ++m.fn;
  }
  return m;
}

}  // namespace gemreason
