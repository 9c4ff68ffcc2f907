#include "gemreason/abduction.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>

#include <json.hpp>

#include "gemreason/errors.hpp"
#include "gemreason/fba.hpp"
#include "gemreason/native_format.hpp"

namespace gemreason {

namespace {

template <class... F>
struct overloaded : F... {
  using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

}  // namespace

std::string label(const Abducible& a) {
  return std::visit(overloaded{
                        [](const GeneFunction& g) {
                          return "gene_function(" + g.gene.str() + "," + g.reaction.str() + ")";
                        },
                        [](const MetaboliteSource& m) {
                          return "met(" + m.species.str() + "," + m.compartment.str() + ")";
                        },
                        [](const ReactionExists& r) { return "reaction_exists(" + r.reaction.id.str() + ")"; },
                    },
                    a);
}

bool abducible_less(const Abducible& a, const Abducible& b) {
  if (a.index() != b.index()) return a.index() < b.index();
  return label(a) < label(b);
}

ReactionId source_reaction_id(const SpeciesId& species) { return ReactionId("src_" + species.str()); }

std::vector<Abducible> enumerate_abducibles(const MetabolicModel& model, const AbductionPolicy& policy) {
  if (!policy.gene_function && !policy.metabolite_source && !policy.reaction_exists)
    throw PreconditionError("abduction policy enables no abducible kind");

  std::vector<Abducible> out;
  if (policy.gene_function) {
    const std::set<GeneId>& genes = policy.genes ? *policy.genes : model.genes;
    for (const auto& g : genes)
      if (!model.genes.count(g)) throw QueryError("policy gene '" + g.str() + "' is not declared");
    for (const auto& [id, r] : model.reactions) {
      if (policy.reactions && !policy.reactions->count(id)) continue;
      if (r.gpr.is_spontaneous() || model.is_exchange_reaction(r)) continue;
      // A gene already named by the rule cannot add a new function.
      const std::set<GeneId> existing = r.gpr.genes();
      for (const auto& g : genes)
        if (!existing.count(g)) out.push_back(GeneFunction{g, id});
    }
    if (policy.reactions)
      for (const auto& id : *policy.reactions)
        if (!model.find_reaction(id)) throw QueryError("policy reaction '" + id.str() + "' is not declared");
  }
  if (policy.metabolite_source) {
    for (const auto& [id, s] : model.species) {
      if (policy.species && !policy.species->count(id)) continue;
      if (model.exchange_species.count(id)) continue;
      out.push_back(MetaboliteSource{id, s.compartment});
    }
    if (policy.species)
      for (const auto& id : *policy.species)
        if (!model.find_species(id)) throw QueryError("policy species '" + id.str() + "' is not declared");
  }
  if (policy.reaction_exists) {
    for (const auto& r : policy.reaction_pool) {
      if (model.find_reaction(r.id)) continue;
      bool resolves = true;
      for (const auto* side : {&r.substrates, &r.products})
        for (const auto& t : *side) resolves = resolves && model.find_species(t.species) != nullptr;
      if (resolves) out.push_back(ReactionExists{r});
    }
  }
  std::sort(out.begin(), out.end(), abducible_less);
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Abducible& a, const Abducible& b) { return label(a) == label(b); }),
            out.end());
  return out;
}

namespace {

const Reaction* hypothesis_reaction(const MetabolicModel& model, std::span<const Abducible> hypothesis,
                                    const ReactionId& id) {
  if (const Reaction* r = model.find_reaction(id)) return r;
  for (const auto& a : hypothesis)
    if (const auto* re = std::get_if<ReactionExists>(&a); re && re->reaction.id == id) return &re->reaction;
  return nullptr;
}

}  // namespace

void install(TheoryOverlay& overlay, const MetabolicModel& model, std::span<const Abducible> hypothesis) {
  std::map<ReactionId, std::uint32_t> next_iso;
  for (const auto& a : hypothesis) {
    if (const auto* re = std::get_if<ReactionExists>(&a)) {
      emit_reaction_clauses(model, re->reaction, {}, [&](ClauseSpec s) {
        s.tag = ClauseTag::Hypothesis;
        overlay.add(s);
      });
      // Genes new to the model are present by assumption.
      for (const auto& g : re->reaction.gpr.genes())
        if (!model.genes.count(g)) overlay.add({ClauseTag::Hypothesis, Atom::gene(g), {}});
    } else if (const auto* ms = std::get_if<MetaboliteSource>(&a)) {
      overlay.add({ClauseTag::Hypothesis, Atom::met(ms->species, ms->compartment), {}});
    }
  }
  for (const auto& a : hypothesis) {
    const auto* gf = std::get_if<GeneFunction>(&a);
    if (!gf) continue;
    const Reaction* r = hypothesis_reaction(model, hypothesis, gf->reaction);
    if (!r) throw QueryError("gene_function target '" + gf->reaction.str() + "' is not declared");
    if (r->gpr.is_spontaneous())
      throw QueryError("gene_function target '" + gf->reaction.str() + "' is spontaneous");
    auto [it, fresh] = next_iso.try_emplace(gf->reaction, 0);
    if (fresh) it->second = static_cast<std::uint32_t>(gpr_to_dnf(r->gpr).terms.size());
    const Atom iso = Atom::iso(gf->reaction, it->second++);
    overlay.add({ClauseTag::Hypothesis, iso, {Atom::gene(gf->gene)}});
    overlay.add({ClauseTag::Hypothesis, Atom::enz(gf->reaction), {iso}});
  }
}

Changeset hypothesis_changeset(const MetabolicModel& model, std::span<const Abducible> hypothesis) {
  Changeset genes, reactions, gprs, sources;
  std::set<GeneId> added_genes;
  for (const auto& a : hypothesis) {
    if (const auto* re = std::get_if<ReactionExists>(&a)) {
      for (const auto& g : re->reaction.gpr.genes())
        if (!model.genes.count(g) && added_genes.insert(g).second)
          genes.push_back({ChangeVerb::Add, EntityKind::Gene, g.str(), std::nullopt, nlohmann::json(g.str())});
      reactions.push_back(add_reaction(re->reaction));
    } else if (const auto* gf = std::get_if<GeneFunction>(&a)) {
      gprs.push_back(add_gpr_disjunct(gf->reaction, GprExpr::gene(gf->gene)));
    } else {
      const auto& ms = std::get<MetaboliteSource>(a);
      Reaction src;
      src.id = source_reaction_id(ms.species);
      src.products.push_back({ms.species, 1.0});
      src.lower_bound = 0.0;
      src.upper_bound = kDefaultFluxBound;
      sources.push_back(add_reaction(src));
    }
  }
  Changeset out;
  for (auto* part : {&genes, &reactions, &gprs, &sources}) out.insert(out.end(), part->begin(), part->end());
  return out;
}

ObservationSet::ObservationSet(std::vector<Observation> observations) {
  std::map<std::pair<std::set<SpeciesId>, std::set<GeneId>>, Growth> seen;
  for (auto& o : observations) {
    auto [it, fresh] = seen.try_emplace({o.medium, o.knockouts}, o.observed);
    if (!fresh) {
      if (it->second != o.observed) throw QueryError("conflicting observations for the same medium and knockouts");
      continue;
    }
    items_.push_back(std::move(o));
  }
}

const char* to_string(Stage2Status s) noexcept {
  switch (s) {
    case Stage2Status::Pending:
      return "PENDING";
    case Stage2Status::Consistent:
      return "CONSISTENT";
    case Stage2Status::Inconsistent:
      return "INCONSISTENT";
    case Stage2Status::FbaRejected:
      return "FBA_REJECTED";
    case Stage2Status::Accepted:
      return "ACCEPTED";
  }
  return "?";
}

namespace {

bool goal_reached(const LogicTheory& theory, const MetabolicModel& model, std::span<const HornClause> facts,
                  std::span<const Abducible> hypothesis, const std::vector<Atom>& goal) {
  TheoryOverlay overlay(theory);
  install(overlay, model, hypothesis);
  const DerivedSet derived = saturate(theory, facts, &overlay);
  return std::all_of(goal.begin(), goal.end(), [&](const Atom& a) {
    auto id = overlay.find(a);
    return id && derived.contains(*id);
  });
}

bool is_superset_of_any(const std::vector<std::size_t>& combo, const std::vector<std::vector<std::size_t>>& found) {
  return std::any_of(found.begin(), found.end(), [&](const std::vector<std::size_t>& s) {
    return std::includes(combo.begin(), combo.end(), s.begin(), s.end());
  });
}

/// Advances `c` to the next k-combination of {0..n-1} in lexicographic order.
bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t k = c.size();
  for (std::size_t i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<Hypothesis> abduce(const LogicTheory& theory, const MetabolicModel& model, const FailingCase& failing,
                               std::vector<Abducible> abducibles, std::size_t max_cardinality, unsigned workers) {
  if (quick_verdict(theory, model, failing.medium, failing.knockouts) == Growth::Growth)
    throw PreconditionError("failing case already grows; nothing to repair");
  const auto facts = facts_for_query(theory, model, failing.medium, failing.knockouts);
  const std::vector<Atom> goal = goal_atoms(model);

  // A source asserting a goal atom satisfies it trivially and says nothing.
  std::erase_if(abducibles, [&](const Abducible& a) {
    const auto* ms = std::get_if<MetaboliteSource>(&a);
    return ms && std::find(goal.begin(), goal.end(), Atom::met(ms->species, ms->compartment)) != goal.end();
  });
  std::sort(abducibles.begin(), abducibles.end(), abducible_less);
  abducibles.erase(std::unique(abducibles.begin(), abducibles.end(),
                               [](const Abducible& a, const Abducible& b) { return label(a) == label(b); }),
                   abducibles.end());

  const std::size_t n = abducibles.size();
  workers = std::max(1u, workers);
  std::vector<std::vector<std::size_t>> found;
  constexpr std::size_t kBatch = 4096;

  for (std::size_t k = 1; k <= std::min(max_cardinality, n); ++k) {
    std::vector<std::size_t> combo(k);
    for (std::size_t i = 0; i < k; ++i) combo[i] = i;
    bool more = true;
    while (more) {
      std::vector<std::vector<std::size_t>> batch;
      while (more && batch.size() < kBatch) {
        if (!is_superset_of_any(combo, found)) batch.push_back(combo);
        more = next_combination(combo, n);
      }
      std::vector<std::uint8_t> ok(batch.size(), 0);
      auto evaluate = [&](std::size_t i) {
        std::vector<Abducible> h;
        for (std::size_t idx : batch[i]) h.push_back(abducibles[idx]);
        ok[i] = goal_reached(theory, model, facts, h, goal) ? 1 : 0;
      };
      if (workers == 1 || batch.size() < 2) {
        for (std::size_t i = 0; i < batch.size(); ++i) evaluate(i);
      } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < std::min<std::size_t>(workers, batch.size()); ++w)
          pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < batch.size();) evaluate(i);
          });
      }
      for (std::size_t i = 0; i < batch.size(); ++i)
        if (ok[i]) found.push_back(batch[i]);
    }
  }

  std::vector<Hypothesis> out;
  for (const auto& combo : found) {
    Hypothesis h;
    for (std::size_t idx : combo) h.abducibles.push_back(abducibles[idx]);
    h.stage1 = true;
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<Hypothesis> filter_hypotheses(std::vector<Hypothesis> hypotheses, const LogicTheory& theory,
                                          const MetabolicModel& model, const ObservationSet& observations,
                                          const std::optional<FbaFilterOptions>& fba) {
  std::vector<Growth> baseline;
  for (const auto& o : observations.items())
    baseline.push_back(quick_verdict(theory, model, o.medium, o.knockouts));

  for (auto& h : hypotheses) {
    if (!h.stage1) continue;
    h.deltas.clear();
    h.fba_objectives.clear();
    TheoryOverlay overlay(theory);
    install(overlay, model, h.abducibles);

    bool broke = false;
    for (std::size_t i = 0; i < observations.size(); ++i) {
      const auto& o = observations.items()[i];
      const Growth after = quick_verdict(theory, model, o.medium, o.knockouts, &overlay);
      if (after != baseline[i]) h.deltas.push_back({i, o.observed, baseline[i], after});
      if (baseline[i] == o.observed && after != o.observed) broke = true;
    }
    if (broke) {
      h.stage2 = Stage2Status::Inconsistent;
      continue;
    }
    h.stage2 = Stage2Status::Consistent;
    if (fba) {
      const MetabolicModel revised = apply_changeset(model, hypothesis_changeset(model, h.abducibles));
      bool rejected = false;
      for (const auto& o : observations.items()) {
        if (o.observed != Growth::Growth) continue;
        const LogicFbaResult r = logic_constrained_fba(revised, theory, o.medium, o.knockouts, &overlay);
        const double obj = r.solution.status == SolveStatus::Optimal ? r.solution.objective_value : 0.0;
        h.fba_objectives.push_back(obj);
        if (obj <= fba->growth_threshold) rejected = true;
      }
      if (rejected) {
        h.stage2 = Stage2Status::FbaRejected;
        continue;
      }
    }
    h.stage2 = Stage2Status::Accepted;
  }
  return hypotheses;
}

std::string hypothesis_report(const std::vector<Hypothesis>& hypotheses) {
  std::string out;
  for (const auto& h : hypotheses) {
    nlohmann::json j;
    j["abducibles"] = nlohmann::json::array();
    for (const auto& a : h.abducibles) j["abducibles"].push_back(label(a));
    j["cardinality"] = h.cardinality();
    j["stage1"] = h.stage1;
    j["stage2"] = to_string(h.stage2);
    j["deltas"] = nlohmann::json::array();
    for (const auto& d : h.deltas)
      j["deltas"].push_back({{"observation", d.observation},
                             {"observed", to_string(d.observed)},
                             {"before", to_string(d.before)},
                             {"after", to_string(d.after)}});
    if (!h.fba_objectives.empty()) j["fba_objectives"] = h.fba_objectives;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace gemreason
