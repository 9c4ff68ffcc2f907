// Shared fixtures, generators and brute-force oracles for the test binaries.
// The oracles deliberately avoid the library's compiler and reasoner: they
// work on model semantics (which reactions can fire) or on raw clause lists.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gemreason/abduction.hpp"
#include "gemreason/ledger.hpp"
#include "gemreason/lp.hpp"
#include "gemreason/model.hpp"
#include "gemreason/native_format.hpp"
#include "gemreason/sbml.hpp"

namespace testsupport {

using namespace gemreason;

inline std::string data_path(const std::string& name) { return std::string(GEMREASON_TEST_DATA) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline MetabolicModel load_native(const std::string& name) { return parse_native(slurp(data_path(name))); }

inline MetabolicModel load_sbml(const std::string& name, std::optional<std::set<SpeciesId>> goal = {}) {
  SbmlOptions o;
  o.biomass_goal = std::move(goal);
  return parse_sbml(slurp(data_path(name)), o).model;
}

inline std::set<SpeciesId> species_set(std::initializer_list<const char*> ids) {
  std::set<SpeciesId> out;
  for (auto* s : ids) out.insert(SpeciesId(s));
  return out;
}

inline std::set<GeneId> gene_set(std::initializer_list<const char*> ids) {
  std::set<GeneId> out;
  for (auto* g : ids) out.insert(GeneId(g));
  return out;
}

// ------------------------------------------------------------------ generators

struct RandomModelOptions {
  int exchange = 3;
  int internal_species = 10;
  int reactions = 20;
  int genes = 8;
  double p_reversible = 0.2;
  double p_spontaneous = 0.25;
  /// Probability that an exchange species also gets a boundary exchange reaction.
  double p_exchange_reaction = 0.5;
};

inline int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline GprExpr random_gpr(std::mt19937_64& rng, int genes, int depth = 2) {
  if (depth == 0 || chance(rng, 0.4)) return GprExpr::gene(GeneId("g" + std::to_string(uniform(rng, 0, genes - 1))));
  std::vector<GprExpr> kids;
  const int n = uniform(rng, 2, 3);
  for (int i = 0; i < n; ++i) kids.push_back(random_gpr(rng, genes, depth - 1));
  return chance(rng, 0.5) ? GprExpr::all_of(std::move(kids)) : GprExpr::any_of(std::move(kids));
}

/// Picks `n` distinct elements of `pool`.
template <class T>
std::vector<T> sample(std::mt19937_64& rng, std::vector<T> pool, std::size_t n) {
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min(n, pool.size()));
  return pool;
}

inline MetabolicModel random_model(std::mt19937_64& rng, const RandomModelOptions& o = {}) {
  MetabolicModel m;
  m.id = "random";
  m.version = "1";
  m.compartments[CompartmentId("c")] = {CompartmentId("c"), std::nullopt};
  m.compartments[CompartmentId("e")] = {CompartmentId("e"), std::nullopt};
  std::vector<SpeciesId> internal, external;
  for (int i = 0; i < o.exchange; ++i) {
    SpeciesId s("x" + std::to_string(i));
    m.species[s] = {s, CompartmentId("e"), std::nullopt};
    m.exchange_species.insert(s);
    external.push_back(s);
  }
  for (int i = 0; i < o.internal_species; ++i) {
    SpeciesId s("m" + std::to_string(i));
    m.species[s] = {s, CompartmentId("c"), std::nullopt};
    internal.push_back(s);
  }
  for (int i = 0; i < o.genes; ++i) m.genes.insert(GeneId("g" + std::to_string(i)));

  auto gpr = [&] { return chance(rng, o.p_spontaneous) ? GprExpr::none() : random_gpr(rng, o.genes); };
  int next = 0;
  auto add = [&](Reaction r) {
    r.id = ReactionId("r" + std::to_string(next++));
    m.reactions[r.id] = std::move(r);
  };
  for (const auto& x : external) {
    if (chance(rng, o.p_exchange_reaction)) {
      Reaction ex;
      ex.products.push_back({x, 1.0});
      ex.lower_bound = 0;
      ex.upper_bound = uniform(rng, 1, 20);
      add(ex);
    }
    Reaction t;
    t.substrates.push_back({x, 1.0});
    t.products.push_back({internal[uniform(rng, 0, static_cast<int>(internal.size()) - 1)], 1.0});
    t.gpr = gpr();
    add(t);
  }
  while (static_cast<int>(m.reactions.size()) < o.reactions) {
    auto picks = sample(rng, internal, static_cast<std::size_t>(uniform(rng, 2, 5)));
    const std::size_t ns = static_cast<std::size_t>(uniform(rng, 1, static_cast<int>(picks.size()) - 1));
    Reaction r;
    for (std::size_t i = 0; i < picks.size(); ++i)
      (i < ns ? r.substrates : r.products).push_back({picks[i], static_cast<double>(uniform(rng, 1, 3))});
    r.reversible = chance(rng, o.p_reversible);
    r.lower_bound = r.reversible ? -1000 : 0;
    r.gpr = gpr();
    add(r);
  }
  for (auto& s : sample(rng, internal, static_cast<std::size_t>(uniform(rng, 1, 2)))) m.biomass_goal.insert(s);
  return m;
}

// ------------------------------------------------------------------ semantic oracle

/// Extra knowledge a hypothesis adds, described semantically.
struct SemanticExtras {
  std::map<ReactionId, std::set<GeneId>> extra_isoenzymes;  // single-gene alternatives
  std::set<SpeciesId> sources;
  std::vector<Reaction> reactions;
};

struct SemanticState {
  std::set<SpeciesId> present;
  std::set<std::pair<std::string, int>> active;  // (reaction, 0 fwd / 1 rev)
};

/// Least fixpoint computed directly over reactions: a direction fires when
/// its inputs are present and its gene rule holds. Exchange reactions are
/// governed by the medium and never fire.
inline SemanticState semantic_fixpoint(const MetabolicModel& m, const std::set<SpeciesId>& medium,
                                       const std::set<GeneId>& ko, const SemanticExtras& extras = {}) {
  SemanticState st;
  st.present = medium;
  st.present.insert(extras.sources.begin(), extras.sources.end());
  auto present_gene = [&](const GeneId& g) { return !ko.count(g); };
  std::vector<const Reaction*> rs;
  for (const auto& [_, r] : m.reactions)
    if (!m.is_exchange_reaction(r)) rs.push_back(&r);
  for (const auto& r : extras.reactions) rs.push_back(&r);

  auto enabled = [&](const Reaction& r) {
    if (r.gpr.is_spontaneous()) return true;
    if (r.gpr.evaluate(present_gene)) return true;
    auto it = extras.extra_isoenzymes.find(r.id);
    if (it == extras.extra_isoenzymes.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(), present_gene);
  };
  auto all_present = [&](const std::vector<StoichTerm>& side) {
    return std::all_of(side.begin(), side.end(), [&](const StoichTerm& t) { return st.present.count(t.species) > 0; });
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Reaction* r : rs) {
      if (!enabled(*r)) continue;
      for (int d = 0; d < (r->reversible ? 2 : 1); ++d) {
        const auto& in = d == 0 ? r->substrates : r->products;
        const auto& out = d == 0 ? r->products : r->substrates;
        if (!all_present(in)) continue;
        changed |= st.active.insert({r->id.str(), d}).second;
        for (const auto& t : out) changed |= st.present.insert(t.species).second;
      }
    }
  }
  return st;
}

inline bool semantic_growth(const MetabolicModel& m, const std::set<SpeciesId>& medium, const std::set<GeneId>& ko,
                            const SemanticExtras& extras = {}) {
  const auto st = semantic_fixpoint(m, medium, ko, extras);
  return std::all_of(m.biomass_goal.begin(), m.biomass_goal.end(),
                     [&](const SpeciesId& s) { return st.present.count(s) > 0; });
}

inline SemanticExtras extras_for(std::span<const Abducible> hypothesis) {
  SemanticExtras x;
  for (const auto& a : hypothesis) {
    if (auto* gf = std::get_if<GeneFunction>(&a)) x.extra_isoenzymes[gf->reaction].insert(gf->gene);
    if (auto* ms = std::get_if<MetaboliteSource>(&a)) x.sources.insert(ms->species);
    if (auto* re = std::get_if<ReactionExists>(&a)) x.reactions.push_back(re->reaction);
  }
  return x;
}

// ------------------------------------------------------------------ clause-level naive oracle

/// Iterates every clause until nothing changes.
inline std::set<AtomId> naive_fixpoint(const std::vector<HornClause>& clauses, const std::vector<HornClause>& facts) {
  std::set<AtomId> derived;
  for (const auto& f : facts) derived.insert(f.head);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& c : clauses) {
      if (derived.count(c.head)) continue;
      if (std::all_of(c.body.begin(), c.body.end(), [&](AtomId a) { return derived.count(a) > 0; })) {
        derived.insert(c.head);
        changed = true;
      }
    }
  }
  return derived;
}

// ------------------------------------------------------------------ brute-force abduction

/// Every subset-minimal set of at most `max_card` pool elements that makes
/// the case grow, by exhaustive enumeration. Pool entries asserting a goal
/// species directly are left out, matching the documented pool rule.
inline std::vector<std::vector<std::string>> brute_force_minimal(const MetabolicModel& m,
                                                                 const std::set<SpeciesId>& medium,
                                                                 const std::set<GeneId>& ko,
                                                                 std::vector<Abducible> pool, std::size_t max_card) {
  std::erase_if(pool, [&](const Abducible& a) {
    auto* ms = std::get_if<MetaboliteSource>(&a);
    return ms && m.biomass_goal.count(ms->species);
  });
  const std::size_t n = pool.size();
  std::vector<char> works(std::size_t{1} << n, 0);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) > max_card) continue;
    std::vector<Abducible> h;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) h.push_back(pool[i]);
    works[mask] = semantic_growth(m, medium, ko, extras_for(h));
  }
  std::vector<std::vector<std::string>> out;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (!works[mask]) continue;
    bool minimal = true;
    for (std::uint32_t sub = (mask - 1) & mask; sub; sub = (sub - 1) & mask)
      if (works[sub]) {
        minimal = false;
        break;
      }
    if (!minimal) continue;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) labels.push_back(label(pool[i]));
    std::sort(labels.begin(), labels.end());
    out.push_back(labels);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::vector<std::string>> label_sets(const std::vector<Hypothesis>& hs) {
  std::vector<std::vector<std::string>> out;
  for (const auto& h : hs) {
    std::vector<std::string> labels;
    for (const auto& a : h.abducibles) labels.push_back(label(a));
    std::sort(labels.begin(), labels.end());
    out.push_back(labels);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ------------------------------------------------------------------ scenarios

struct Scenario {
  MetabolicModel model;
  std::set<SpeciesId> medium;
  std::set<GeneId> knockouts;
  std::vector<Abducible> pool;  // full candidate list
};

/// Random model with a few reactions moved out into a reference pool, such
/// that the reduced model no longer grows on the full medium.
inline std::optional<Scenario> random_scenario(std::mt19937_64& rng) {
  RandomModelOptions o;
  o.reactions = uniform(rng, 8, 16);
  o.genes = 6;
  MetabolicModel full = random_model(rng, o);
  Scenario s;
  s.medium = {full.exchange_species.begin(), full.exchange_species.end()};
  if (!semantic_growth(full, s.medium, {})) return std::nullopt;
  s.model = full;
  AbductionPolicy p;
  p.gene_function = p.metabolite_source = p.reaction_exists = true;
  std::vector<ReactionId> ids;
  for (const auto& [id, r] : full.reactions)
    if (!full.is_exchange_reaction(r)) ids.push_back(id);
  for (const auto& id : sample(rng, ids, static_cast<std::size_t>(uniform(rng, 1, 3)))) {
    p.reaction_pool.push_back(full.reactions.at(id));
    s.model.reactions.erase(id);
  }
  if (chance(rng, 0.3)) s.knockouts.insert(GeneId("g" + std::to_string(uniform(rng, 0, 5))));
  if (semantic_growth(s.model, s.medium, s.knockouts)) return std::nullopt;
  s.pool = enumerate_abducibles(s.model, p);
  return s;
}

/// Random edit of a model: species, reactions, bounds, rules, genes.
inline MetabolicModel mutate(std::mt19937_64& rng, MetabolicModel m) {
  const int edits = uniform(rng, 1, 6);
  for (int e = 0; e < edits; ++e) {
    std::vector<ReactionId> ids;
    for (const auto& [id, _] : m.reactions) ids.push_back(id);
    switch (uniform(rng, 0, 5)) {
      case 0: {
        SpeciesId s("n" + std::to_string(e) + "_" + std::to_string(uniform(rng, 0, 999)));
        m.species[s] = {s, CompartmentId("c"), std::nullopt};
        break;
      }
      case 1: {
        Reaction r = m.reactions.at(ids[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(ids.size()) - 1))]);
        r.id = ReactionId("copy" + std::to_string(uniform(rng, 0, 9999)));
        m.reactions[r.id] = r;
        break;
      }
      case 2:
        if (ids.size() > 1) m.reactions.erase(ids[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(ids.size()) - 1))]);
        break;
      case 3: {
        auto& r = m.reactions.at(ids[0]);
        r.upper_bound = uniform(rng, 1, 500);
        break;
      }
      case 4: {
        auto& r = m.reactions.at(ids.back());
        r.gpr = random_gpr(rng, RandomModelOptions{}.genes);
        break;
      }
      default:
        m.genes.insert(GeneId("gx" + std::to_string(uniform(rng, 0, 99))));
    }
  }
  return m;
}

struct SimulatedHistory {
  MetabolicModel base;
  MetabolicModel target;  // built directly from the intended edits, not by applying changesets
  Ledger ledger;
};

/// `n` single-item revisions on TOY-5: add, re-bound or remove extra
/// reactions, or add genes.
inline SimulatedHistory simulate_revisions(std::mt19937_64& rng, int n) {
  SimulatedHistory h;
  h.base = load_native("toy5.json");
  MetabolicModel state = h.base;  // what record_revision needs as parent state
  std::map<ReactionId, Reaction> mirror = h.base.reactions;
  std::set<GeneId> genes = h.base.genes;
  std::vector<ReactionId> added;
  int next = 0;
  for (int i = 0; i < n; ++i) {
    Changeset c;
    const int op = added.empty() ? 0 : uniform(rng, 0, 3);
    if (op == 0) {
      const char* species[] = {"A", "B", "C", "BIOMASS"};
      Reaction r;
      r.id = ReactionId("sim" + std::to_string(next++));
      r.substrates.push_back({SpeciesId(species[uniform(rng, 0, 1)]), 1.0});
      r.products.push_back({SpeciesId(species[uniform(rng, 2, 3)]), 1.0});
      r.gpr = GprExpr::gene(GeneId("g" + std::to_string(uniform(rng, 1, 4))));
      r.upper_bound = uniform(rng, 1, 1000);
      c.push_back(add_reaction(r));
      mirror[r.id] = r;
      added.push_back(r.id);
    } else if (op == 1) {
      const ReactionId id = added[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(added.size()) - 1))];
      const double hi = mirror.at(id).upper_bound + 1;
      c.push_back(modify_bounds(state.reactions.at(id), 0, hi));
      mirror.at(id).upper_bound = hi;
    } else if (op == 2) {
      const std::size_t k = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(added.size()) - 1));
      c.push_back(remove_reaction(state.reactions.at(added[k])));
      mirror.erase(added[k]);
      added.erase(added.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
      const GeneId g("new" + std::to_string(i));
      c.push_back({ChangeVerb::Add, EntityKind::Gene, g.str(), std::nullopt, nlohmann::json(g.str())});
      genes.insert(g);
    }
    record_revision(h.ledger, state, std::nullopt, c, RevisionReason::Simulated, "", "sim", "2024-01-01T00:00:00Z",
                    std::to_string(i + 1));
    state = apply_changeset(state, c);
  }
  h.target = h.base;
  h.target.reactions = mirror;
  h.target.genes = genes;
  h.target.version = std::to_string(n);
  return h;
}

// ------------------------------------------------------------------ LP oracle

/// Small dense LP with finite bounds; feasible by construction unless
/// `force_random_rhs`.
inline LinearProgram<double> random_lp(std::mt19937_64& rng, bool force_random_rhs = false) {
  for (;;) {
    const int n = uniform(rng, 2, 6);
    const int m = uniform(rng, 1, n - 1);
    Eigen::MatrixXd a(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = chance(rng, 0.3) ? 0.0 : uniform(rng, -5, 5);
    if (Eigen::FullPivLU<Eigen::MatrixXd>(a).rank() != m) continue;
    LinearProgram<double> lp;
    lp.lower.resize(n);
    lp.upper.resize(n);
    lp.objective.resize(n);
    Eigen::VectorXd x0(n);
    for (int j = 0; j < n; ++j) {
      lp.lower[j] = uniform(rng, -10, 0);
      lp.upper[j] = lp.lower[j] + uniform(rng, 0, 15);
      x0[j] = std::uniform_real_distribution<double>(lp.lower[j], lp.upper[j])(rng);
      lp.objective[j] = uniform(rng, -4, 4);
      lp.variable_names.push_back("x" + std::to_string(j));
    }
    for (int i = 0; i < m; ++i) lp.row_names.push_back("c" + std::to_string(i));
    if (force_random_rhs) {
      lp.rhs = Eigen::VectorXd(m);
      for (int i = 0; i < m; ++i) lp.rhs[i] = uniform(rng, -40, 40);
    } else {
      lp.rhs = a * x0;
    }
    lp.constraints = a.sparseView();
    return lp;
  }
}

struct VertexOptimum {
  bool feasible = false;
  double objective = -std::numeric_limits<double>::infinity();
};

/// Enumerates every basic solution: choose m basic columns, put the others at
/// either bound, solve for the basics, keep the feasible ones. Needs finite
/// bounds and full row rank.
inline VertexOptimum vertex_enumeration(const LinearProgram<double>& lp, double tol = 1e-9) {
  const Eigen::MatrixXd a = Eigen::MatrixXd(lp.constraints);
  const int m = static_cast<int>(a.rows()), n = static_cast<int>(a.cols());
  VertexOptimum best;
  for (std::uint32_t basis = 0; basis < (1u << n); ++basis) {
    if (std::popcount(basis) != m) continue;
    std::vector<int> b, nb;
    for (int j = 0; j < n; ++j) (basis >> j & 1u ? b : nb).push_back(j);
    Eigen::MatrixXd bm(m, m);
    for (int k = 0; k < m; ++k) bm.col(k) = a.col(b[k]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(bm);
    if (lu.rank() < m) continue;
    for (std::uint32_t at_upper = 0; at_upper < (1u << nb.size()); ++at_upper) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      for (std::size_t k = 0; k < nb.size(); ++k) x[nb[k]] = (at_upper >> k & 1u) ? lp.upper[nb[k]] : lp.lower[nb[k]];
      const Eigen::VectorXd xb = lu.solve(lp.rhs - a * x);
      bool ok = true;
      for (int k = 0; k < m; ++k) {
        x[b[k]] = xb[k];
        ok = ok && xb[k] >= lp.lower[b[k]] - tol && xb[k] <= lp.upper[b[k]] + tol;
      }
      if (!ok) continue;
      best.feasible = true;
      best.objective = std::max(best.objective, lp.objective.dot(x));
    }
  }
  return best;
}

}  // namespace testsupport
