#include "gemreason/fba.hpp"

#include <algorithm>
#include <map>

#include "gemreason/errors.hpp"
#include "gemreason/reasoner.hpp"

namespace gemreason {

LinearProgram<double> build_lp(const MetabolicModel& model, const std::set<SpeciesId>& medium,
                               const std::set<GeneId>& knockouts) {
  if (!model.objective) throw PreconditionError("model has no objective reaction");
  if (!model.find_reaction(*model.objective))
    throw PreconditionError("objective reaction '" + model.objective->str() + "' is not declared");
  for (const auto& s : medium) {
    if (!model.find_species(s)) throw QueryError("medium species '" + s.str() + "' is not declared");
    if (!model.exchange_species.count(s))
      throw QueryError("medium species '" + s.str() + "' is not an exchange species");
  }
  for (const auto& g : knockouts)
    if (!model.genes.count(g)) throw QueryError("knocked-out gene '" + g.str() + "' is not declared");

  LinearProgram<double> lp;
  std::map<SpeciesId, Eigen::Index> row;
  for (const auto& [id, _] : model.species) {
    row.emplace(id, static_cast<Eigen::Index>(lp.row_names.size()));
    lp.row_names.push_back(id.str());
  }
  const auto n = static_cast<Eigen::Index>(model.reactions.size());
  const auto m = static_cast<Eigen::Index>(lp.row_names.size());
  lp.lower.resize(n);
  lp.upper.resize(n);
  lp.objective = Eigen::VectorXd::Zero(n);
  lp.rhs = Eigen::VectorXd::Zero(m);

  auto present = [&](const GeneId& g) { return knockouts.count(g) == 0; };
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::Index j = 0;
  for (const auto& [id, r] : model.reactions) {
    lp.variable_names.push_back(id.str());
    for (const auto& t : r.substrates) triplets.emplace_back(row.at(t.species), j, -t.coefficient);
    for (const auto& t : r.products) triplets.emplace_back(row.at(t.species), j, t.coefficient);

    double lo = r.lower_bound, hi = r.upper_bound;
    if (model.is_exchange_reaction(r)) {
      const bool uptake_forward = r.substrates.empty();
      const auto& side = uptake_forward ? r.products : r.substrates;
      const bool available = std::all_of(side.begin(), side.end(),
                                         [&](const StoichTerm& t) { return medium.count(t.species) > 0; });
      if (!available) {
        if (uptake_forward) {
          hi = std::min(hi, 0.0);
          lo = std::min(lo, hi);
        } else {
          lo = std::max(lo, 0.0);
          hi = std::max(hi, lo);
        }
      }
    }
    if (!r.gpr.evaluate(present)) lo = hi = 0.0;
    lp.lower[j] = lo;
    lp.upper[j] = hi;
    if (id == *model.objective) lp.objective[j] = 1.0;
    ++j;
  }
  lp.constraints.resize(m, n);
  lp.constraints.setFromTriplets(triplets.begin(), triplets.end());
  return lp;
}

FluxSolution<double> run_fba(const MetabolicModel& model, const std::set<SpeciesId>& medium,
                             const std::set<GeneId>& knockouts, const SimplexOptions& options) {
  return solve_lp(build_lp(model, medium, knockouts), options);
}

LogicFbaResult logic_constrained_fba(const MetabolicModel& model, const LogicTheory& theory,
                                     const std::set<SpeciesId>& medium, const std::set<GeneId>& knockouts,
                                     const TheoryOverlay* overlay, const SimplexOptions& options) {
  LinearProgram<double> lp = build_lp(model, medium, knockouts);
  auto find = [&](const Atom& a) { return overlay ? overlay->find(a) : theory.atoms().find(a); };

  // Same facts as facts_for_query, but genes a hypothesis brings in resolve
  // through the overlay; atoms no clause mentions are irrelevant and skipped.
  std::vector<HornClause> facts;
  for (const auto& sid : medium)
    if (auto a = find(Atom::met(sid, model.find_species(sid)->compartment)))
      facts.push_back({*a, {}, ClauseTag::Medium});
  for (const auto& g : model.genes)
    if (!knockouts.count(g))
      if (auto a = find(Atom::gene(g))) facts.push_back({*a, {}, ClauseTag::Genotype});
  const DerivedSet derived = saturate(theory, facts, overlay);

  auto holds = [&](const Atom& a) {
    auto id = find(a);
    return id && derived.contains(*id);
  };

  LogicFbaResult out;
  Eigen::Index j = 0;
  for (const auto& [id, r] : model.reactions) {
    // Spontaneous sources have an empty activation body: always active.
    const bool exempt = model.is_exchange_reaction(r) || (r.substrates.empty() && r.gpr.is_spontaneous());
    if (!exempt && !holds(Atom::act(id, Direction::Forward)) &&
        !(r.reversible && holds(Atom::act(id, Direction::Reverse)))) {
      lp.lower[j] = lp.upper[j] = 0.0;
      out.pinned.push_back(id);
    }
    ++j;
  }
  out.solution = solve_lp(lp, options);
  return out;
}

}  // namespace gemreason
