#include "gemreason/model.hpp"

#include <algorithm>
#include <cmath>

namespace gemreason {

const Compartment* MetabolicModel::find_compartment(const CompartmentId& cid) const {
  auto it = compartments.find(cid);
  return it == compartments.end() ? nullptr : &it->second;
}

const Species* MetabolicModel::find_species(const SpeciesId& sid) const {
  auto it = species.find(sid);
  return it == species.end() ? nullptr : &it->second;
}

const Reaction* MetabolicModel::find_reaction(const ReactionId& rid) const {
  auto it = reactions.find(rid);
  return it == reactions.end() ? nullptr : &it->second;
}

bool MetabolicModel::is_exchange_reaction(const Reaction& r) const {
  if (!r.is_boundary()) return false;
  const auto& side = r.substrates.empty() ? r.products : r.substrates;
  return std::all_of(side.begin(), side.end(),
                     [&](const StoichTerm& t) { return exchange_species.count(t.species) > 0; });
}

const char* to_string(Severity s) noexcept {
  switch (s) {
    case Severity::Info:
      return "INFO";
    case Severity::Warning:
      return "WARNING";
    case Severity::Error:
      return "ERROR";
  }
  return "?";
}

namespace {

class Validator {
 public:
  explicit Validator(const MetabolicModel& m) : m_(m) {}

  std::vector<Diagnostic> run() {
    check_compartments();
    for (const auto& [key, s] : m_.species) check_species(key, s);
    for (const auto& [key, r] : m_.reactions) check_reaction(key, r);
    for (const auto& g : m_.genes)
      if (g.empty()) error("", "empty gene identifier");
    check_goal();
    check_exchange();
    if (m_.objective && !m_.find_reaction(*m_.objective))
      error(m_.objective->str(), "objective reaction is not declared");
    return std::move(out_);
  }

 private:
  void error(const std::string& entity, std::string msg) {
    out_.push_back({Severity::Error, entity, std::move(msg)});
  }

  void check_compartments() {
    if (m_.compartments.empty()) error(m_.id, "model declares no compartment");
    for (const auto& [key, c] : m_.compartments) {
      if (c.id.empty()) error("", "empty compartment identifier");
      if (key != c.id) error(c.id.str(), "compartment stored under a different key");
    }
  }

  void check_species(const SpeciesId& key, const Species& s) {
    if (s.id.empty()) error("", "empty species identifier");
    if (key != s.id) error(s.id.str(), "species stored under a different key");
    if (!m_.find_compartment(s.compartment))
      error(s.id.str(), "compartment '" + s.compartment.str() + "' is not declared");
  }

  void check_side(const Reaction& r, const std::vector<StoichTerm>& side, const char* role) {
    std::set<SpeciesId> seen;
    for (const auto& t : side) {
      if (!m_.find_species(t.species))
        error(r.id.str(), std::string(role) + " '" + t.species.str() + "' is not declared");
      if (!(t.coefficient > 0.0) || !std::isfinite(t.coefficient))
        error(r.id.str(), std::string(role) + " '" + t.species.str() +
                              "' has a non-positive stoichiometric coefficient");
      if (!seen.insert(t.species).second)
        error(r.id.str(), std::string(role) + " '" + t.species.str() + "' listed twice");
    }
  }

  void check_reaction(const ReactionId& key, const Reaction& r) {
    if (r.id.empty()) error("", "empty reaction identifier");
    if (key != r.id) error(r.id.str(), "reaction stored under a different key");
    check_side(r, r.substrates, "substrate");
    check_side(r, r.products, "product");
    for (const auto& s : r.substrates) {
      bool both = std::any_of(r.products.begin(), r.products.end(),
                              [&](const StoichTerm& p) { return p.species == s.species; });
      if (both) error(r.id.str(), "species '" + s.species.str() + "' is both substrate and product");
    }
    if (std::isnan(r.lower_bound) || std::isnan(r.upper_bound))
      error(r.id.str(), "flux bound is NaN");
    else if (r.lower_bound > r.upper_bound)
      error(r.id.str(), "lower flux bound exceeds upper flux bound");
    if (!r.reversible && r.lower_bound < 0.0)
      error(r.id.str(), "irreversible reaction has a negative lower flux bound");
    check_gpr(r);
  }

  void check_gpr(const Reaction& r) {
    if (r.gpr.nested_none_count() > 0)
      error(r.id.str(), "spontaneous marker appears below a GPR operator");
    check_gpr_node(r, r.gpr);
    for (const auto& g : r.gpr.genes())
      if (!m_.genes.count(g)) error(r.id.str(), "GPR gene '" + g.str() + "' is not declared");
  }

  void check_gpr_node(const Reaction& r, const GprExpr& e) {
    bool op = e.kind() == GprExpr::Kind::And || e.kind() == GprExpr::Kind::Or;
    if (op && e.children().empty()) error(r.id.str(), "GPR operator without operands");
    for (const auto& c : e.children()) check_gpr_node(r, c);
  }

  void check_goal() {
    if (m_.biomass_goal.empty()) error(m_.id, "biomass goal required");
    for (const auto& s : m_.biomass_goal)
      if (!m_.find_species(s)) error(s.str(), "biomass goal species is not declared");
  }

  void check_exchange() {
    for (const auto& s : m_.exchange_species)
      if (!m_.find_species(s)) error(s.str(), "exchange species is not declared");
  }

  const MetabolicModel& m_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate(const MetabolicModel& model) { return Validator(model).run(); }

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace gemreason
