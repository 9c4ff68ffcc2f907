#include "gemreason/sbml.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>

#include "gemreason/errors.hpp"
#include "gemreason/xml.hpp"

namespace gemreason {

namespace {

using xml::Element;

bool is_fbc_uri(const std::string& uri) { return uri.find("/fbc/") != std::string::npos; }

bool is_fbc(const Element& e) { return is_fbc_uri(e.namespace_uri()); }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

class SbmlReader {
 public:
  SbmlReader(const Element& root, const SbmlOptions& options) : root_(root), options_(options) {}

  SbmlDocument run() {
    if (root_.local_name() != "sbml") fail(root_, "root element must be <sbml>");
    const std::string* level = root_.attribute("level");
    if (!level || *level != "3") fail(root_, "only SBML Level 3 is supported");
    check_required_packages();

    const Element* model_el = nullptr;
    for (const auto& child : root_.children) {
      if (child->local_name() == "model" && !model_el) model_el = child.get();
      else info(*child, "element ignored");
    }
    if (!model_el) fail(root_, "document has no <model>");
    read_model(*model_el);

    auto diags = validate(doc_.model);
    doc_.diagnostics.insert(doc_.diagnostics.end(), diags.begin(), diags.end());
    return std::move(doc_);
  }

 private:
  [[noreturn]] static void fail(const Element& e, const std::string& what) {
    throw ParseError(what, e.line, e.name);
  }

  void info(const Element& e, const std::string& what) {
    doc_.diagnostics.push_back(
        {Severity::Info, e.name, what + " (line " + std::to_string(e.line) + ")"});
  }

  void check_required_packages() {
    for (const auto& [qname, value] : root_.attributes) {
      auto colon = qname.find(':');
      if (colon == std::string::npos || qname.substr(colon + 1) != "required") continue;
      const std::string uri = root_.resolve_prefix(std::string_view(qname).substr(0, colon));
      if (value == "true" && !is_fbc_uri(uri))
        fail(root_, "required SBML package '" + qname.substr(0, colon) + "' is not supported");
    }
  }

  static const std::string& required(const Element& e, const std::string& attr) {
    const std::string* v = e.attribute(attr);
    if (!v || v->empty()) fail(e, "missing required attribute '" + attr + "'");
    return *v;
  }

  /// Attribute in the FBC namespace, e.g. fbc:id, whatever the prefix.
  static const std::string* fbc_attribute(const Element& e, std::string_view local) {
    for (const auto& [qname, value] : e.attributes) {
      auto colon = qname.find(':');
      if (colon == std::string::npos) continue;
      if (std::string_view(qname).substr(colon + 1) != local) continue;
      if (is_fbc_uri(e.resolve_prefix(std::string_view(qname).substr(0, colon)))) return &value;
    }
    return nullptr;
  }

  static const std::string& required_fbc(const Element& e, std::string_view local) {
    const std::string* v = fbc_attribute(e, local);
    if (!v || v->empty()) fail(e, "missing required attribute 'fbc:" + std::string(local) + "'");
    return *v;
  }

  static double number(const Element& e, const std::string& text, const std::string& what) {
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size()) fail(e, what + " '" + text + "' is not a number");
    return v;
  }

  void read_model(const Element& model_el) {
    auto& m = doc_.model;
    m.id = required(model_el, "id");
    if (const auto* v = model_el.attribute("version")) m.version = *v;

    std::vector<const Element*> reaction_lists;
    std::vector<const Element*> objective_lists;
    for (const auto& child : model_el.children) {
      const auto name = child->local_name();
      if (is_fbc(*child)) {
        if (name == "listOfGeneProducts") read_gene_products(*child);
        else if (name == "listOfObjectives") objective_lists.push_back(child.get());
        else info(*child, "FBC element ignored");
        continue;
      }
      if (name == "listOfCompartments") read_compartments(*child);
      else if (name == "listOfSpecies") species_lists_.push_back(child.get());
      else if (name == "listOfParameters") read_parameters(*child);
      else if (name == "listOfReactions") reaction_lists.push_back(child.get());
      else info(*child, "element ignored");
    }
    for (const Element* list : species_lists_) read_species(*list);
    for (const Element* list : reaction_lists) read_reactions(*list);
    for (const Element* list : objective_lists) read_objectives(*list);

    if (options_.biomass_goal) {
      for (const auto& s : *options_.biomass_goal)
        if (!m.find_species(s)) fail(model_el, "goal species '" + s.str() + "' is not declared");
      m.biomass_goal = *options_.biomass_goal;
    } else if (m.objective) {
      for (const auto& t : m.reactions.at(*m.objective).substrates) m.biomass_goal.insert(t.species);
    }
    if (m.biomass_goal.empty()) fail(model_el, "biomass goal required");
    assign_exchange_species();
  }

  void read_compartments(const Element& list) {
    for (const auto& c : list.children) {
      if (c->local_name() != "compartment") {
        info(*c, "element ignored");
        continue;
      }
      Compartment comp;
      comp.id = CompartmentId{required(*c, "id")};
      if (const auto* n = c->attribute("name")) comp.name = *n;
      if (doc_.model.find_compartment(comp.id)) fail(*c, "duplicate compartment '" + comp.id.str() + "'");
      doc_.model.compartments.emplace(comp.id, std::move(comp));
    }
  }

  void read_species(const Element& list) {
    for (const auto& c : list.children) {
      if (c->local_name() != "species") {
        info(*c, "element ignored");
        continue;
      }
      Species s;
      s.id = SpeciesId{required(*c, "id")};
      s.compartment = CompartmentId{required(*c, "compartment")};
      if (const auto* n = c->attribute("name")) s.name = *n;
      if (!doc_.model.find_compartment(s.compartment))
        fail(*c, "species '" + s.id.str() + "' references undeclared compartment '" + s.compartment.str() + "'");
      if (!doc_.model.species.emplace(s.id, s).second) fail(*c, "duplicate species '" + s.id.str() + "'");
    }
  }

  void read_parameters(const Element& list) {
    for (const auto& c : list.children) {
      if (c->local_name() != "parameter") {
        info(*c, "element ignored");
        continue;
      }
      const auto& id = required(*c, "id");
      const std::string* value = c->attribute("value");
      if (!value) continue;  // parameters without values cannot be bounds
      parameters_[id] = number(*c, *value, "parameter value");
    }
  }

  void read_gene_products(const Element& list) {
    for (const auto& c : list.children) {
      if (c->local_name() != "geneProduct") {
        info(*c, "element ignored");
        continue;
      }
      GeneId g{required_fbc(*c, "id")};
      if (!doc_.model.genes.insert(g).second) fail(*c, "duplicate gene product '" + g.str() + "'");
    }
  }

  std::vector<StoichTerm> read_references(const Element& list) {
    std::vector<StoichTerm> out;
    for (const auto& c : list.children) {
      if (c->local_name() != "speciesReference") {
        info(*c, "element ignored");
        continue;
      }
      StoichTerm t;
      t.species = SpeciesId{required(*c, "species")};
      if (!doc_.model.find_species(t.species))
        fail(*c, "reference to undeclared species '" + t.species.str() + "'");
      if (const auto* st = c->attribute("stoichiometry")) t.coefficient = number(*c, *st, "stoichiometry");
      if (!c->children.empty()) info(*c, "species reference content ignored");
      out.push_back(std::move(t));
    }
    return out;
  }

  GprExpr read_association_node(const Element& e) {
    if (!is_fbc(e)) fail(e, "unexpected element in gene product association");
    const auto name = e.local_name();
    if (name == "geneProductRef") {
      GeneId g{required_fbc(e, "geneProduct")};
      if (!doc_.model.genes.count(g)) fail(e, "reference to undeclared gene product '" + g.str() + "'");
      return GprExpr::gene(std::move(g));
    }
    if (name == "and" || name == "or") {
      std::vector<GprExpr> children;
      for (const auto& c : e.children) children.push_back(read_association_node(*c));
      if (children.empty()) fail(e, "operator without operands");
      return name == "and" ? GprExpr::all_of(std::move(children)) : GprExpr::any_of(std::move(children));
    }
    fail(e, "unsupported gene product association node");
  }

  double flux_bound(const Element& rxn, std::string_view attr, double fallback) {
    const std::string* ref = fbc_attribute(rxn, attr);
    if (!ref) return fallback;
    auto it = parameters_.find(*ref);
    if (it == parameters_.end()) fail(rxn, "flux bound references undeclared parameter '" + *ref + "'");
    return it->second;
  }

  void read_reactions(const Element& list) {
    for (const auto& c : list.children) {
      if (c->local_name() != "reaction") {
        info(*c, "element ignored");
        continue;
      }
      Reaction r;
      r.id = ReactionId{required(*c, "id")};
      if (const auto* rev = c->attribute("reversible")) r.reversible = (*rev == "true" || *rev == "1");
      bool has_association = false;
      for (const auto& part : c->children) {
        const auto name = part->local_name();
        if (is_fbc(*part) && name == "geneProductAssociation") {
          if (has_association) fail(*part, "more than one gene product association");
          has_association = true;
          if (part->children.size() != 1) fail(*part, "association must have exactly one child");
          r.gpr = read_association_node(*part->children.front());
        } else if (name == "listOfReactants") {
          auto terms = read_references(*part);
          r.substrates.insert(r.substrates.end(), terms.begin(), terms.end());
        } else if (name == "listOfProducts") {
          auto terms = read_references(*part);
          r.products.insert(r.products.end(), terms.begin(), terms.end());
        } else {
          info(*part, "element ignored");
        }
      }
      r.lower_bound = flux_bound(*c, "lowerFluxBound", r.reversible ? -kDefaultFluxBound : 0.0);
      r.upper_bound = flux_bound(*c, "upperFluxBound", kDefaultFluxBound);
      if (doc_.model.reactions.count(r.id)) fail(*c, "duplicate reaction '" + r.id.str() + "'");
      doc_.model.reactions.emplace(r.id, std::move(r));
    }
  }

  void read_objectives(const Element& list) {
    const std::string* active = fbc_attribute(list, "activeObjective");
    for (const auto& obj : list.children) {
      if (obj->local_name() != "objective") {
        info(*obj, "element ignored");
        continue;
      }
      const std::string& id = required_fbc(*obj, "id");
      if (active && *active != id) {
        info(*obj, "inactive objective ignored");
        continue;
      }
      if (doc_.model.objective) fail(*obj, "only one objective is supported");
      const std::string* type = fbc_attribute(*obj, "type");
      if (type && *type != "maximize") fail(*obj, "only maximising objectives are supported");
      std::vector<const Element*> fluxes;
      for (const auto& part : obj->children) {
        if (part->local_name() != "listOfFluxObjectives") {
          info(*part, "element ignored");
          continue;
        }
        for (const auto& f : part->children)
          if (f->local_name() == "fluxObjective") fluxes.push_back(f.get());
      }
      if (fluxes.size() != 1) fail(*obj, "objective must name exactly one reaction");
      ReactionId rid{required_fbc(*fluxes.front(), "reaction")};
      if (!doc_.model.find_reaction(rid)) fail(*fluxes.front(), "objective references undeclared reaction '" + rid.str() + "'");
      if (const auto* coef = fbc_attribute(*fluxes.front(), "coefficient");
          coef && number(*fluxes.front(), *coef, "coefficient") != 1.0)
        fail(*fluxes.front(), "objective coefficients other than 1 are not supported");
      doc_.model.objective = rid;
    }
  }

  void assign_exchange_species() {
    auto& m = doc_.model;
    std::optional<CompartmentId> ext = options_.extracellular;
    if (!ext) {
      for (const auto& [_, c] : m.compartments) {
        if (c.id.str() == "e" || (c.name && lower(*c.name).find("extracellular") != std::string::npos)) {
          ext = c.id;
          break;
        }
      }
    }
    if (!ext) return;
    for (const auto& [id, s] : m.species)
      if (s.compartment == *ext) m.exchange_species.insert(id);
  }

  const Element& root_;
  const SbmlOptions& options_;
  SbmlDocument doc_;
  std::map<std::string, double> parameters_;
  std::vector<const Element*> species_lists_;
};

}  // namespace

SbmlDocument parse_sbml(std::string_view document, const SbmlOptions& options) {
  auto root = xml::parse(document);
  return SbmlReader(*root, options).run();
}

}  // namespace gemreason
