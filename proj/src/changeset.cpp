#include "gemreason/changeset.hpp"

#include <algorithm>
#include <array>
#include <tuple>

#include "gemreason/native_format.hpp"

namespace gemreason {

using nlohmann::json;

namespace {

constexpr std::array<const char*, 3> kVerbNames{"ADD", "REMOVE", "MODIFY"};
constexpr std::array<const char*, 9> kKindNames{"COMPARTMENT", "SPECIES",      "GENE",
                                                "REACTION",    "GPR",          "BOUNDS",
                                                "BIOMASS_GOAL", "EXCHANGE_SPECIES", "OBJECTIVE"};

}  // namespace

const char* to_string(ChangeVerb v) noexcept { return kVerbNames[static_cast<std::size_t>(v)]; }
const char* to_string(EntityKind k) noexcept { return kKindNames[static_cast<std::size_t>(k)]; }

ChangeVerb change_verb_from_string(const std::string& s) {
  for (std::size_t i = 0; i < kVerbNames.size(); ++i)
    if (s == kVerbNames[i]) return static_cast<ChangeVerb>(i);
  throw ParseError("unknown change verb '" + s + "'");
}

EntityKind entity_kind_from_string(const std::string& s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (s == kKindNames[i]) return static_cast<EntityKind>(i);
  throw ParseError("unknown entity kind '" + s + "'");
}

json to_json(const ChangeItem& item) {
  json j = {{"verb", to_string(item.verb)}, {"kind", to_string(item.kind)}, {"entity", item.entity}};
  if (item.before) j["before"] = *item.before;
  if (item.after) j["after"] = *item.after;
  return j;
}

ChangeItem change_item_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path + ": expected an object");
  for (const char* key : {"verb", "kind", "entity"})
    if (!j.contains(key) || !j[key].is_string()) throw ParseError(path + "." + key + ": expected a string");
  ChangeItem item;
  item.verb = change_verb_from_string(j["verb"].get<std::string>());
  item.kind = entity_kind_from_string(j["kind"].get<std::string>());
  item.entity = j["entity"].get<std::string>();
  if (j.contains("before")) item.before = j["before"];
  if (j.contains("after")) item.after = j["after"];
  return item;
}

json to_json(const Changeset& changes) {
  json out = json::array();
  for (const auto& c : changes) out.push_back(to_json(c));
  return out;
}

Changeset changeset_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected an array");
  Changeset out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(change_item_from_json(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

namespace {

json goal_json(const std::set<SpeciesId>& goal) {
  json out = json::array();
  for (const auto& s : goal) out.push_back(s.str());
  return out;
}

json objective_json(const std::optional<ReactionId>& r) { return r ? json(r->str()) : json(nullptr); }

json bounds_json(double lower, double upper) { return json::array({bound_to_json(lower), bound_to_json(upper)}); }

class Applier {
 public:
  explicit Applier(MetabolicModel& m) : m_(m) {}

  void apply(const ChangeItem& item) {
    check_shape(item);
    switch (item.kind) {
      case EntityKind::Compartment:
        return keyed(m_.compartments, CompartmentId{item.entity}, item,
                     [](const json& j) { return compartment_from_json(j, "payload"); });
      case EntityKind::Species:
        return keyed(m_.species, SpeciesId{item.entity}, item,
                     [](const json& j) { return species_from_json(j, "payload"); });
      case EntityKind::Reaction:
        return keyed(m_.reactions, ReactionId{item.entity}, item,
                     [](const json& j) { return reaction_from_json(j, "payload"); });
      case EntityKind::Gene:
        return member(m_.genes, GeneId{item.entity}, item);
      case EntityKind::ExchangeSpecies:
        return member(m_.exchange_species, SpeciesId{item.entity}, item);
      case EntityKind::Gpr:
        return gpr(item);
      case EntityKind::Bounds:
        return bounds(item);
      case EntityKind::BiomassGoal: {
        expect_equal(goal_json(m_.biomass_goal), *item.before, "biomass goal");
        std::set<SpeciesId> goal;
        for (const auto& s : *item.after) goal.insert(SpeciesId{s.get<std::string>()});
        m_.biomass_goal = std::move(goal);
        return;
      }
      case EntityKind::Objective:
        expect_equal(objective_json(m_.objective), *item.before, "objective");
        if (item.after->is_null()) m_.objective.reset();
        else m_.objective = ReactionId{item.after->get<std::string>()};
        return;
    }
  }

 private:
  [[noreturn]] static void fail(const std::string& what) { throw std::runtime_error(what); }

  static void check_shape(const ChangeItem& item) {
    switch (item.verb) {
      case ChangeVerb::Add:
        if (item.before || !item.after) fail("ADD needs an after payload and no before payload");
        break;
      case ChangeVerb::Remove:
        if (!item.before || item.after) fail("REMOVE needs a before payload and no after payload");
        break;
      case ChangeVerb::Modify:
        if (!item.before || !item.after) fail("MODIFY needs both payloads");
        if (*item.before == *item.after) fail("MODIFY payloads are identical");
        break;
    }
    const bool modify_only = item.kind == EntityKind::Bounds || item.kind == EntityKind::BiomassGoal ||
                             item.kind == EntityKind::Objective;
    const bool no_modify = item.kind == EntityKind::Gene || item.kind == EntityKind::ExchangeSpecies;
    if (modify_only && item.verb != ChangeVerb::Modify)
      fail(std::string(to_string(item.kind)) + " only supports MODIFY");
    if (no_modify && item.verb == ChangeVerb::Modify)
      fail(std::string(to_string(item.kind)) + " does not support MODIFY");
  }

  static void expect_equal(const json& current, const json& before, const std::string& what) {
    if (current != before) fail(what + " does not match the recorded before state");
  }

  template <typename Map, typename Key, typename Parse>
  void keyed(Map& map, const Key& key, const ChangeItem& item, Parse parse) {
    auto it = map.find(key);
    switch (item.verb) {
      case ChangeVerb::Add: {
        if (it != map.end()) fail("'" + item.entity + "' already exists");
        auto value = parse(*item.after);
        if (value.id != key) fail("payload id does not match entity '" + item.entity + "'");
        map.emplace(key, std::move(value));
        return;
      }
      case ChangeVerb::Remove:
        if (it == map.end()) fail("'" + item.entity + "' does not exist");
        expect_equal(to_json(it->second), *item.before, item.entity);
        map.erase(it);
        return;
      case ChangeVerb::Modify: {
        if (it == map.end()) fail("'" + item.entity + "' does not exist");
        expect_equal(to_json(it->second), *item.before, item.entity);
        auto value = parse(*item.after);
        if (value.id != key) fail("payload id does not match entity '" + item.entity + "'");
        it->second = std::move(value);
        return;
      }
    }
  }

  template <typename Key>
  void member(std::set<Key>& set, const Key& key, const ChangeItem& item) {
    const json& payload = item.verb == ChangeVerb::Add ? *item.after : *item.before;
    if (payload != json(item.entity)) fail("payload does not match entity '" + item.entity + "'");
    if (item.verb == ChangeVerb::Add) {
      if (!set.insert(key).second) fail("'" + item.entity + "' already exists");
    } else if (!set.erase(key)) {
      fail("'" + item.entity + "' does not exist");
    }
  }

  Reaction& reaction(const std::string& id) {
    auto it = m_.reactions.find(ReactionId{id});
    if (it == m_.reactions.end()) fail("reaction '" + id + "' does not exist");
    return it->second;
  }

  static GprExpr gpr_payload(const json& j) {
    if (!j.is_string()) fail("GPR payload must be a string");
    return parse_gpr(j.get<std::string>());
  }

  void gpr(const ChangeItem& item) {
    Reaction& r = reaction(item.entity);
    switch (item.verb) {
      case ChangeVerb::Add: {
        GprExpr disjunct = gpr_payload(*item.after);
        if (disjunct.is_spontaneous()) fail("cannot add an empty GPR disjunct");
        if (r.gpr.is_spontaneous()) fail("reaction '" + item.entity + "' is spontaneous");
        std::vector<GprExpr> terms;
        if (r.gpr.kind() == GprExpr::Kind::Or) terms = r.gpr.children();
        else terms.push_back(r.gpr);
        terms.push_back(std::move(disjunct));
        r.gpr = GprExpr::any_of(std::move(terms));
        return;
      }
      case ChangeVerb::Remove: {
        GprExpr disjunct = gpr_payload(*item.before);
        std::vector<GprExpr> terms;
        if (r.gpr.kind() == GprExpr::Kind::Or) terms = r.gpr.children();
        else terms.push_back(r.gpr);
        auto it = std::find(terms.rbegin(), terms.rend(), disjunct);
        if (it == terms.rend() || terms.size() < 2) fail("GPR of '" + item.entity + "' has no removable disjunct " + to_string(disjunct));
        terms.erase(std::next(it).base());
        r.gpr = GprExpr::any_of(std::move(terms));
        return;
      }
      case ChangeVerb::Modify:
        expect_equal(json(to_string(r.gpr)), *item.before, "GPR of " + item.entity);
        r.gpr = gpr_payload(*item.after);
        return;
    }
  }

  void bounds(const ChangeItem& item) {
    Reaction& r = reaction(item.entity);
    expect_equal(bounds_json(r.lower_bound, r.upper_bound), *item.before, "bounds of " + item.entity);
    const json& after = *item.after;
    if (!after.is_array() || after.size() != 2) fail("BOUNDS payload must be [lower, upper]");
    r.lower_bound = bound_from_json(after[0], "after[0]");
    r.upper_bound = bound_from_json(after[1], "after[1]");
  }

  MetabolicModel& m_;
};

template <typename Map>
void diff_keyed(const Map& a, const Map& b, EntityKind kind, Changeset& out) {
  for (const auto& [key, value] : a)
    if (!b.count(key)) out.push_back({ChangeVerb::Remove, kind, key.str(), to_json(value), std::nullopt});
  for (const auto& [key, value] : b) {
    auto it = a.find(key);
    if (it == a.end()) out.push_back({ChangeVerb::Add, kind, key.str(), std::nullopt, to_json(value)});
    else if (!(it->second == value))
      out.push_back({ChangeVerb::Modify, kind, key.str(), to_json(it->second), to_json(value)});
  }
}

template <typename Key>
void diff_members(const std::set<Key>& a, const std::set<Key>& b, EntityKind kind, Changeset& out) {
  for (const auto& k : a)
    if (!b.count(k)) out.push_back({ChangeVerb::Remove, kind, k.str(), json(k.str()), std::nullopt});
  for (const auto& k : b)
    if (!a.count(k)) out.push_back({ChangeVerb::Add, kind, k.str(), std::nullopt, json(k.str())});
}

}  // namespace

MetabolicModel apply_changeset(const MetabolicModel& model, const Changeset& changes) {
  MetabolicModel out = model;
  Applier applier(out);
  for (std::size_t i = 0; i < changes.size(); ++i) {
    try {
      applier.apply(changes[i]);
    } catch (const std::exception& e) {
      throw ChangesetError(i, std::string(to_string(changes[i].verb)) + " " + to_string(changes[i].kind) +
                                  " " + changes[i].entity + ": " + e.what());
    }
  }
  for (const auto& d : validate(out))
    if (d.severity == Severity::Error)
      throw ChangesetError(changes.size(), "result is invalid: " + d.entity + ": " + d.message);
  return out;
}

Changeset diff(const MetabolicModel& a, const MetabolicModel& b) {
  Changeset out;
  diff_keyed(a.compartments, b.compartments, EntityKind::Compartment, out);
  diff_keyed(a.species, b.species, EntityKind::Species, out);
  diff_members(a.genes, b.genes, EntityKind::Gene, out);

  for (const auto& [key, ra] : a.reactions)
    if (!b.reactions.count(key)) out.push_back(remove_reaction(ra));
  for (const auto& [key, rb] : b.reactions) {
    auto it = a.reactions.find(key);
    if (it == a.reactions.end()) {
      out.push_back(add_reaction(rb));
      continue;
    }
    const Reaction& ra = it->second;
    if (ra == rb) continue;
    const bool structural = ra.substrates != rb.substrates || ra.products != rb.products ||
                            ra.reversible != rb.reversible;
    if (structural) {
      out.push_back({ChangeVerb::Modify, EntityKind::Reaction, key.str(), to_json(ra), to_json(rb)});
      continue;
    }
    if (!(ra.gpr == rb.gpr))
      out.push_back({ChangeVerb::Modify, EntityKind::Gpr, key.str(), json(to_string(ra.gpr)), json(to_string(rb.gpr))});
    if (ra.lower_bound != rb.lower_bound || ra.upper_bound != rb.upper_bound)
      out.push_back(modify_bounds(ra, rb.lower_bound, rb.upper_bound));
  }

  if (a.biomass_goal != b.biomass_goal)
    out.push_back({ChangeVerb::Modify, EntityKind::BiomassGoal, "biomass_goal", goal_json(a.biomass_goal),
                   goal_json(b.biomass_goal)});
  diff_members(a.exchange_species, b.exchange_species, EntityKind::ExchangeSpecies, out);
  if (a.objective != b.objective)
    out.push_back({ChangeVerb::Modify, EntityKind::Objective, "objective", objective_json(a.objective),
                   objective_json(b.objective)});

  std::stable_sort(out.begin(), out.end(), [](const ChangeItem& x, const ChangeItem& y) {
    return std::tie(x.kind, x.entity) < std::tie(y.kind, y.entity);
  });
  return out;
}

ChangeItem add_reaction(const Reaction& r) {
  return {ChangeVerb::Add, EntityKind::Reaction, r.id.str(), std::nullopt, to_json(r)};
}

ChangeItem remove_reaction(const Reaction& r) {
  return {ChangeVerb::Remove, EntityKind::Reaction, r.id.str(), to_json(r), std::nullopt};
}

ChangeItem add_gpr_disjunct(const ReactionId& r, const GprExpr& disjunct) {
  return {ChangeVerb::Add, EntityKind::Gpr, r.str(), std::nullopt, json(to_string(disjunct))};
}

ChangeItem modify_bounds(const Reaction& r, double lower, double upper) {
  return {ChangeVerb::Modify, EntityKind::Bounds, r.id.str(), bounds_json(r.lower_bound, r.upper_bound),
          bounds_json(lower, upper)};
}

}  // namespace gemreason
