#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "gemreason/abduction.hpp"
#include "gemreason/errors.hpp"
#include "gemreason/hash.hpp"
#include "gemreason/ledger.hpp"
#include "support/test_support.hpp"

using namespace gemreason;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

constexpr const char* kWhen = "2024-01-01T00:00:00Z";

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("gemreason-ledger-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Reaction simple_reaction(const std::string& id, const char* from, const char* to, GprExpr gpr = GprExpr::none()) {
  Reaction r;
  r.id = ReactionId(id);
  r.substrates.push_back({SpeciesId(from), 1.0});
  r.products.push_back({SpeciesId(to), 1.0});
  r.gpr = std::move(gpr);
  return r;
}

/// TOY-5 without its reactions: the state a root record starts from.
MetabolicModel toy_skeleton() {
  MetabolicModel m = load_native("toy5.json");
  m.reactions.clear();
  return m;
}

Changeset toy_reactions_changeset() {
  Changeset cs;
  for (const auto& [_, r] : load_native("toy5.json").reactions) cs.push_back(add_reaction(r));
  return cs;
}

}  // namespace

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("changeset examples") {
  const MetabolicModel toy = load_native("toy5.json");
  const Reaction extra = simple_reaction("r9", "A", "C");
  CHECK(apply_changeset(toy, {add_reaction(extra), remove_reaction(extra)}) == toy);

  const Reaction& r1 = toy.reactions.at(ReactionId("r1"));
  const MetabolicModel narrowed = apply_changeset(toy, {modify_bounds(r1, 0, 50)});
  MetabolicModel expect = toy;
  expect.reactions.at(ReactionId("r1")).upper_bound = 50;
  CHECK(narrowed == expect);
  CHECK(diff(toy, narrowed).size() == 1);

  // first failing item is reported, nothing is applied
  const MetabolicModel before = toy;
  try {
    apply_changeset(toy, {add_reaction(extra), remove_reaction(simple_reaction("ghost", "A", "B"))});
    FAIL("expected ChangesetError");
  } catch (const ChangesetError& e) {
    CHECK(e.index() == 1);
  }
  CHECK(toy == before);
  CHECK_THROWS_AS(apply_changeset(toy, {add_reaction(r1)}), ChangesetError);
  CHECK_THROWS_AS(apply_changeset(toy, {modify_bounds(r1, 10, 5)}), ChangesetError);

  CHECK(diff(toy, toy).empty());
  const auto d = diff(toy, load_native("toy5_r2_deleted.json"));
  REQUIRE(d.size() == 1);
  CHECK(d[0].verb == ChangeVerb::Remove);
  CHECK(d[0].kind == EntityKind::Reaction);
  CHECK(d[0].entity == "r2");
  CHECK_FALSE(d[0].after);

  for (const auto& item : toy_reactions_changeset())
    CHECK(change_item_from_json(to_json(item), "$") == item);
}

TEST_CASE("gene-function hypothesis adds one isoenzyme to r2") {
  const MetabolicModel m = load_native("toy5_bounds.json");
  const std::vector<Abducible> h{GeneFunction{GeneId("g5"), ReactionId("r2")}};
  const Changeset cs = hypothesis_changeset(m, h);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].verb == ChangeVerb::Add);
  CHECK(cs[0].kind == EntityKind::Gpr);
  const MetabolicModel revised = apply_changeset(m, cs);
  const auto dnf = gpr_to_dnf(revised.reactions.at(ReactionId("r2")).gpr);
  CHECK(dnf.terms.size() == 2);
  CHECK(std::find(dnf.terms.begin(), dnf.terms.end(), GeneSet{GeneId("g5")}) != dnf.terms.end());

  // isoenzyme bodies per reaction; indices shift because terms are ordered by size
  auto iso_lines = [](const MetabolicModel& x) {
    const LogicTheory t = compile(x);
    std::set<std::string> out;
    for (const auto& c : t.clauses()) {
      if (c.tag != ClauseTag::Isoenzyme) continue;
      std::string line = t.atoms()[c.head].name + " <-";
      for (AtomId a : c.body) line += " " + to_string(t.atoms()[a]);
      out.insert(line);
    }
    return out;
  };
  const auto a = iso_lines(m), b = iso_lines(revised);
  std::vector<std::string> added;
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(added));
  CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  CHECK(added == std::vector<std::string>{"r2 <- gn(g5)"});

  Ledger ledger;
  const MetabolicModel root_state = apply_changeset(m, {modify_bounds(m.reactions.at(ReactionId("r1")), 0, 90)});
  record_revision(ledger, m, std::nullopt, {modify_bounds(m.reactions.at(ReactionId("r1")), 0, 90)},
                  RevisionReason::Curation, "", "curator", kWhen);
  const auto rec = record_revision(ledger, root_state, std::nullopt, cs, RevisionReason::AbductionAccepted,
                                    "gene_function(g5,r2)", "curator", kWhen);
  CHECK(rec.changes.size() == 1);
  CHECK(rec.reason == RevisionReason::AbductionAccepted);
  CHECK(rec.parent == ledger.records()[0].id);
}

TEST_CASE("record, lineage, history") {
  Ledger ledger;
  const MetabolicModel skel = toy_skeleton();
  const auto root = record_revision(ledger, skel, std::nullopt, toy_reactions_changeset(), RevisionReason::Curation,
                                     "initial network", "alice", kWhen);
  CHECK(ledger.size() == 1);
  CHECK_FALSE(root.parent);
  CHECK(root.id == revision_id(std::nullopt, toy_reactions_changeset()));
  CHECK(root.id.size() == 64);
  CHECK(ledger.lineage(root.id).size() == 1);
  MetabolicModel state = replay(skel, ledger.history("toy5"));
  CHECK(state == load_native("toy5.json"));

  // a version bump touching several entities
  Changeset bump{add_reaction(simple_reaction("r7", "B", "C")), modify_bounds(state.reactions.at(ReactionId("r1")), 0, 500)};
  const auto second = record_revision(ledger, state, std::nullopt, bump, RevisionReason::ExternalUpdate,
                                       "update from version 8.4.1 to 8.4.2", "bob", kWhen, "8.4.2");
  CHECK(second.parent == root.id);
  state = apply_changeset(state, bump);
  state.version = second.version;
  const auto third = record_revision(ledger, state, std::nullopt, {remove_reaction(state.reactions.at(ReactionId("r7")))},
                                      RevisionReason::Simulated, "", "bob", kWhen);
  CHECK(ledger.history("toy5").size() == 3);
  CHECK(ledger.head("toy5")->id == third.id);
  CHECK(replay(skel, ledger.history("toy5")).version == "8.4.2");
  CHECK(ledger.lineage(third.id) == ledger.history("toy5"));
  CHECK(replay(skel, {}) == skel);

  // branch off the root
  const auto branch = record_revision(ledger, load_native("toy5.json"), root.id,
                                       {remove_reaction(load_native("toy5.json").reactions.at(ReactionId("r2")))},
                                       RevisionReason::Curation, "", "carol", kWhen);
  CHECK(ledger.lineage(branch.id).size() == 2);
  CHECK(ledger.history("toy5").back().id == branch.id);
  CHECK(ledger.lineage(third.id).size() == 3);

  // errors
  CHECK_THROWS_AS(ledger.lineage("nope"), LedgerError);
  CHECK_THROWS_AS(ledger.history("other"), LedgerError);
  CHECK_THROWS_AS(record_revision(ledger, state, std::string("missing"), bump, RevisionReason::Curation, "", "x", kWhen),
                  LedgerError);
  CHECK_THROWS_AS(record_revision(ledger, state, std::nullopt, {remove_reaction(simple_reaction("zz", "A", "B"))},
                                  RevisionReason::Curation, "", "x", kWhen),
                  ChangesetError);
  CHECK_THROWS_AS(record_revision(ledger, state, std::nullopt, {}, RevisionReason::Curation, "", "x", kWhen), LedgerError);
  RevisionRecord second_root = root;
  second_root.changes = {add_reaction(simple_reaction("r8", "A", "B"))};
  second_root.id = revision_id(std::nullopt, second_root.changes);
  CHECK_THROWS_AS(ledger.append(second_root), LedgerError);
  RevisionRecord forged = ledger.records()[1];
  forged.description = "edited";
  CHECK_THROWS_AS(ledger.append(forged), LedgerError);  // duplicate id
  forged.id = std::string(64, '0');
  CHECK_THROWS_AS(ledger.append(forged), LedgerError);  // id does not match content
  CHECK(ledger.size() == 4);

  // shuffled chain
  auto chain = ledger.lineage(third.id);
  std::swap(chain[1], chain[2]);
  CHECK_THROWS_AS(replay(skel, chain), LedgerError);

  const std::string log = export_changelog(ledger.lineage(second.id));
  CHECK(log.find("reason   EXTERNAL_UPDATE") != std::string::npos);
  CHECK(log.find("update from version 8.4.1 to 8.4.2") != std::string::npos);
}

TEST_CASE("persistence round trip is byte-identical") {
  TempDir dir;
  const fs::path file = dir.path / "ledger.ndjson";
  std::string first;
  {
    Ledger ledger = Ledger::open(file);
    const MetabolicModel skel = toy_skeleton();
    record_revision(ledger, skel, std::nullopt, toy_reactions_changeset(), RevisionReason::Curation, "d", "a", kWhen);
    MetabolicModel s = load_native("toy5.json");
    for (int i = 0; i < 5; ++i) {
      Changeset c{modify_bounds(s.reactions.at(ReactionId("r1")), 0, 100 + i)};
      record_revision(ledger, s, std::nullopt, c, RevisionReason::Simulated, "", "a", kWhen);
      s = apply_changeset(s, c);
    }
    first = ledger.serialize();
    CHECK(slurp(file.string()) == first);
  }
  Ledger reloaded = Ledger::open(file);
  CHECK(reloaded.serialize() == first);
  CHECK(reloaded.size() == 6);
  reloaded.save(dir.path / "copy.ndjson");
  CHECK(slurp((dir.path / "copy.ndjson").string()) == first);
  CHECK(Ledger::open(dir.path / "copy.ndjson").records() == reloaded.records());
  CHECK(std::count(first.begin(), first.end(), '\n') == 6);

  // author and timestamp are not hashed; the changeset is
  std::string relabelled = first;
  relabelled.replace(relabelled.find(R"("author":"a")"), 12, R"("author":"b")");
  std::ofstream(dir.path / "relabelled.ndjson") << relabelled;
  CHECK_NOTHROW(Ledger::open(dir.path / "relabelled.ndjson"));
  std::string tampered = first;
  tampered.replace(tampered.find("[0.0,101.0]"), 11, "[0.0,999.0]");
  std::ofstream(dir.path / "tampered.ndjson") << tampered;
  CHECK_THROWS_AS(Ledger::open(dir.path / "tampered.ndjson"), LedgerError);
}

TEST_CASE("1000 simulated revisions replay to the directly built model") {
  std::mt19937_64 rng(61);
  const SimulatedHistory h = simulate_revisions(rng, 1000);
  const auto chain = h.ledger.history("toy5");
  REQUIRE(chain.size() == 1000);
  const MetabolicModel replayed = replay(h.base, chain);
  CHECK(replayed == h.target);
  CHECK(replay(h.base, chain) == replayed);
}

TEST_CASE("diff then apply reproduces the target") {
  std::mt19937_64 rng(62);
  for (int i = 0; i < 100; ++i) {
    const MetabolicModel a = random_model(rng);
    MetabolicModel b = i % 2 ? random_model(rng) : mutate(rng, a);
    b.id = a.id;
    b.version = a.version;
    REQUIRE(validate(b).empty());
    const Changeset d = diff(a, b);
    REQUIRE(apply_changeset(a, d) == b);
    CHECK(diff(a, b) == d);
    CHECK(changeset_from_json(to_json(d), "$") == d);
    for (std::size_t k = 1; k < d.size(); ++k)
      CHECK(std::pair(d[k - 1].kind, d[k - 1].entity) <= std::pair(d[k].kind, d[k].entity));
  }
}
