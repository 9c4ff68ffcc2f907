#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "gemreason/cli.hpp"
#include "support/test_support.hpp"

using namespace testsupport;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "gemreason");
  std::ostringstream out, err;
  Result r;
  r.code = gemreason::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string d(const char* name) { return data_path(name); }

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("gemreason-cli-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const char* name) const { return (path / name).string(); }
};

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("compile") {
  auto r = run({"compile", "--model", d("toy5.json")});
  CHECK(r.code == 0);
  CHECK(r.out == "ACT=4 ENZ=4 ISO=4 PROD=4\n");

  r = run({"compile", "--model", d("empty.json")});
  CHECK(r.code == 0);
  CHECK(r.out == "ACT=0 ENZ=0 ISO=0 PROD=0\n");

  r = run({"compile", "--model", d("malformed.json")});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());

  r = run({"compile", "--model", d("r0889.xml"), "--goal", "s0335", "--clauses"});
  CHECK(r.code == 0);
  CHECK(r.out.find("act(r0889,fwd) <- met(s0340,c), met(s1207,c), enz(r0889)\n") != std::string::npos);

  CHECK(run({"compile", "--model", d("toy5.xml")}).code == 2);  // no objective, no goal
  CHECK(run({"compile", "--model", d("toy5.xml"), "--goal", "BIOMASS"}).out == "ACT=4 ENZ=4 ISO=4 PROD=4\n");
  CHECK(run({"compile", "--model", d("toy5.json"), "--format", "sbml"}).code == 2);

  TempDir tmp;
  auto j = nlohmann::json::parse(slurp(d("toy5.json")));
  j["reactions"][0]["gpr"] = "g99";
  std::ofstream(tmp / "invalid.json") << j.dump();
  r = run({"compile", "--model", tmp / "invalid.json"});
  CHECK(r.code == 1);
  CHECK(r.err.find("g99") != std::string::npos);

  r = run({"compile", "--model", d("toy5.json"), "--out", tmp / "c"});
  CHECK(r.code == 0);
  CHECK(slurp(tmp / "c/stats.txt") == "ACT=4 ENZ=4 ISO=4 PROD=4\n");
  CHECK(lines(slurp(tmp / "c/clauses.txt")) > 16);
}

TEST_CASE("usage and io errors") {
  CHECK(run({}).code == 3);
  CHECK(run({"bogus"}).code == 3);
  CHECK(run({"compile"}).code == 3);
  CHECK(run({"essentiality", "--model", d("toy5.json"), "--medium", d("medium_A_e.txt"), "--workers", "0"}).code == 3);
  CHECK(run({"compile", "--model", d("does_not_exist.json")}).code == 7);
  CHECK(run({"growth", "--model", d("toy5.json"), "--medium", d("nope.txt")}).code == 7);
}

TEST_CASE("growth") {
  auto r = run({"growth", "--model", d("toy5.json"), "--medium", d("medium_A_e.txt")});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["verdict"] == "GROWTH");
  CHECK(j["derivation"].size() > 0);

  r = run({"growth", "--model", d("toy5.json"), "--medium", d("medium_A_e.txt"), "--ko", "g1,g2"});
  CHECK(nlohmann::json::parse(r.out)["verdict"] == "NO_GROWTH");
  r = run({"growth", "--model", d("toy5.json"), "--medium", d("medium_empty.txt")});
  j = nlohmann::json::parse(r.out);
  CHECK(j["verdict"] == "NO_GROWTH");
  CHECK(j["missing"] == nlohmann::json::array({"met(BIOMASS,c)"}));

  CHECK(run({"growth", "--model", d("toy5.json"), "--medium", d("medium_A.txt")}).code == 4);
  CHECK(run({"growth", "--model", d("toy5.json"), "--medium", d("medium_A_e.txt"), "--ko", "g42"}).code == 4);
}

TEST_CASE("essentiality") {
  TempDir tmp;
  auto r = run({"essentiality", "--model", d("toy5.json"), "--medium", d("medium_A_e.txt"), "--observed",
                d("toy5_essentiality_observed.txt"), "--out", tmp / "e"});
  REQUIRE(r.code == 0);
  const std::string tsv = slurp(tmp / "e/essentiality.tsv");
  CHECK(lines(tsv) == 6);
  std::size_t essential = 0;
  for (std::size_t p = tsv.find("\tESSENTIAL\t"); p != std::string::npos; p = tsv.find("\tESSENTIAL\t", p + 1)) ++essential;
  CHECK(essential == 3);
  const auto c = nlohmann::json::parse(slurp(tmp / "e/confusion.json"));
  CHECK(c["fp"] == 1);
  CHECK(c["tp"] == 2);

  r = run({"essentiality", "--model", d("toy5.json"), "--medium", d("medium_A_e.txt")});
  CHECK(r.out == tsv);
  CHECK(run({"essentiality", "--model", d("toy5.json"), "--medium", d("medium_empty.txt")}).code == 5);
}

TEST_CASE("abduce") {
  auto r = run({"abduce", "--model", d("toy5.json"), "--observations", d("toy5_observations.txt")});
  CHECK(r.code == 0);
  CHECK(r.out.empty());

  r = run({"abduce", "--model", d("toy5_r2_deleted.json"), "--observations", d("toy5_observations.txt"), "--pool",
           d("toy5.json")});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out) == 2);
  CHECK(r.out.find(R"j("abducibles":["met(C,c)"])j") != std::string::npos);
  const auto accepted = nlohmann::json::parse(r.out.substr(r.out.find('\n') + 1));
  CHECK(accepted["abducibles"] == nlohmann::json::array({"reaction_exists(r2)"}));
  CHECK(accepted["stage2"] == "ACCEPTED");
  CHECK(accepted["deltas"][0]["observation"] == 0);

  TempDir tmp;
  const std::string ledger = tmp / "ledger.ndjson";
  r = run({"abduce", "--model", d("toy5_r2_deleted.json"), "--observations", d("toy5_observations.txt"), "--pool",
           d("toy5.json"), "--record", "--ledger", ledger, "--author", "tester", "--timestamp", "2024-01-01T00:00:00Z",
           "--out", tmp / "a"});
  REQUIRE(r.code == 0);
  CHECK(lines(slurp(ledger)) == 1);
  CHECK(slurp(ledger).find("ABDUCTION_ACCEPTED") != std::string::npos);
  r = run({"revise", "replay", "--model", d("toy5_r2_deleted.json"), "--ledger", ledger, "--model-id", "toy5"});
  REQUIRE(r.code == 0);
  auto replayed = nlohmann::json::parse(r.out);
  auto original = nlohmann::json::parse(slurp(d("toy5.json")));
  CHECK(replayed["reactions"].size() == original["reactions"].size());

  CHECK(run({"abduce", "--model", d("toy5.json"), "--observations", d("toy5_observations.txt"), "--record"}).code == 3);
  CHECK(run({"abduce", "--model", d("toy5.json"), "--observations", d("toy5_observations.txt"), "--kinds", "magic"}).code == 3);
}

TEST_CASE("fba") {
  auto r = run({"fba", "--model", d("chain3.json"), "--medium", d("medium_A.txt")});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["status"] == "OPTIMAL");
  CHECK(j["objective"].get<double>() == doctest::Approx(10.0));

  TempDir tmp;
  std::ofstream(tmp / "medium.txt") << "A_e\n";
  r = run({"fba", "--model", d("toy5_bounds.json"), "--medium", tmp / "medium.txt", "--ko", "g3", "--logic", "--out",
           tmp / "f"});
  REQUIRE(r.code == 0);
  j = nlohmann::json::parse(slurp(tmp / "f/fba.json"));
  CHECK(j["objective"].get<double>() <= 1e-6);
  CHECK(j["pinned"] == nlohmann::json::array({"EX_biomass", "r2", "rB"}));
  CHECK(slurp(tmp / "f/problem.lp").rfind("Maximize\n", 0) == 0);

  CHECK(run({"fba", "--model", d("toy5.json"), "--medium", d("medium_A_e.txt")}).code == 5);
}

TEST_CASE("revise") {
  TempDir tmp;
  const std::string ledger = tmp / "l.ndjson";
  auto r = run({"revise", "record", "--model", d("toy5.json"), "--target", d("toy5_r2_deleted.json"), "--ledger", ledger,
                "--reason", "CURATION", "--author", "a", "--timestamp", "2024-01-01T00:00:00Z"});
  REQUIRE(r.code == 0);
  const std::string id = r.out.substr(0, 64);
  CHECK(lines(slurp(ledger)) == 1);

  r = run({"revise", "log", "--ledger", ledger, "--revision", id});
  CHECK(r.code == 0);
  CHECK(r.out.find("revision " + id) != std::string::npos);

  r = run({"revise", "replay", "--model", d("toy5.json"), "--ledger", ledger, "--revision", id});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["reactions"].size() == 3);

  r = run({"revise", "diff", "--model", d("toy5.json"), "--target", d("toy5_r2_deleted.json"), "--out", tmp / "d"});
  CHECK(r.code == 0);
  // recording the same diff again on top of the head no longer applies
  r = run({"revise", "record", "--model", d("toy5_r2_deleted.json"), "--changes", tmp / "d/changeset.json", "--ledger",
           ledger, "--reason", "CURATION", "--timestamp", "2024-01-01T00:00:00Z"});
  CHECK(r.code == 6);
  CHECK(run({"revise", "log", "--ledger", ledger, "--revision", "ffff"}).code == 6);
  CHECK(run({"revise", "record", "--model", d("toy5.json"), "--target", d("toy5.json"), "--ledger", ledger, "--reason",
             "BOGUS"})
            .code == 3);
}

TEST_CASE("the binary maps errors to process exit codes") {
  auto code = [](const std::string& args) {
    const int status = std::system((std::string(GEMREASON_CLI) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  CHECK(code("compile --model " + d("toy5.json")) == 0);
  CHECK(code("compile --model " + d("malformed.json")) == 2);
  CHECK(code("--help") == 0);
  CHECK(code("") == 3);
}
