#include "gemreason/cli.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gemreason/abduction.hpp"
#include "gemreason/errors.hpp"
#include "gemreason/fba.hpp"
#include "gemreason/ledger.hpp"
#include "gemreason/logic.hpp"
#include "gemreason/native_format.hpp"
#include "gemreason/query_files.hpp"
#include "gemreason/reasoner.hpp"
#include "gemreason/sbml.hpp"

namespace gemreason::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Artifacts go to files under --out (temp + rename, never partial) or, for
/// the primary artifact, to standard output.
class Sink {
 public:
  Sink(const std::string& dir, std::ostream& out) : out_(out) {
    if (!dir.empty()) dir_ = fs::path(dir);
  }

  bool to_files() const { return dir_.has_value(); }

  void write(const std::string& name, const std::string& content, bool primary) {
    if (!dir_) {
      if (primary) out_ << content;
      return;
    }
    std::error_code ec;
    fs::create_directories(*dir_, ec);
    if (ec) throw IoError("cannot create " + dir_->string() + ": " + ec.message());
    const fs::path target = *dir_ / name;
    fs::path tmp = *dir_ / ("." + name + ".tmp." + std::to_string(::getpid()));
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      if (!f) throw IoError("cannot write " + tmp.string());
      f << content;
      f.flush();
      if (!f) {
        fs::remove(tmp, ec);
        throw IoError("cannot write " + tmp.string());
      }
    }
    fs::rename(tmp, target, ec);
    if (ec) {
      fs::remove(tmp, ec);
      throw IoError("cannot move output into " + target.string());
    }
  }

  /// Summary line, printed only when artifacts went to files.
  void summary(const std::string& line) {
    if (dir_) out_ << line << '\n';
  }

 private:
  std::optional<fs::path> dir_;
  std::ostream& out_;
};

struct ModelArgs {
  std::string path;
  std::string format = "auto";
  std::string goal;
};

void add_model_options(CLI::App* app, ModelArgs& m, bool required = true) {
  auto* opt = app->add_option("--model", m.path, "model file (SBML or native JSON)");
  if (required) opt->required();
  app->add_option("--format", m.format, "sbml, native or auto (by extension)")
      ->check(CLI::IsMember({"auto", "sbml", "native"}));
  app->add_option("--goal", m.goal, "biomass goal override: s1,s2");
}

std::string resolve_format(const std::string& path, const std::string& format) {
  if (format != "auto") return format;
  const std::string ext = fs::path(path).extension().string();
  return ext == ".xml" || ext == ".sbml" ? "sbml" : "native";
}

MetabolicModel load_model(const std::string& path, const std::string& format, const std::string& goal,
                          std::ostream& err) {
  const std::string text = read_file(path);
  std::optional<std::set<SpeciesId>> goal_override;
  if (!goal.empty()) {
    goal_override.emplace();
    for (auto& s : split_list(goal)) goal_override->insert(SpeciesId(s));
  }

  MetabolicModel model;
  std::vector<Diagnostic> diags;
  if (resolve_format(path, format) == "sbml") {
    SbmlOptions opts;
    opts.biomass_goal = goal_override;
    SbmlDocument doc = parse_sbml(text, opts);
    model = std::move(doc.model);
    diags = std::move(doc.diagnostics);
  } else {
    if (goal_override) {
      json j;
      try {
        j = json::parse(text);
      } catch (const json::parse_error& e) {
        throw ParseError(e.what());
      }
      if (j.is_object()) {
        j["biomass_goal"] = json::array();
        for (const auto& s : *goal_override) j["biomass_goal"].push_back(s.str());
      }
      model = model_from_json(j);
    } else {
      model = parse_native(text);
    }
    diags = validate(model);
  }
  for (const auto& d : diags)
    err << path << ": " << (d.severity == Severity::Error ? "error" : d.severity == Severity::Warning ? "warning" : "info")
        << ": " << (d.entity.empty() ? "" : d.entity + ": ") << d.message << '\n';
  if (has_errors(diags)) throw ValidationError(path + ": model failed validation");
  return model;
}

MetabolicModel load_model(const ModelArgs& m, std::ostream& err) { return load_model(m.path, m.format, m.goal, err); }

std::set<SpeciesId> load_medium(const std::string& path) {
  return path.empty() ? std::set<SpeciesId>{} : parse_medium(read_file(path));
}

std::set<GeneId> gene_list(const std::string& text) {
  std::set<GeneId> out;
  for (auto& g : split_list(text)) out.insert(GeneId(g));
  return out;
}

json atom_list(const std::vector<Atom>& atoms) {
  json out = json::array();
  for (const auto& a : atoms) out.push_back(to_string(a));
  return out;
}

std::string join_atoms(const std::vector<Atom>& atoms) {
  std::string out;
  for (const auto& a : atoms) out += (out.empty() ? "" : ",") + to_string(a);
  return out;
}

double clean(double v) { return v == 0.0 ? 0.0 : v; }  // no "-0" in output

// ---------------------------------------------------------------- compile

struct CompileArgs {
  ModelArgs model;
  bool clauses = false;
  std::string out;
};

int cmd_compile(const CompileArgs& a, std::ostream& out, std::ostream& err) {
  const MetabolicModel model = load_model(a.model, err);
  const LogicTheory theory = compile(model);
  Sink sink(a.out, out);
  std::ostringstream dump;
  write_clauses(dump, theory);
  const std::string stats = to_string(theory_stats(theory)) + "\n";
  if (sink.to_files() || a.clauses) sink.write("clauses.txt", dump.str(), a.clauses);
  sink.write("stats.txt", stats, true);
  sink.summary(stats.substr(0, stats.size() - 1));
  return kOk;
}

// ---------------------------------------------------------------- growth

struct GrowthArgs {
  ModelArgs model;
  std::string medium, ko, out;
};

int cmd_growth(const GrowthArgs& a, std::ostream& out, std::ostream& err) {
  const MetabolicModel model = load_model(a.model, err);
  const LogicTheory theory = compile(model);
  const auto medium = load_medium(a.medium);
  const auto ko = gene_list(a.ko);
  const GrowthVerdict v = predict_growth(theory, model, medium, ko);

  json j;
  j["verdict"] = to_string(v.verdict);
  j["medium"] = json::array();
  for (const auto& s : medium) j["medium"].push_back(s.str());
  j["knockouts"] = json::array();
  for (const auto& g : ko) j["knockouts"].push_back(g.str());
  j["goal"] = atom_list(v.goal);
  j["missing"] = atom_list(v.missing);
  j["derivation"] = json::array();
  for (const auto& step : v.derivation)
    j["derivation"].push_back({{"atom", to_string(step.atom)},
                               {"fact", step.is_fact},
                               {"tag", to_string(step.tag)},
                               {"premises", atom_list(step.premises)}});
  Sink sink(a.out, out);
  sink.write("growth.json", j.dump(2) + "\n", true);
  sink.summary(std::string(to_string(v.verdict)) + (v.missing.empty() ? "" : " missing=" + join_atoms(v.missing)));
  return kOk;
}

// ---------------------------------------------------------------- essentiality

struct EssentialityArgs {
  ModelArgs model;
  std::string medium, genes, observed, out;
  unsigned workers = 1;
  bool timings = false;
};

int cmd_essentiality(const EssentialityArgs& a, std::ostream& out, std::ostream& err) {
  const MetabolicModel model = load_model(a.model, err);
  const LogicTheory theory = compile(model);
  std::optional<std::set<GeneId>> genes;
  if (!a.genes.empty()) genes = gene_list(a.genes);
  const EssentialityReport report = essentiality_screen(theory, model, load_medium(a.medium), genes, a.workers);

  Sink sink(a.out, out);
  sink.write("essentiality.tsv", essentiality_tsv(report, a.timings), true);
  std::string line = "genes=" + std::to_string(report.genes.size()) + " essential=" + std::to_string(report.essential) +
                     " non_essential=" + std::to_string(report.non_essential);
  if (!a.observed.empty()) {
    const ConfusionMatrix cm = compare_to_observations(report, parse_essentiality_labels(read_file(a.observed)));
    auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
    json j = {{"tp", cm.tp},
              {"tn", cm.tn},
              {"fp", cm.fp},
              {"fn", cm.fn},
              {"uncompared", cm.uncompared},
              {"accuracy", num(cm.accuracy())},
              {"sensitivity", num(cm.sensitivity())},
              {"specificity", num(cm.specificity())}};
    if (sink.to_files())
      sink.write("confusion.json", j.dump(2) + "\n", false);
    else
      err << "confusion: " << j.dump() << '\n';
    line += " accuracy=" + (std::isnan(cm.accuracy()) ? std::string("nan") : std::to_string(cm.accuracy()));
  }
  sink.summary(line);
  return kOk;
}

// ---------------------------------------------------------------- abduce

struct AbduceArgs {
  ModelArgs model;
  std::string observations, kinds = "gene_function,metabolite_source,reaction_exists";
  std::string pool, genes, reactions, species, out;
  std::size_t max_card = 2;
  bool fba = false, record = false;
  std::string ledger, author, description, timestamp;
  unsigned workers = 1;
};

int cmd_abduce(const AbduceArgs& a, std::ostream& out, std::ostream& err) {
  if (a.record && a.ledger.empty()) throw UsageError("--record requires --ledger");
  const MetabolicModel model = load_model(a.model, err);
  const LogicTheory theory = compile(model);
  const ObservationSet observations(parse_observations(read_file(a.observations)));

  AbductionPolicy policy;
  for (const auto& k : split_list(a.kinds)) {
    if (k == "gene_function")
      policy.gene_function = true;
    else if (k == "metabolite_source")
      policy.metabolite_source = true;
    else if (k == "reaction_exists")
      policy.reaction_exists = true;
    else
      throw UsageError("unknown abducible kind '" + k + "'");
  }
  if (!a.genes.empty()) policy.genes = gene_list(a.genes);
  if (!a.reactions.empty()) {
    policy.reactions.emplace();
    for (auto& r : split_list(a.reactions)) policy.reactions->insert(ReactionId(r));
  }
  if (!a.species.empty()) {
    policy.species.emplace();
    for (auto& s : split_list(a.species)) policy.species->insert(SpeciesId(s));
  }
  if (!a.pool.empty()) {
    const MetabolicModel pool = load_model(a.pool, "auto", "", err);
    for (const auto& [_, r] : pool.reactions) policy.reaction_pool.push_back(r);
  }
  const std::vector<Abducible> candidates = enumerate_abducibles(model, policy);

  // Stage 1 for every false no-growth prediction; a hypothesis found for
  // several cases is reported once, at its first occurrence.
  std::vector<Hypothesis> hypotheses;
  std::set<std::vector<std::string>> seen;
  std::size_t failing = 0;
  for (const auto& o : observations.items()) {
    if (o.observed != Growth::Growth) continue;
    if (quick_verdict(theory, model, o.medium, o.knockouts) == Growth::Growth) continue;
    ++failing;
    for (auto& h : abduce(theory, model, {o.medium, o.knockouts}, candidates, a.max_card, a.workers)) {
      std::vector<std::string> key;
      for (const auto& x : h.abducibles) key.push_back(label(x));
      if (seen.insert(key).second) hypotheses.push_back(std::move(h));
    }
  }
  std::optional<FbaFilterOptions> fba;
  if (a.fba) fba.emplace();
  hypotheses = filter_hypotheses(std::move(hypotheses), theory, model, observations, fba);

  std::size_t accepted = 0, recorded = 0;
  for (const auto& h : hypotheses) accepted += h.stage2 == Stage2Status::Accepted;

  if (a.record && accepted > 0) {
    Ledger ledger = Ledger::open(a.ledger);
    const std::string ts = resolve_timestamp(a.timestamp.empty() ? std::nullopt : std::optional(a.timestamp));
    MetabolicModel state = model;
    for (const auto& h : hypotheses) {
      if (h.stage2 != Stage2Status::Accepted) continue;
      std::string labels;
      for (const auto& x : h.abducibles) labels += (labels.empty() ? "" : ", ") + label(x);
      const Changeset cs = hypothesis_changeset(state, h.abducibles);
      MetabolicModel next;
      try {
        next = apply_changeset(state, cs);
      } catch (const ChangesetError& e) {
        err << "warning: not recording {" << labels << "}: " << e.what() << '\n';
        continue;
      }
      const std::string desc = a.description.empty() ? "abduced hypothesis {" + labels + "}" : a.description;
      record_revision(ledger, state, std::nullopt, cs, RevisionReason::AbductionAccepted, desc, a.author, ts);
      state = std::move(next);
      ++recorded;
    }
  }

  Sink sink(a.out, out);
  sink.write("hypotheses.jsonl", hypothesis_report(hypotheses), true);
  sink.summary("candidates=" + std::to_string(candidates.size()) + " failing=" + std::to_string(failing) +
               " hypotheses=" + std::to_string(hypotheses.size()) + " accepted=" + std::to_string(accepted) +
               " recorded=" + std::to_string(recorded));
  return kOk;
}

// ---------------------------------------------------------------- fba

struct FbaArgs {
  ModelArgs model;
  std::string medium, ko, out;
  bool logic = false;
};

int cmd_fba(const FbaArgs& a, std::ostream& out, std::ostream& err) {
  const MetabolicModel model = load_model(a.model, err);
  const auto medium = load_medium(a.medium);
  const auto ko = gene_list(a.ko);
  const LinearProgram<double> lp = build_lp(model, medium, ko);

  LogicFbaResult result;
  if (a.logic) {
    const LogicTheory theory = compile(model);
    result = logic_constrained_fba(model, theory, medium, ko);
  } else {
    result.solution = solve_lp(lp);
  }
  const auto& sol = result.solution;
  const bool optimal = sol.status == SolveStatus::Optimal;

  json j;
  j["status"] = to_string(sol.status);
  j["objective_reaction"] = model.objective->str();
  j["objective"] = optimal ? json(clean(sol.objective_value)) : json(nullptr);
  j["residual"] = optimal ? json(clean(sol.residual)) : json(nullptr);
  j["flux"] = json::object();
  if (optimal)
    for (Eigen::Index k = 0; k < lp.num_variables(); ++k) j["flux"][lp.variable_names[k]] = clean(sol.flux[k]);
  j["logic_constrained"] = a.logic;
  j["pinned"] = json::array();
  for (const auto& r : result.pinned) j["pinned"].push_back(r.str());

  Sink sink(a.out, out);
  sink.write("fba.json", j.dump(2) + "\n", true);
  if (sink.to_files()) {
    std::ostringstream lp_text;
    write_lp_text(lp_text, lp);
    sink.write("problem.lp", lp_text.str(), false);
  }
  std::ostringstream line;
  line.precision(10);
  line << to_string(sol.status);
  if (optimal) line << " objective=" << clean(sol.objective_value);
  if (a.logic) line << " pinned=" << result.pinned.size();
  sink.summary(line.str());
  return kOk;
}

// ---------------------------------------------------------------- revise

struct ReviseArgs {
  ModelArgs model;
  std::string ledger, changes, target, reason = "CURATION", description, author, timestamp, set_version;
  std::string revision, model_id, out;
};

int cmd_revise_record(const ReviseArgs& a, std::ostream& out, std::ostream& err) {
  if (a.changes.empty() == a.target.empty()) throw UsageError("give exactly one of --changes or --target");
  const MetabolicModel model = load_model(a.model, err);
  Changeset cs;
  if (!a.changes.empty()) {
    json j;
    try {
      j = json::parse(read_file(a.changes));
    } catch (const json::parse_error& e) {
      throw ParseError(a.changes + ": " + e.what());
    }
    cs = changeset_from_json(j, "$");
  } else {
    cs = diff(model, load_model(a.target, "auto", "", err));
  }
  if (cs.empty()) throw PreconditionError("nothing to record: the changeset is empty");
  Ledger ledger = Ledger::open(a.ledger);
  const RevisionReason reason = revision_reason_from_string(a.reason);
  const auto ts = resolve_timestamp(a.timestamp.empty() ? std::nullopt : std::optional(a.timestamp));
  const auto version = a.set_version.empty() ? std::nullopt : std::optional(a.set_version);
  const RevisionRecord r = record_revision(ledger, model, std::nullopt, cs, reason, a.description, a.author, ts, version);
  Sink sink(a.out, out);
  sink.write("record.json", to_json(r).dump(2) + "\n", false);
  out << r.id << '\n';
  return kOk;
}

RevisionChain select_chain(const Ledger& ledger, const ReviseArgs& a, const std::string& fallback_model) {
  if (!a.revision.empty()) return ledger.lineage(a.revision);
  const std::string model_id = a.model_id.empty() ? fallback_model : a.model_id;
  if (model_id.empty()) throw UsageError("give --revision or --model-id");
  return ledger.history(model_id);
}

int cmd_revise_replay(const ReviseArgs& a, std::ostream& out, std::ostream& err) {
  const MetabolicModel base = load_model(a.model, err);
  if (!fs::exists(a.ledger)) throw IoError("ledger " + a.ledger + " does not exist");
  const Ledger ledger = Ledger::open(a.ledger);
  const RevisionChain chain = select_chain(ledger, a, base.id);
  const MetabolicModel result = replay(base, chain);
  Sink sink(a.out, out);
  sink.write("model.json", render_native(result), true);
  sink.summary("revisions=" + std::to_string(chain.size()) + " version=" + result.version);
  return kOk;
}

int cmd_revise_log(const ReviseArgs& a, std::ostream& out, std::ostream&) {
  if (!fs::exists(a.ledger)) throw IoError("ledger " + a.ledger + " does not exist");
  const Ledger ledger = Ledger::open(a.ledger);
  const RevisionChain chain = select_chain(ledger, a, "");
  Sink sink(a.out, out);
  sink.write("changelog.txt", export_changelog(chain), true);
  sink.summary("revisions=" + std::to_string(chain.size()));
  return kOk;
}

int cmd_revise_diff(const ReviseArgs& a, std::ostream& out, std::ostream& err) {
  if (a.target.empty()) throw UsageError("--target is required");
  const Changeset cs = diff(load_model(a.model, err), load_model(a.target, "auto", "", err));
  Sink sink(a.out, out);
  sink.write("changeset.json", to_json(cs).dump(2) + "\n", true);
  sink.summary("changes=" + std::to_string(cs.size()));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Logic reasoning over genome-scale metabolic models", "gemreason"};
  app.require_subcommand(1);

  CompileArgs compile_args;
  auto* c = app.add_subcommand("compile", "compile a model to ground Horn clauses");
  add_model_options(c, compile_args.model);
  c->add_flag("--clauses", compile_args.clauses, "print the clause dump to standard output");
  c->add_option("--out", compile_args.out, "output directory");

  GrowthArgs growth_args;
  auto* g = app.add_subcommand("growth", "predict growth under a medium and knockouts");
  add_model_options(g, growth_args.model);
  g->add_option("--medium", growth_args.medium, "medium file");
  g->add_option("--ko", growth_args.ko, "knocked-out genes: g1,g2");
  g->add_option("--out", growth_args.out, "output directory");

  EssentialityArgs ess_args;
  auto* e = app.add_subcommand("essentiality", "single-gene knockout screen");
  add_model_options(e, ess_args.model);
  e->add_option("--medium", ess_args.medium, "medium file");
  e->add_option("--genes", ess_args.genes, "restrict the screen to g1,g2");
  e->add_option("--observed", ess_args.observed, "observed essentiality labels");
  e->add_option("--workers", ess_args.workers, "worker threads")->check(CLI::PositiveNumber);
  e->add_flag("--timings", ess_args.timings, "fill the runtime_ms column");
  e->add_option("--out", ess_args.out, "output directory");

  AbduceArgs ab_args;
  auto* ab = app.add_subcommand("abduce", "two-stage abductive repair of false no-growth predictions");
  add_model_options(ab, ab_args.model);
  ab->add_option("--observations", ab_args.observations, "observation file")->required();
  ab->add_option("--kinds", ab_args.kinds, "gene_function,metabolite_source,reaction_exists");
  ab->add_option("--pool", ab_args.pool, "model whose reactions are REACTION_EXISTS candidates");
  ab->add_option("--genes", ab_args.genes, "GENE_FUNCTION gene pool");
  ab->add_option("--reactions", ab_args.reactions, "GENE_FUNCTION target reactions");
  ab->add_option("--species", ab_args.species, "METABOLITE_SOURCE species pool");
  ab->add_option("--max-card", ab_args.max_card, "largest hypothesis size");
  ab->add_flag("--fba", ab_args.fba, "reject hypotheses without biomass flux");
  ab->add_flag("--record", ab_args.record, "record ACCEPTED hypotheses in the ledger");
  ab->add_option("--ledger", ab_args.ledger, "ledger file");
  ab->add_option("--author", ab_args.author, "revision author");
  ab->add_option("--description", ab_args.description, "revision description");
  ab->add_option("--timestamp", ab_args.timestamp, "revision timestamp (ISO 8601)");
  ab->add_option("--workers", ab_args.workers, "worker threads")->check(CLI::PositiveNumber);
  ab->add_option("--out", ab_args.out, "output directory");

  FbaArgs fba_args;
  auto* f = app.add_subcommand("fba", "flux-balance analysis");
  add_model_options(f, fba_args.model);
  f->add_option("--medium", fba_args.medium, "medium file");
  f->add_option("--ko", fba_args.ko, "knocked-out genes: g1,g2");
  f->add_flag("--logic", fba_args.logic, "pin logically inactive reactions to zero flux");
  f->add_option("--out", fba_args.out, "output directory");

  ReviseArgs rv;
  auto* r = app.add_subcommand("revise", "revision ledger");
  r->require_subcommand(1);
  auto* rec = r->add_subcommand("record", "append a revision");
  add_model_options(rec, rv.model);
  rec->add_option("--ledger", rv.ledger, "ledger file")->required();
  rec->add_option("--changes", rv.changes, "changeset JSON file");
  rec->add_option("--target", rv.target, "record diff(model, target)");
  rec->add_option("--reason", rv.reason, "ABDUCTION_ACCEPTED, CURATION, EXTERNAL_UPDATE or SIMULATED")
      ->check(CLI::IsMember({"ABDUCTION_ACCEPTED", "CURATION", "EXTERNAL_UPDATE", "SIMULATED"}));
  rec->add_option("--description", rv.description, "free-text description");
  rec->add_option("--author", rv.author, "author");
  rec->add_option("--timestamp", rv.timestamp, "timestamp (ISO 8601)");
  rec->add_option("--set-version", rv.set_version, "model version after the revision");
  rec->add_option("--out", rv.out, "output directory");
  auto* rep = r->add_subcommand("replay", "rebuild a model from a base model and a chain");
  add_model_options(rep, rv.model);
  rep->add_option("--ledger", rv.ledger, "ledger file")->required();
  rep->add_option("--revision", rv.revision, "replay up to this revision");
  rep->add_option("--model-id", rv.model_id, "replay the history of this model");
  rep->add_option("--out", rv.out, "output directory");
  auto* log = r->add_subcommand("log", "print a chain as a changelog");
  log->add_option("--ledger", rv.ledger, "ledger file")->required();
  log->add_option("--revision", rv.revision, "lineage of this revision");
  log->add_option("--model-id", rv.model_id, "history of this model");
  log->add_option("--out", rv.out, "output directory");
  auto* dif = r->add_subcommand("diff", "changeset turning --model into --target");
  add_model_options(dif, rv.model);
  dif->add_option("--target", rv.target, "target model")->required();
  dif->add_option("--out", rv.out, "output directory");

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*c) return cmd_compile(compile_args, out, err);
    if (*g) return cmd_growth(growth_args, out, err);
    if (*e) return cmd_essentiality(ess_args, out, err);
    if (*ab) return cmd_abduce(ab_args, out, err);
    if (*f) return cmd_fba(fba_args, out, err);
    if (*rec) return cmd_revise_record(rv, out, err);
    if (*rep) return cmd_revise_replay(rv, out, err);
    if (*log) return cmd_revise_log(rv, out, err);
    if (*dif) return cmd_revise_diff(rv, out, err);
  } catch (const ParseError& ex) {
    err << "parse error: " << ex.what() << '\n';
    return kParse;
  } catch (const ValidationError& ex) {
    err << "validation error: " << ex.what() << '\n';
    return kValidation;
  } catch (const DnfLimitError& ex) {
    err << "validation error: " << ex.what() << '\n';
    return kValidation;
  } catch (const QueryError& ex) {
    err << "query error: " << ex.what() << '\n';
    return kQuery;
  } catch (const PreconditionError& ex) {
    err << "precondition failed: " << ex.what() << '\n';
    return kPrecondition;
  } catch (const LedgerError& ex) {
    err << "ledger error: " << ex.what() << '\n';
    return kLedger;
  } catch (const UsageError& ex) {
    err << "usage: " << ex.what() << '\n';
    return kUsage;
  } catch (const IoError& ex) {
    err << "i/o error: " << ex.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& ex) {
    err << "i/o error: " << ex.what() << '\n';
    return kIo;
  } catch (const nlohmann::json::exception& ex) {
    err << "parse error: " << ex.what() << '\n';
    return kParse;
  }
  return kUsage;
}

}  // namespace gemreason::cli
