#include "gemreason/ledger.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include "gemreason/hash.hpp"

namespace gemreason {

using nlohmann::json;

namespace {

constexpr std::array<const char*, 4> kReasonNames{"ABDUCTION_ACCEPTED", "CURATION", "EXTERNAL_UPDATE",
                                                  "SIMULATED"};

std::string read_string(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key) || !j[key].is_string()) throw ParseError(path + "." + key + ": expected a string");
  return j[key].get<std::string>();
}

void write_all(int fd, const std::string& data, const std::string& what) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw LedgerError("cannot write " + what + ": " + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

}  // namespace

const char* to_string(RevisionReason r) noexcept { return kReasonNames[static_cast<std::size_t>(r)]; }

RevisionReason revision_reason_from_string(const std::string& s) {
  for (std::size_t i = 0; i < kReasonNames.size(); ++i)
    if (s == kReasonNames[i]) return static_cast<RevisionReason>(i);
  throw ParseError("unknown revision reason '" + s + "'");
}

std::string revision_id(const std::optional<std::string>& parent, const Changeset& changes) {
  return sha256_hex(parent.value_or("") + "\n" + to_json(changes).dump());
}

json to_json(const RevisionRecord& r) {
  return {{"id", r.id},
          {"parent", r.parent ? json(*r.parent) : json(nullptr)},
          {"model_id", r.model_id},
          {"version", r.version},
          {"changes", to_json(r.changes)},
          {"reason", to_string(r.reason)},
          {"description", r.description},
          {"author", r.author},
          {"timestamp", r.timestamp}};
}

RevisionRecord revision_record_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path + ": expected an object");
  RevisionRecord r;
  r.id = read_string(j, "id", path);
  if (!j.contains("parent")) throw ParseError(path + ".parent: missing");
  if (!j["parent"].is_null()) r.parent = read_string(j, "parent", path);
  r.model_id = read_string(j, "model_id", path);
  r.version = read_string(j, "version", path);
  if (!j.contains("changes")) throw ParseError(path + ".changes: missing");
  r.changes = changeset_from_json(j["changes"], path + ".changes");
  r.reason = revision_reason_from_string(read_string(j, "reason", path));
  r.description = read_string(j, "description", path);
  r.author = read_string(j, "author", path);
  r.timestamp = read_string(j, "timestamp", path);
  return r;
}

Ledger Ledger::open(const std::filesystem::path& path) {
  Ledger ledger;
  std::ifstream in(path, std::ios::binary);
  if (in) {
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (line.empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what(), n);
      }
      try {
        ledger.append(revision_record_from_json(j, "$"));
      } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), n);
      } catch (const LedgerError& e) {
        throw LedgerError(path.string() + ":" + std::to_string(n) + ": " + e.what());
      }
    }
  } else if (std::filesystem::exists(path)) {
    throw LedgerError("cannot read ledger " + path.string());
  }
  ledger.file_ = path;
  return ledger;
}

RevisionRecord Ledger::append(RevisionRecord record) {
  if (record.changes.empty()) throw LedgerError("revision has an empty changeset");
  if (record.model_id.empty()) throw LedgerError("revision has no model id");
  const std::string expected = revision_id(record.parent, record.changes);
  if (record.id != expected) throw LedgerError("revision id " + record.id + " does not match its content");
  if (by_id_.count(record.id)) throw LedgerError("revision " + record.id + " is already recorded");
  if (record.parent) {
    const RevisionRecord* p = find(*record.parent);
    if (!p) throw LedgerError("unknown parent revision " + *record.parent);
    if (p->model_id != record.model_id)
      throw LedgerError("parent revision " + *record.parent + " belongs to model " + p->model_id);
  } else if (heads_.count(record.model_id)) {
    throw LedgerError("model " + record.model_id + " already has a root revision");
  }

  if (file_) {
    const std::string line = to_json(record).dump() + "\n";
    const int fd = ::open(file_->c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) throw LedgerError("cannot open ledger " + file_->string() + ": " + std::strerror(errno));
    try {
      write_all(fd, line, file_->string());
    } catch (...) {
      ::close(fd);
      throw;
    }
    const bool synced = ::fsync(fd) == 0;
    ::close(fd);
    if (!synced) throw LedgerError("cannot sync ledger " + file_->string());
  }

  const std::size_t pos = records_.size();
  by_id_.emplace(record.id, pos);
  heads_[record.model_id] = pos;
  records_.push_back(std::move(record));
  return records_.back();
}

const RevisionRecord* Ledger::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &records_[it->second];
}

const RevisionRecord* Ledger::head(const std::string& model_id) const {
  auto it = heads_.find(model_id);
  return it == heads_.end() ? nullptr : &records_[it->second];
}

RevisionChain Ledger::lineage(const std::string& id) const {
  const RevisionRecord* r = find(id);
  if (!r) throw LedgerError("unknown revision " + id);
  RevisionChain chain;
  // Parents are always appended before children, so this terminates.
  while (r) {
    chain.push_back(*r);
    r = r->parent ? find(*r->parent) : nullptr;
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

RevisionChain Ledger::history(const std::string& model_id) const {
  const RevisionRecord* h = head(model_id);
  if (!h) throw LedgerError("no revisions for model " + model_id);
  return lineage(h->id);
}

std::string Ledger::serialize() const {
  std::string out;
  for (const auto& r : records_) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

void Ledger::save(const std::filesystem::path& path) const {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw LedgerError("cannot write " + tmp.string() + ": " + std::strerror(errno));
  try {
    write_all(fd, serialize(), tmp.string());
  } catch (...) {
    ::close(fd);
    throw;
  }
  const bool synced = ::fsync(fd) == 0;
  ::close(fd);
  if (!synced) throw LedgerError("cannot sync " + tmp.string());
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw LedgerError("cannot rename into " + path.string() + ": " + ec.message());
}

RevisionRecord record_revision(Ledger& ledger, const MetabolicModel& parent_state,
                               const std::optional<std::string>& parent, const Changeset& changes,
                               RevisionReason reason, const std::string& description,
                               const std::string& author, const std::string& timestamp,
                               const std::optional<std::string>& version) {
  RevisionRecord r;
  r.model_id = parent_state.id;
  r.parent = parent;
  if (!r.parent)
    if (const RevisionRecord* h = ledger.head(parent_state.id)) r.parent = h->id;
  apply_changeset(parent_state, changes);  // throws ChangesetError when it does not apply
  r.changes = changes;
  r.version = version.value_or(parent_state.version);
  r.reason = reason;
  r.description = description;
  r.author = author;
  r.timestamp = timestamp;
  r.id = revision_id(r.parent, r.changes);
  return ledger.append(std::move(r));
}

MetabolicModel replay(const MetabolicModel& base, const RevisionChain& chain) {
  MetabolicModel model = base;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const RevisionRecord& r = chain[i];
    const std::optional<std::string> expected =
        i == 0 ? std::nullopt : std::optional<std::string>(chain[i - 1].id);
    if (r.parent != expected)
      throw LedgerError("revision " + r.id + ": parent does not match its predecessor in the chain");
    try {
      model = apply_changeset(model, r.changes);
    } catch (const LedgerError& e) {
      throw LedgerError("revision " + r.id + ": " + e.what());
    }
    model.version = r.version;
  }
  return model;
}

std::string export_changelog(const RevisionChain& chain) {
  std::ostringstream os;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const RevisionRecord& r = chain[i];
    if (i) os << '\n';
    os << "revision " << r.id << '\n'
       << "parent   " << r.parent.value_or("-") << '\n'
       << "model    " << r.model_id << ' ' << r.version << '\n'
       << "reason   " << to_string(r.reason) << '\n'
       << "author   " << r.author << '\n'
       << "date     " << r.timestamp << '\n';
    if (!r.description.empty()) os << "\n    " << r.description << '\n';
    os << '\n';
    for (const auto& c : r.changes) os << "  " << to_string(c.verb) << ' ' << to_string(c.kind) << ' ' << c.entity << '\n';
  }
  return os.str();
}

std::string resolve_timestamp(const std::optional<std::string>& explicit_value) {
  if (explicit_value) return *explicit_value;
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (*end != '\0' || v < 0) throw QueryError("SOURCE_DATE_EPOCH is not a non-negative integer");
    t = static_cast<std::time_t>(v);
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace gemreason
