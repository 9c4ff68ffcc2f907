#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gemreason/changeset.hpp"

namespace gemreason {

enum class RevisionReason { AbductionAccepted, Curation, ExternalUpdate, Simulated };

const char* to_string(RevisionReason r) noexcept;
RevisionReason revision_reason_from_string(const std::string& s);

struct RevisionRecord {
  std::string id;
  std::optional<std::string> parent;
  std::string model_id;
  std::string version;  // model version after this revision
  Changeset changes;
  RevisionReason reason = RevisionReason::Curation;
  std::string description;
  std::string author;
  std::string timestamp;  // ISO 8601, UTC; not part of the id

  friend bool operator==(const RevisionRecord&, const RevisionRecord&) = default;
};

using RevisionChain = std::vector<RevisionRecord>;

/// sha256(parent id + "\n" + compact changeset JSON); the root uses an empty parent.
std::string revision_id(const std::optional<std::string>& parent, const Changeset& changes);

nlohmann::json to_json(const RevisionRecord& r);
RevisionRecord revision_record_from_json(const nlohmann::json& j, const std::string& path);

/// Append-only record store. When opened on a file, every append is written
/// through (O_APPEND + fsync); the index lives in memory.
class Ledger {
 public:
  Ledger() = default;

  /// Loads (or, if missing, prepares) a newline-delimited ledger file.
  static Ledger open(const std::filesystem::path& path);

  /// Checks id, parent linkage and the root rule, then appends.
  RevisionRecord append(RevisionRecord record);

  const std::vector<RevisionRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  const RevisionRecord* find(const std::string& id) const;
  /// Most recently appended record of a model.
  const RevisionRecord* head(const std::string& model_id) const;

  /// Root to `id`. Throws LedgerError for an unknown id.
  RevisionChain lineage(const std::string& id) const;
  /// Root to the model's head. Throws LedgerError for an unknown model.
  RevisionChain history(const std::string& model_id) const;

  /// The whole ledger as file content.
  std::string serialize() const;
  /// Writes to a temporary sibling and renames it into place.
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<RevisionRecord> records_;
  std::map<std::string, std::size_t> by_id_;
  std::map<std::string, std::size_t> heads_;
  std::optional<std::filesystem::path> file_;
};

/// Builds a record on top of `parent` (the model's head when unset and the
/// model has records; a root otherwise), checks that the changeset applies
/// cleanly to `parent_state`, and appends it.
RevisionRecord record_revision(Ledger& ledger, const MetabolicModel& parent_state,
                               const std::optional<std::string>& parent, const Changeset& changes,
                               RevisionReason reason, const std::string& description,
                               const std::string& author, const std::string& timestamp,
                               const std::optional<std::string>& version = std::nullopt);

/// Folds apply_changeset over a root-first chain, setting the version of
/// each record. Throws LedgerError on broken linkage or a failing revision.
MetabolicModel replay(const MetabolicModel& base, const RevisionChain& chain);

/// Human-readable changelog, newest record last.
std::string export_changelog(const RevisionChain& chain);

/// `--timestamp` value, else SOURCE_DATE_EPOCH, else the wall clock; ISO 8601 UTC.
std::string resolve_timestamp(const std::optional<std::string>& explicit_value);

}  // namespace gemreason
