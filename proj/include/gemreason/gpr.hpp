#pragma once

#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gemreason/ids.hpp"

namespace gemreason {

/// Gene-protein-reaction rule: an AND/OR tree over genes, or None for a
/// spontaneous reaction. AND nodes are complexes, OR nodes are isoenzymes.
class GprExpr {
 public:
  enum class Kind { None, Gene, And, Or };

  GprExpr() = default;  // None

  static GprExpr none() { return {}; }
  static GprExpr gene(GeneId id);
  static GprExpr all_of(std::vector<GprExpr> children);
  static GprExpr any_of(std::vector<GprExpr> children);

  Kind kind() const noexcept { return kind_; }
  bool is_spontaneous() const noexcept { return kind_ == Kind::None; }
  const GeneId& gene_id() const noexcept { return gene_; }
  const std::vector<GprExpr>& children() const noexcept { return children_; }

  /// AND/OR semantics; None evaluates true.
  bool evaluate(const std::function<bool(const GeneId&)>& present) const;

  void collect_genes(std::set<GeneId>& out) const;
  std::set<GeneId> genes() const;

  /// Number of None nodes sitting below an operator (always an invariant violation).
  std::size_t nested_none_count() const;

  friend bool operator==(const GprExpr&, const GprExpr&) = default;

 private:
  Kind kind_ = Kind::None;
  GeneId gene_;
  std::vector<GprExpr> children_;
};

/// Canonical text form: `g1 or (g2 and g3)`; None renders as the empty string.
std::string to_string(const GprExpr& expr);

/// Parses the text form produced by `to_string` (and/or case-insensitive,
/// `and` binds tighter than `or`). Blank input yields None.
GprExpr parse_gpr(std::string_view text);

using GeneSet = std::vector<GeneId>;  // sorted, unique

/// Disjunctive normal form of a GPR. Each term is one isoenzyme; its genes
/// are the complex members. Spontaneous reactions have no terms.
struct GeneDnf {
  bool spontaneous = false;
  std::vector<GeneSet> terms;

  friend bool operator==(const GeneDnf&, const GeneDnf&) = default;
};

inline constexpr std::size_t kDefaultDnfCap = 1024;

/// Minimal DNF with absorption applied, ordered by term size then
/// lexicographically. Throws DnfLimitError beyond `cap` terms.
GeneDnf gpr_to_dnf(const GprExpr& expr, std::size_t cap = kDefaultDnfCap);

}  // namespace gemreason
