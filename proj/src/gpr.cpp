#include "gemreason/gpr.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "gemreason/errors.hpp"

namespace gemreason {

GprExpr GprExpr::gene(GeneId id) {
  GprExpr e;
  e.kind_ = Kind::Gene;
  e.gene_ = std::move(id);
  return e;
}

GprExpr GprExpr::all_of(std::vector<GprExpr> children) {
  if (children.size() == 1) return std::move(children.front());
  GprExpr e;
  e.kind_ = Kind::And;
  e.children_ = std::move(children);
  return e;
}

GprExpr GprExpr::any_of(std::vector<GprExpr> children) {
  if (children.size() == 1) return std::move(children.front());
  GprExpr e;
  e.kind_ = Kind::Or;
  e.children_ = std::move(children);
  return e;
}

bool GprExpr::evaluate(const std::function<bool(const GeneId&)>& present) const {
  switch (kind_) {
    case Kind::None:
      return true;
    case Kind::Gene:
      return present(gene_);
    case Kind::And:
      return std::all_of(children_.begin(), children_.end(),
                         [&](const GprExpr& c) { return c.evaluate(present); });
    case Kind::Or:
      return std::any_of(children_.begin(), children_.end(),
                         [&](const GprExpr& c) { return c.evaluate(present); });
  }
  return false;
}

void GprExpr::collect_genes(std::set<GeneId>& out) const {
  if (kind_ == Kind::Gene) out.insert(gene_);
  for (const auto& c : children_) c.collect_genes(out);
}

std::set<GeneId> GprExpr::genes() const {
  std::set<GeneId> out;
  collect_genes(out);
  return out;
}

std::size_t GprExpr::nested_none_count() const {
  std::size_t n = 0;
  for (const auto& c : children_) {
    if (c.kind_ == Kind::None) ++n;
    n += c.nested_none_count();
  }
  return n;
}

namespace {

void render(const GprExpr& e, std::string& out, bool nested) {
  switch (e.kind()) {
    case GprExpr::Kind::None:
      return;
    case GprExpr::Kind::Gene:
      out += e.gene_id().str();
      return;
    case GprExpr::Kind::And:
    case GprExpr::Kind::Or: {
      const char* op = e.kind() == GprExpr::Kind::And ? " and " : " or ";
      if (nested) out += '(';
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        if (i) out += op;
        render(e.children()[i], out, true);
      }
      if (nested) out += ')';
      return;
    }
  }
}

class GprParser {
 public:
  explicit GprParser(std::string_view text) : text_(text) {}

  GprExpr parse() {
    skip_ws();
    if (pos_ == text_.size()) return GprExpr::none();
    GprExpr e = parse_or();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  GprExpr parse_or() {
    std::vector<GprExpr> terms{parse_and()};
    while (accept_keyword("or")) terms.push_back(parse_and());
    return GprExpr::any_of(std::move(terms));
  }

  GprExpr parse_and() {
    std::vector<GprExpr> factors{parse_atom()};
    while (accept_keyword("and")) factors.push_back(parse_atom());
    return GprExpr::all_of(std::move(factors));
  }

  GprExpr parse_atom() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      GprExpr inner = parse_or();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    std::string_view word = peek_word();
    if (word.empty()) fail("expected gene identifier");
    if (is_keyword(word, "and") || is_keyword(word, "or")) fail("operator without operand");
    pos_ += word.size();
    return GprExpr::gene(GeneId{word});
  }

  bool accept_keyword(std::string_view kw) {
    skip_ws();
    std::string_view word = peek_word();
    if (!is_keyword(word, kw)) return false;
    pos_ += word.size();
    return true;
  }

  std::string_view peek_word() const {
    std::size_t end = pos_;
    while (end < text_.size() && !std::isspace(static_cast<unsigned char>(text_[end])) &&
           text_[end] != '(' && text_[end] != ')')
      ++end;
    return text_.substr(pos_, end - pos_);
  }

  static bool is_keyword(std::string_view word, std::string_view kw) {
    if (word.size() != kw.size()) return false;
    for (std::size_t i = 0; i < word.size(); ++i)
      if (std::tolower(static_cast<unsigned char>(word[i])) != kw[i]) return false;
    return true;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("GPR '" + std::string(text_) + "' at offset " + std::to_string(pos_) +
                     ": " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

using Terms = std::vector<GeneSet>;

bool is_subset(const GeneSet& small, const GeneSet& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

bool canonical_less(const GeneSet& a, const GeneSet& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

/// Drops duplicates and supersets; result in canonical order.
Terms absorb(Terms terms) {
  std::sort(terms.begin(), terms.end(), canonical_less);
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  Terms kept;
  for (auto& t : terms) {
    bool absorbed = std::any_of(kept.begin(), kept.end(),
                                [&](const GeneSet& k) { return is_subset(k, t); });
    if (!absorbed) kept.push_back(std::move(t));
  }
  return kept;
}

void check_cap(const Terms& terms, std::size_t cap) {
  if (terms.size() > cap)
    throw DnfLimitError("GPR expands to " + std::to_string(terms.size()) +
                        " disjuncts, above the cap of " + std::to_string(cap));
}

Terms to_terms(const GprExpr& e, std::size_t cap) {
  switch (e.kind()) {
    case GprExpr::Kind::None:
      throw std::invalid_argument("spontaneous marker below a GPR operator");
    case GprExpr::Kind::Gene:
      return {GeneSet{e.gene_id()}};
    case GprExpr::Kind::Or: {
      Terms all;
      for (const auto& c : e.children()) {
        Terms sub = to_terms(c, cap);
        all.insert(all.end(), std::make_move_iterator(sub.begin()),
                   std::make_move_iterator(sub.end()));
      }
      Terms out = absorb(std::move(all));
      check_cap(out, cap);
      return out;
    }
    case GprExpr::Kind::And: {
      if (e.children().empty()) throw std::invalid_argument("empty AND in GPR");
      Terms acc{GeneSet{}};
      for (const auto& c : e.children()) {
        Terms rhs = to_terms(c, cap);
        Terms product;
        product.reserve(acc.size() * rhs.size());
        for (const auto& a : acc) {
          for (const auto& b : rhs) {
            GeneSet merged;
            std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged));
            product.push_back(std::move(merged));
          }
        }
        acc = absorb(std::move(product));
        check_cap(acc, cap);
      }
      return acc;
    }
  }
  return {};
}

}  // namespace

std::string to_string(const GprExpr& expr) {
  std::string out;
  render(expr, out, false);
  return out;
}

GprExpr parse_gpr(std::string_view text) { return GprParser(text).parse(); }

GeneDnf gpr_to_dnf(const GprExpr& expr, std::size_t cap) {
  GeneDnf dnf;
  if (expr.is_spontaneous()) {
    dnf.spontaneous = true;
    return dnf;
  }
  if (expr.kind() == GprExpr::Kind::Or && expr.children().empty())
    throw std::invalid_argument("empty OR in GPR");
  dnf.terms = to_terms(expr, cap);
  return dnf;
}

}  // namespace gemreason
