#include "gemreason/query_files.hpp"

#include <sstream>
#include <string>

#include "gemreason/errors.hpp"

namespace gemreason {

namespace {

/// Calls `fn(line_number, fields)` for every non-blank, non-comment line.
template <class Fn>
void for_each_line(std::string_view text, Fn fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream in(line);
    std::vector<std::string> fields;
    for (std::string f; in >> f;) fields.push_back(f);
    if (!fields.empty()) fn(line_no, fields);
    if (end == text.size()) break;
  }
}

}  // namespace

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    if (end > pos) out.emplace_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

std::set<SpeciesId> parse_medium(std::string_view text) {
  std::set<SpeciesId> out;
  for_each_line(text, [&](std::size_t n, const std::vector<std::string>& f) {
    if (f.size() != 1) throw ParseError("expected one species id per line", n);
    out.insert(SpeciesId(f[0]));
  });
  return out;
}

std::vector<Observation> parse_observations(std::string_view text) {
  std::vector<Observation> out;
  for_each_line(text, [&](std::size_t n, const std::vector<std::string>& f) {
    Observation o;
    if (f[0] == "GROWTH")
      o.observed = Growth::Growth;
    else if (f[0] == "NO_GROWTH")
      o.observed = Growth::NoGrowth;
    else
      throw ParseError("expected GROWTH or NO_GROWTH, got '" + f[0] + "'", n);
    bool has_medium = false;
    for (std::size_t i = 1; i < f.size(); ++i) {
      if (f[i].rfind("medium=", 0) == 0 && !has_medium) {
        has_medium = true;
        for (auto& s : split_list(std::string_view(f[i]).substr(7))) o.medium.insert(SpeciesId(s));
      } else if (f[i].rfind("ko=", 0) == 0 && o.knockouts.empty()) {
        for (auto& g : split_list(std::string_view(f[i]).substr(3))) o.knockouts.insert(GeneId(g));
      } else {
        throw ParseError("unexpected field '" + f[i] + "'", n);
      }
    }
    if (!has_medium) throw ParseError("missing medium= field", n);
    out.push_back(std::move(o));
  });
  return out;
}

std::map<GeneId, Essentiality> parse_essentiality_labels(std::string_view text) {
  std::map<GeneId, Essentiality> out;
  for_each_line(text, [&](std::size_t n, const std::vector<std::string>& f) {
    if (f.size() != 2) throw ParseError("expected '<gene> ESSENTIAL|NON_ESSENTIAL'", n);
    Essentiality e;
    if (f[1] == "ESSENTIAL")
      e = Essentiality::Essential;
    else if (f[1] == "NON_ESSENTIAL")
      e = Essentiality::NonEssential;
    else
      throw ParseError("unknown label '" + f[1] + "'", n);
    if (!out.emplace(GeneId(f[0]), e).second) throw ParseError("duplicate gene '" + f[0] + "'", n);
  });
  return out;
}

}  // namespace gemreason
