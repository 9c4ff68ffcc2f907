#pragma once

#include <map>
#include <set>
#include <string_view>

#include "gemreason/abduction.hpp"

namespace gemreason {

// Line-oriented query files. `#` starts a comment; blank lines are skipped.
// Malformed lines throw ParseError with the line number.

/// One species id per line.
std::set<SpeciesId> parse_medium(std::string_view text);

/// `GROWTH|NO_GROWTH medium=s1,s2 [ko=g1,g2]` per line.
std::vector<Observation> parse_observations(std::string_view text);

/// `gene_id ESSENTIAL|NON_ESSENTIAL` per line.
std::map<GeneId, Essentiality> parse_essentiality_labels(std::string_view text);

/// Splits `a,b,c`; empty fields are dropped.
std::vector<std::string> split_list(std::string_view text);

}  // namespace gemreason
