#pragma once

#include <compare>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace gemreason {

/// Opaque, case-sensitive identifier. Comparison is exact byte equality;
/// the tag only keeps species ids from being passed where gene ids belong.
template <typename Tag>
class Identifier {
 public:
  Identifier() = default;
  explicit Identifier(std::string value) : value_(std::move(value)) {}
  explicit Identifier(std::string_view value) : value_(value) {}
  explicit Identifier(const char* value) : value_(value) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const Identifier&, const Identifier&) = default;
  friend bool operator==(const Identifier&, const Identifier&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Identifier& id) {
    return os << id.value_;
  }

 private:
  std::string value_;
};

struct CompartmentTag {};
struct SpeciesTag {};
struct ReactionTag {};
struct GeneTag {};

using CompartmentId = Identifier<CompartmentTag>;
using SpeciesId = Identifier<SpeciesTag>;
using ReactionId = Identifier<ReactionTag>;
using GeneId = Identifier<GeneTag>;

}  // namespace gemreason

template <typename Tag>
struct std::hash<gemreason::Identifier<Tag>> {
  std::size_t operator()(const gemreason::Identifier<Tag>& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
