#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace gemreason::xml {

/// Minimal element tree: enough XML for SBML documents. Text content is
/// dropped; comments, processing instructions, CDATA and DOCTYPE are skipped.
struct Element {
  std::string name;  // qualified name as written, e.g. "fbc:and"
  std::map<std::string, std::string> attributes;
  std::vector<std::unique_ptr<Element>> children;
  std::size_t line = 0;
  const Element* parent = nullptr;

  std::string_view prefix() const;
  std::string_view local_name() const;
  /// Namespace URI bound to this element's prefix, searching ancestors.
  std::string namespace_uri() const;
  /// Namespace URI bound to `prefix` in scope at this element.
  std::string resolve_prefix(std::string_view prefix) const;

  const std::string* attribute(const std::string& qname) const;
};

/// Throws ParseError (with line) on malformed input.
std::unique_ptr<Element> parse(std::string_view document);

}  // namespace gemreason::xml
