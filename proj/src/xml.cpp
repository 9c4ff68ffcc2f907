#include "gemreason/xml.hpp"

#include <cctype>

#include "gemreason/errors.hpp"

namespace gemreason::xml {

std::string_view Element::prefix() const {
  auto colon = name.find(':');
  return colon == std::string::npos ? std::string_view{} : std::string_view(name).substr(0, colon);
}

std::string_view Element::local_name() const {
  auto colon = name.find(':');
  return colon == std::string::npos ? std::string_view(name) : std::string_view(name).substr(colon + 1);
}

std::string Element::resolve_prefix(std::string_view pfx) const {
  const std::string key = pfx.empty() ? "xmlns" : "xmlns:" + std::string(pfx);
  for (const Element* e = this; e; e = e->parent) {
    auto it = e->attributes.find(key);
    if (it != e->attributes.end()) return it->second;
  }
  return {};
}

std::string Element::namespace_uri() const { return resolve_prefix(prefix()); }

const std::string* Element::attribute(const std::string& qname) const {
  auto it = attributes.find(qname);
  return it == attributes.end() ? nullptr : &it->second;
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view doc) : doc_(doc) {}

  std::unique_ptr<Element> run() {
    std::unique_ptr<Element> root;
    while (true) {
      skip_misc();
      if (eof()) break;
      if (!starts_with("<")) fail("text outside the root element");
      if (root) fail("more than one root element");
      root = read_element(nullptr);
    }
    if (!root) fail("document has no root element");
    return root;
  }

 private:
  bool eof() const { return pos_ >= doc_.size(); }
  bool starts_with(std::string_view s) const { return doc_.substr(pos_, s.size()) == s; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < doc_.size(); ++i, ++pos_)
      if (doc_[pos_] == '\n') ++line_;
  }

  [[noreturn]] void fail(const std::string& what, const std::string& element = {}) const {
    throw ParseError("malformed XML: " + what, line_, element);
  }

  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(doc_[pos_]))) advance();
  }

  void skip_until(std::string_view terminator) {
    auto end = doc_.find(terminator, pos_);
    if (end == std::string_view::npos) fail("unterminated construct, expected '" + std::string(terminator) + "'");
    advance(end + terminator.size() - pos_);
  }

  /// Skips whitespace, comments, PIs and DOCTYPE between markup.
  void skip_misc() {
    while (true) {
      skip_ws();
      if (starts_with("<?")) skip_until("?>");
      else if (starts_with("<!--")) skip_until("-->");
      else if (starts_with("<!DOCTYPE")) skip_until(">");
      else return;
    }
  }

  std::string read_name() {
    std::size_t start = pos_;
    while (!eof()) {
      char c = doc_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '-' || c == '.' ||
          static_cast<unsigned char>(c) >= 0x80)
        advance();
      else
        break;
    }
    if (start == pos_) fail("expected a name");
    return std::string(doc_.substr(start, pos_ - start));
  }

  std::string decode(std::string_view raw) {
    std::string out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out += raw[i];
        continue;
      }
      auto semi = raw.find(';', i);
      if (semi == std::string_view::npos) fail("unterminated entity reference");
      std::string_view ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "lt") out += '<';
      else if (ent == "gt") out += '>';
      else if (ent == "amp") out += '&';
      else if (ent == "quot") out += '"';
      else if (ent == "apos") out += '\'';
      else if (!ent.empty() && ent[0] == '#') {
        unsigned long code = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X')
                                 ? std::stoul(std::string(ent.substr(2)), nullptr, 16)
                                 : std::stoul(std::string(ent.substr(1)), nullptr, 10);
        if (code < 0x80) out += static_cast<char>(code);
        else if (code < 0x800) {
          out += static_cast<char>(0xC0 | (code >> 6));
          out += static_cast<char>(0x80 | (code & 0x3F));
        } else {
          out += static_cast<char>(0xE0 | (code >> 12));
          out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
          out += static_cast<char>(0x80 | (code & 0x3F));
        }
      } else {
        fail("unknown entity '&" + std::string(ent) + ";'");
      }
      i = semi;
    }
    return out;
  }

  std::unique_ptr<Element> read_element(const Element* parent) {
    auto el = std::make_unique<Element>();
    el->line = line_;
    el->parent = parent;
    advance();  // '<'
    el->name = read_name();
    while (true) {
      skip_ws();
      if (eof()) fail("unterminated start tag", el->name);
      if (starts_with("/>")) {
        advance(2);
        return el;
      }
      if (starts_with(">")) {
        advance();
        break;
      }
      std::string attr = read_name();
      skip_ws();
      if (!starts_with("=")) fail("expected '=' after attribute '" + attr + "'", el->name);
      advance();
      skip_ws();
      if (eof() || (doc_[pos_] != '"' && doc_[pos_] != '\'')) fail("expected quoted attribute value", el->name);
      char quote = doc_[pos_];
      advance();
      auto end = doc_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated attribute value", el->name);
      std::string value = decode(doc_.substr(pos_, end - pos_));
      advance(end + 1 - pos_);
      if (!el->attributes.emplace(attr, std::move(value)).second)
        fail("duplicate attribute '" + attr + "'", el->name);
    }
    // content
    while (true) {
      if (eof()) fail("missing end tag", el->name);
      if (starts_with("</")) {
        advance(2);
        std::string closing = read_name();
        if (closing != el->name) fail("end tag </" + closing + "> does not match", el->name);
        skip_ws();
        if (!starts_with(">")) fail("expected '>'", el->name);
        advance();
        return el;
      }
      if (starts_with("<!--")) skip_until("-->");
      else if (starts_with("<![CDATA[")) skip_until("]]>");
      else if (starts_with("<?")) skip_until("?>");
      else if (starts_with("<")) el->children.push_back(read_element(el.get()));
      else advance();
    }
  }

  std::string_view doc_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

}  // namespace

std::unique_ptr<Element> parse(std::string_view document) { return Reader(document).run(); }

}  // namespace gemreason::xml
