#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gemreason {

/// Malformed input document. `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line = 0, std::string element = {})
      : std::runtime_error(format(message, line, element)),
        line_(line),
        element_(std::move(element)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& element() const noexcept { return element_; }

 private:
  static std::string format(const std::string& message, std::size_t line,
                            const std::string& element) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!element.empty()) out += "<" + element + "> ";
    return out + message;
  }

  std::size_t line_;
  std::string element_;
};

/// Model fails one of its structural invariants.
class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// GPR normalisation exceeded the configured disjunct cap.
class DnfLimitError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Medium, knockout or observation refers to something the model does not allow.
class QueryError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operation invoked outside its defined domain (e.g. screening a non-growing wild type).
class PreconditionError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class LedgerError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gemreason
