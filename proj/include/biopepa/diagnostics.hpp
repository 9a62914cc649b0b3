#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace biopepa {

/// Position of a construct in a model document. Lines and columns are 1-based.
struct SourceSpan {
  std::string file;
  int line = 0;
  int column = 0;
  int length = 0;

  bool known() const { return line > 0; }
  std::string str() const {
    if (!known()) return file.empty() ? std::string("<unknown>") : file;
    return file + ":" + std::to_string(line) + ":" + std::to_string(column);
  }
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;

  std::string str() const {
    std::string s = severity == Severity::Error ? "error: " : "warning: ";
    if (span.known()) s = span.str() + ": " + s;
    return s + message;
  }
};

inline int count_errors(const std::vector<Diagnostic>& ds) {
  int n = 0;
  for (const auto& d : ds)
    if (d.severity == Severity::Error) ++n;
  return n;
}

/// Malformed model text. Carries the offending span and the token classes
/// the parser would have accepted there.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, SourceSpan span, std::vector<std::string> expected = {})
      : std::runtime_error(span.known() ? span.str() + ": " + message : message),
        span_(std::move(span)),
        expected_(std::move(expected)) {}

  const SourceSpan& span() const { return span_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  SourceSpan span_;
  std::vector<std::string> expected_;
};

/// Semantic failure while assembling a network or a CTMC.
class BuildError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numeric failure while evaluating a rate or reward expression.
class EvalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// State-space cap exceeded during CTMC construction. Carries how far the
/// exploration got, so callers can report partial statistics.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(const std::string& message, long long states_explored)
      : std::runtime_error(message), states_explored_(states_explored) {}
  long long states_explored() const { return states_explored_; }

 private:
  long long states_explored_;
};

}  // namespace biopepa
