#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace aisette {

// Half-open byte range into a source buffer, plus the 1-based line/column
// of its start for human-readable output.
struct Span {
  uint32_t begin = 0;
  uint32_t end = 0;
  uint32_t line = 1;
  uint32_t col = 1;

  bool valid_in(size_t source_len) const {
    return begin <= end && end <= source_len;
  }
};

enum class Severity { Error, Warning, Note };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;     // stable machine id, e.g. "lex-missing-suffix"
  std::string message;
  Span span;
};

class DiagnosticList {
 public:
  void error(std::string code, std::string message, Span span) {
    items_.push_back({Severity::Error, std::move(code), std::move(message), span});
  }
  void warning(std::string code, std::string message, Span span) {
    items_.push_back({Severity::Warning, std::move(code), std::move(message), span});
  }

  bool has_errors() const {
    for (const auto& d : items_) {
      if (d.severity == Severity::Error) return true;
    }
    return false;
  }
  bool empty() const { return items_.empty(); }
  size_t size() const { return items_.size(); }
  const std::vector<Diagnostic>& items() const { return items_; }
  void append(const DiagnosticList& other) {
    items_.insert(items_.end(), other.items_.begin(), other.items_.end());
  }

 private:
  std::vector<Diagnostic> items_;
};

std::string severity_name(Severity s);

// "error[code] line:col: message"
std::string format_diagnostic(const Diagnostic& d);

}  // namespace aisette
