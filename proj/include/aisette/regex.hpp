#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aisette {

class RegexCompileError : public std::runtime_error {
 public:
  explicit RegexCompileError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace rex {

// Syntax tree of the supported pattern grammar. Also consumed by the SMT
// emitter (regex -> SMT-LIB re terms) and by the test-side oracle matcher.
struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class K {
    Empty,    // epsilon
    Chars,    // one char from `ranges`
    Concat,   // kids in sequence
    Alt,      // one of kids
    Star,     // kids[0]*
    Plus,     // kids[0]+
    Opt,      // kids[0]?
    Repeat,   // kids[0]{min,max}; max_unbounded for {m,}
  };
  K kind;
  std::vector<std::pair<uint32_t, uint32_t>> ranges;  // sorted, disjoint, inclusive
  std::vector<NodePtr> kids;
  int min = 0;
  int max = 0;
  bool max_unbounded = false;
};

// Parses a pattern (text between the / / delimiters). Throws
// RegexCompileError naming any unsupported construct.
NodePtr parse(std::string_view pattern, bool cstring_mode);

// Decodes UTF-8 into scalar values; invalid bytes become U+FFFD.
std::vector<uint32_t> decode_utf8(std::string_view text);

}  // namespace rex

// Whole-string-anchored matcher backed by a DFA; matching is O(len(input))
// regardless of pattern structure.
class SafeRegex {
 public:
  // Throws RegexCompileError on malformed or unsupported patterns, or when
  // determinization exceeds the state cap.
  static SafeRegex compile(std::string_view pattern, bool cstring_mode = false,
                           size_t state_cap = 10000);

  bool matches(std::string_view text) const;

  const std::string& pattern() const { return impl_->pattern; }
  bool cstring_mode() const { return impl_->cstring_mode; }
  size_t state_count() const { return impl_->states.size(); }
  const rex::NodePtr& syntax() const { return impl_->syntax; }

 private:
  struct Edge {
    uint32_t lo, hi;
    int32_t next;
  };
  struct State {
    std::vector<Edge> edges;  // sorted by lo, disjoint
    bool accept = false;
  };
  struct Impl {
    std::string pattern;
    bool cstring_mode = false;
    rex::NodePtr syntax;
    std::vector<State> states;  // state 0 is the start
    bool empty_accept = false;
  };
  std::shared_ptr<const Impl> impl_;
};

}  // namespace aisette
