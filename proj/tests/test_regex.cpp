#include "doctest.h"

#include <chrono>
#include <functional>
#include <random>

#include "aisette/regex.hpp"

using namespace aisette;

TEST_SUITE_BEGIN("regex");

namespace {

// Naive exponential backtracking matcher over the pattern syntax tree.
// Test-side oracle, deliberately independent of the DFA path.
bool bt_node(const rex::Node& n, const std::vector<uint32_t>& s, size_t pos,
             const std::function<bool(size_t)>& k);

bool bt_seq(const std::vector<rex::NodePtr>& kids, size_t ki, const std::vector<uint32_t>& s,
            size_t pos, const std::function<bool(size_t)>& k) {
  if (ki == kids.size()) return k(pos);
  return bt_node(*kids[ki], s, pos,
                 [&](size_t p) { return bt_seq(kids, ki + 1, s, p, k); });
}

bool bt_count(const rex::Node& inner, int min, int max, bool unbounded,
              const std::vector<uint32_t>& s, size_t pos, const std::function<bool(size_t)>& k) {
  if (min == 0) {
    if (k(pos)) return true;
    if (!unbounded && max == 0) return false;
    return bt_node(inner, s, pos, [&](size_t p) {
      if (p == pos) return false;  // require progress to avoid nullable loops
      return bt_count(inner, 0, unbounded ? 0 : max - 1, unbounded, s, p, k);
    });
  }
  return bt_node(inner, s, pos, [&](size_t p) {
    return bt_count(inner, min - 1, unbounded ? 0 : max - 1, unbounded, s, p, k);
  });
}

bool bt_node(const rex::Node& n, const std::vector<uint32_t>& s, size_t pos,
             const std::function<bool(size_t)>& k) {
  using K = rex::Node::K;
  switch (n.kind) {
    case K::Empty:
      return k(pos);
    case K::Chars: {
      if (pos >= s.size()) return false;
      for (auto [lo, hi] : n.ranges) {
        if (s[pos] >= lo && s[pos] <= hi) return k(pos + 1);
      }
      return false;
    }
    case K::Concat:
      return bt_seq(n.kids, 0, s, pos, k);
    case K::Alt:
      for (const auto& kid : n.kids) {
        if (bt_node(*kid, s, pos, k)) return true;
      }
      return false;
    case K::Star:
      return bt_count(*n.kids[0], 0, 0, true, s, pos, k);
    case K::Plus:
      return bt_count(*n.kids[0], 1, 0, true, s, pos, k);
    case K::Opt:
      return bt_count(*n.kids[0], 0, 1, false, s, pos, k);
    case K::Repeat:
      return bt_count(*n.kids[0], n.min, n.max, n.max_unbounded, s, pos, k);
  }
  return false;
}

bool oracle_matches(const rex::NodePtr& root, std::string_view text) {
  std::vector<uint32_t> s = rex::decode_utf8(text);
  return bt_node(*root, s, 0, [&](size_t p) { return p == s.size(); });
}

// Random pattern generator over the supported grammar, alphabet {a,b,c,d}.
struct PatternGen {
  std::mt19937 rng;
  explicit PatternGen(uint32_t seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  std::string atom(int depth) {
    switch (pick(depth <= 0 ? 3 : 6)) {
      case 0: return std::string(1, static_cast<char>('a' + pick(4)));
      case 1: {  // class
        switch (pick(3)) {
          case 0: return "[ab]";
          case 1: return "[a-c]";
          default: return "[^a]";
        }
      }
      case 2: return "'" + std::string(1, static_cast<char>('a' + pick(4))) + "'";
      case 3: return "(" + gen(depth - 1) + ")";
      case 4: return ".";
      default: return "(" + gen(depth - 1) + "|" + gen(depth - 1) + ")";
    }
  }

  std::string piece(int depth) {
    std::string a = atom(depth);
    switch (pick(8)) {
      case 0: return a + "*";
      case 1: return a + "+";
      case 2: return a + "?";
      case 3: return a + "{" + std::to_string(pick(3)) + "}";
      case 4: {
        int m = pick(2), n = m + pick(3);
        return a + "{" + std::to_string(m) + "," + std::to_string(n) + "}";
      }
      default: return a;
    }
  }

  std::string gen(int depth) {
    std::string out;
    int n = 1 + pick(3);
    for (int i = 0; i < n; i++) out += piece(depth);
    if (pick(4) == 0) out += "|" + piece(depth);
    return out;
  }

  std::string input(size_t max_len) {
    size_t len = pick(static_cast<int>(max_len) + 1);
    std::string s;
    for (size_t i = 0; i < len; i++) s.push_back(static_cast<char>('a' + pick(4)));
    return s;
  }
};

}  // namespace

TEST_CASE("zip code pattern") {
  auto re = SafeRegex::compile("[0-9]{5}('-'[0-9]{4})?", true);
  CHECK(re.matches("40506"));
  CHECK(re.matches("40506-1234"));
  CHECK(!re.matches("4050"));      // four digits cannot satisfy {5}
  CHECK(!re.matches("405061"));
  CHECK(!re.matches("40506-123"));
  CHECK(!re.matches(""));
}

TEST_CASE("order id pattern with redundant trailing anchor") {
  auto re = SafeRegex::compile("[A-Z][0-9]+$");
  CHECK(re.matches("A53"));
  CHECK(!re.matches("53A"));
  CHECK(!re.matches("A"));
  CHECK(re.matches("Z0123456789"));
}

TEST_CASE("tin pattern") {
  auto re = SafeRegex::compile("[0-9]{9}$");
  CHECK(re.matches("123456789"));
  CHECK(!re.matches("12345678"));
  CHECK(!re.matches("1234567890"));
}

TEST_CASE("unsupported constructs are named") {
  CHECK_THROWS_WITH_AS(SafeRegex::compile("(a)\\1"), doctest::Contains("backreference"),
                       RegexCompileError);
  CHECK_THROWS_WITH_AS(SafeRegex::compile("a*?b"), doctest::Contains("lazy quantifier"),
                       RegexCompileError);
  CHECK_THROWS_WITH_AS(SafeRegex::compile("(?=a)b"), doctest::Contains("lookaround"),
                       RegexCompileError);
  CHECK_THROWS_WITH_AS(SafeRegex::compile("a\\db"), doctest::Contains("escape class"),
                       RegexCompileError);
  CHECK_THROWS_WITH_AS(SafeRegex::compile("ab["), doctest::Contains("unterminated"),
                       RegexCompileError);
  CHECK_THROWS_WITH_AS(SafeRegex::compile("a$b"), doctest::Contains("anchor"),
                       RegexCompileError);
}

TEST_CASE("cstring mode restricts the alphabet") {
  CHECK_THROWS_AS(SafeRegex::compile("caf\xc3\xa9", true), RegexCompileError);
  auto re = SafeRegex::compile(".*", true);
  CHECK(re.matches("plain ascii!"));
  CHECK(!re.matches("caf\xc3\xa9"));  // é is outside printable ASCII
  auto uni = SafeRegex::compile(".*", false);
  CHECK(uni.matches("caf\xc3\xa9"));
}

TEST_CASE("empty string acceptance follows the automaton") {
  CHECK(SafeRegex::compile("a*").matches(""));
  CHECK(SafeRegex::compile("").matches(""));
  CHECK(!SafeRegex::compile("a+").matches(""));
}

TEST_CASE("oracle equivalence on random patterns and inputs") {
  PatternGen gen(0xA15E77E);
  int checked = 0;
  while (checked < 600) {
    std::string pat = gen.gen(2);
    SafeRegex re = SafeRegex::compile(pat);
    rex::NodePtr tree = rex::parse(pat, false);
    for (int j = 0; j < 6; j++) {
      std::string input = gen.input(32);
      bool fast = re.matches(input);
      bool slow = oracle_matches(tree, input);
      CAPTURE(pat);
      CAPTURE(input);
      REQUIRE(fast == slow);
      checked++;
    }
  }
}

TEST_CASE("pathological pattern stays linear") {
  auto re = SafeRegex::compile("(a|a)*b");
  std::string input(10000, 'a');
  auto start = std::chrono::steady_clock::now();
  bool m = re.matches(input);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start)
                .count();
  CHECK(!m);
  CHECK(ms < 100);
}

TEST_CASE("state cap is enforced") {
  // 20 tails of bounded repetition blow past a tiny cap.
  CHECK_THROWS_WITH_AS(SafeRegex::compile("(ab|ba){40}(a?){40}a{40}", false, 16),
                       doctest::Contains("state cap"), RegexCompileError);
}

TEST_SUITE_END();
