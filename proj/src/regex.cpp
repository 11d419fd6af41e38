#include "aisette/regex.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace aisette {
namespace rex {

namespace {

constexpr uint32_t kMaxScalar = 0x10FFFF;
constexpr uint32_t kAsciiPrintLo = 0x20;
constexpr uint32_t kAsciiPrintHi = 0x7E;
constexpr int kMaxRepeat = 1000;

using Ranges = std::vector<std::pair<uint32_t, uint32_t>>;

Ranges normalize(Ranges rs) {
  std::sort(rs.begin(), rs.end());
  Ranges out;
  for (auto& r : rs) {
    if (!out.empty() && r.first <= out.back().second + 1) {
      out.back().second = std::max(out.back().second, r.second);
    } else {
      out.push_back(r);
    }
  }
  return out;
}

Ranges complement(const Ranges& rs, uint32_t lo, uint32_t hi) {
  Ranges out;
  uint32_t cur = lo;
  for (const auto& r : rs) {
    if (r.first > cur) out.push_back({cur, r.first - 1});
    cur = std::max(cur, r.second == kMaxScalar ? kMaxScalar : r.second + 1);
    if (r.second == kMaxScalar) return out;
  }
  if (cur <= hi) out.push_back({cur, hi});
  return out;
}

class PatternParser {
 public:
  PatternParser(std::string_view pat, bool cmode) : pat_(pat), cmode_(cmode) {}

  NodePtr run() {
    // Leading ^ / trailing $ are redundant under whole-string anchoring.
    if (!pat_.empty() && pat_.front() == '^') pat_.remove_prefix(1);
    if (!pat_.empty() && pat_.back() == '$' &&
        (pat_.size() < 2 || pat_[pat_.size() - 2] != '\\')) {
      pat_.remove_suffix(1);
    }
    NodePtr n = alt();
    if (pos_ < pat_.size()) {
      err(std::string("unexpected '") + pat_[pos_] + "' in pattern");
    }
    return n;
  }

 private:
  std::string_view pat_;
  bool cmode_;
  size_t pos_ = 0;

  [[noreturn]] void err(const std::string& msg) { throw RegexCompileError(msg); }
  char peek(size_t off = 0) const { return pos_ + off < pat_.size() ? pat_[pos_ + off] : '\0'; }
  bool done() const { return pos_ >= pat_.size(); }

  static NodePtr mk_chars(Ranges rs) {
    auto n = std::make_shared<Node>();
    n->kind = Node::K::Chars;
    n->ranges = normalize(std::move(rs));
    return n;
  }
  NodePtr mk_char(uint32_t c) {
    check_alphabet(c);
    return mk_chars({{c, c}});
  }
  void check_alphabet(uint32_t c) {
    if (cmode_ && (c < kAsciiPrintLo || c > kAsciiPrintHi)) {
      err("character outside printable ASCII in /.../c pattern");
    }
  }

  NodePtr alt() {
    std::vector<NodePtr> arms;
    arms.push_back(cat());
    while (!done() && peek() == '|') {
      pos_++;
      arms.push_back(cat());
    }
    if (arms.size() == 1) return arms[0];
    auto n = std::make_shared<Node>();
    n->kind = Node::K::Alt;
    n->kids = std::move(arms);
    return n;
  }

  NodePtr cat() {
    std::vector<NodePtr> parts;
    while (!done() && peek() != '|' && peek() != ')') {
      parts.push_back(repeated());
    }
    if (parts.empty()) {
      auto n = std::make_shared<Node>();
      n->kind = Node::K::Empty;
      return n;
    }
    if (parts.size() == 1) return parts[0];
    auto n = std::make_shared<Node>();
    n->kind = Node::K::Concat;
    n->kids = std::move(parts);
    return n;
  }

  NodePtr repeated() {
    NodePtr a = atom();
    while (!done()) {
      char c = peek();
      Node::K k;
      int mn = 0, mx = 0;
      bool unbounded = false;
      if (c == '*') { k = Node::K::Star; pos_++; }
      else if (c == '+') { k = Node::K::Plus; pos_++; }
      else if (c == '?') { k = Node::K::Opt; pos_++; }
      else if (c == '{') {
        pos_++;
        mn = read_int();
        if (peek() == ',') {
          pos_++;
          if (peek() == '}') {
            unbounded = true;
          } else {
            mx = read_int();
            if (mx < mn) err("malformed repetition: max below min");
          }
        } else {
          mx = mn;
        }
        if (peek() != '}') err("malformed repetition: expected '}'");
        pos_++;
        if (mn > kMaxRepeat || mx > kMaxRepeat) err("repetition bound too large");
        k = Node::K::Repeat;
      } else {
        break;
      }
      if (!done() && peek() == '?') err("unsupported construct: lazy quantifier");
      auto n = std::make_shared<Node>();
      n->kind = k;
      n->kids.push_back(a);
      n->min = mn;
      n->max = mx;
      n->max_unbounded = unbounded;
      a = n;
    }
    return a;
  }

  int read_int() {
    if (!isdigit(static_cast<unsigned char>(peek()))) err("malformed repetition: expected digit");
    int v = 0;
    while (isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (peek() - '0');
      if (v > 100000) err("repetition bound too large");
      pos_++;
    }
    return v;
  }

  NodePtr atom() {
    char c = peek();
    switch (c) {
      case '(': {
        pos_++;
        if (peek() == '?') err("unsupported construct: lookaround or group options");
        NodePtr inner = alt();
        if (peek() != ')') err("unbalanced parenthesis");
        pos_++;
        return inner;
      }
      case '[':
        return char_class();
      case '.': {
        pos_++;
        return mk_chars({{cmode_ ? kAsciiPrintLo : 0u, cmode_ ? kAsciiPrintHi : kMaxScalar}});
      }
      case '\'': {
        pos_++;
        std::vector<NodePtr> chars;
        while (!done() && peek() != '\'') {
          chars.push_back(mk_char(next_scalar()));
        }
        if (done()) err("unterminated quoted literal");
        pos_++;
        if (chars.empty()) {
          auto n = std::make_shared<Node>();
          n->kind = Node::K::Empty;
          return n;
        }
        if (chars.size() == 1) return chars[0];
        auto n = std::make_shared<Node>();
        n->kind = Node::K::Concat;
        n->kids = std::move(chars);
        return n;
      }
      case '\\':
        return mk_char(escape());
      case '$':
      case '^':
        err("unsupported construct: anchor inside pattern");
      case '*':
      case '+':
      case '?':
        err(std::string("quantifier '") + c + "' with nothing to repeat");
      case '{':
        err("repetition with nothing to repeat");
      default:
        return mk_char(next_scalar());
    }
  }

  uint32_t escape() {
    pos_++;  // backslash
    if (done()) err("dangling escape at end of pattern");
    char c = peek();
    if (c >= '1' && c <= '9') err("unsupported construct: backreference");
    if (c == 'd' || c == 'w' || c == 's' || c == 'D' || c == 'W' || c == 'S' || c == 'b' || c == 'B') {
      err(std::string("unsupported construct: escape class \\") + c);
    }
    pos_++;
    switch (c) {
      case 'n': return '\n';
      case 't': return '\t';
      case 'r': return '\r';
      default: return static_cast<uint32_t>(static_cast<unsigned char>(c));
    }
  }

  uint32_t next_scalar() {
    // UTF-8 decode of the next pattern character.
    unsigned char b = static_cast<unsigned char>(peek());
    if (b < 0x80) {
      pos_++;
      return b;
    }
    int len = (b & 0xE0) == 0xC0 ? 2 : (b & 0xF0) == 0xE0 ? 3 : (b & 0xF8) == 0xF0 ? 4 : 1;
    uint32_t cp = len == 2 ? b & 0x1F : len == 3 ? b & 0x0F : len == 4 ? b & 0x07 : 0xFFFD;
    for (int i = 1; i < len; i++) {
      unsigned char nb = static_cast<unsigned char>(peek(i));
      if ((nb & 0xC0) != 0x80) { len = 1; cp = 0xFFFD; break; }
      cp = (cp << 6) | (nb & 0x3F);
    }
    pos_ += len;
    return cp;
  }

  NodePtr char_class() {
    pos_++;  // [
    bool negated = false;
    if (peek() == '^') {
      negated = true;
      pos_++;
    }
    Ranges rs;
    bool first = true;
    while (!done() && (peek() != ']' || first)) {
      uint32_t lo;
      if (peek() == '\\') {
        lo = escape();
      } else {
        lo = next_scalar();
      }
      uint32_t hi = lo;
      if (peek() == '-' && peek(1) != ']' && pos_ + 1 < pat_.size()) {
        pos_++;
        hi = peek() == '\\' ? escape() : next_scalar();
        if (hi < lo) err("malformed character class range");
      }
      check_alphabet(lo);
      check_alphabet(hi);
      rs.push_back({lo, hi});
      first = false;
    }
    if (done()) err("unterminated character class");
    pos_++;  // ]
    if (rs.empty()) err("empty character class");
    rs = normalize(std::move(rs));
    if (negated) {
      rs = complement(rs, cmode_ ? kAsciiPrintLo : 0u, cmode_ ? kAsciiPrintHi : kMaxScalar);
      if (rs.empty()) err("negated class matches nothing");
    }
    return mk_chars(std::move(rs));
  }
};

}  // namespace

NodePtr parse(std::string_view pattern, bool cstring_mode) {
  return PatternParser(pattern, cstring_mode).run();
}

std::vector<uint32_t> decode_utf8(std::string_view text) {
  std::vector<uint32_t> out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    unsigned char b = static_cast<unsigned char>(text[i]);
    if (b < 0x80) {
      out.push_back(b);
      i++;
      continue;
    }
    int len = (b & 0xE0) == 0xC0 ? 2 : (b & 0xF0) == 0xE0 ? 3 : (b & 0xF8) == 0xF0 ? 4 : 0;
    if (len == 0 || i + len > text.size()) {
      out.push_back(0xFFFD);
      i++;
      continue;
    }
    uint32_t cp = len == 2 ? b & 0x1F : len == 3 ? b & 0x0F : b & 0x07;
    bool bad = false;
    for (int k = 1; k < len; k++) {
      unsigned char nb = static_cast<unsigned char>(text[i + k]);
      if ((nb & 0xC0) != 0x80) { bad = true; break; }
      cp = (cp << 6) | (nb & 0x3F);
    }
    if (bad) {
      out.push_back(0xFFFD);
      i++;
    } else {
      out.push_back(cp);
      i += len;
    }
  }
  return out;
}

}  // namespace rex

namespace {

// Thompson NFA.
struct NfaState {
  std::vector<std::pair<std::pair<uint32_t, uint32_t>, int>> edges;
  std::vector<int> eps;
};

class NfaBuilder {
 public:
  explicit NfaBuilder(size_t cap) : cap_(cap) {}
  std::vector<NfaState> states;
  int accept = -1;
  int start = -1;

  void build(const rex::NodePtr& root) {
    auto [s, a] = frag(root);
    start = s;
    accept = a;
  }

 private:
  size_t cap_;

  int add() {
    if (states.size() >= cap_) {
      throw RegexCompileError("pattern too large (NFA state cap exceeded)");
    }
    states.emplace_back();
    return static_cast<int>(states.size() - 1);
  }

  std::pair<int, int> frag(const rex::NodePtr& n) {
    using K = rex::Node::K;
    switch (n->kind) {
      case K::Empty: {
        int s = add();
        return {s, s};
      }
      case K::Chars: {
        int s = add(), a = add();
        for (auto& r : n->ranges) states[s].edges.push_back({r, a});
        return {s, a};
      }
      case K::Concat: {
        int s = -1, a = -1;
        for (const auto& k : n->kids) {
          auto [ks, ka] = frag(k);
          if (s == -1) {
            s = ks;
          } else {
            states[a].eps.push_back(ks);
          }
          a = ka;
        }
        return {s, a};
      }
      case K::Alt: {
        int s = add(), a = add();
        for (const auto& k : n->kids) {
          auto [ks, ka] = frag(k);
          states[s].eps.push_back(ks);
          states[ka].eps.push_back(a);
        }
        return {s, a};
      }
      case K::Star: {
        auto [ks, ka] = frag(n->kids[0]);
        int s = add();
        states[s].eps.push_back(ks);
        states[ka].eps.push_back(s);
        return {s, s};
      }
      case K::Plus: {
        auto [ks, ka] = frag(n->kids[0]);
        int a = add();
        states[ka].eps.push_back(a);
        states[a].eps.push_back(ks);
        return {ks, a};
      }
      case K::Opt: {
        auto [ks, ka] = frag(n->kids[0]);
        int s = add(), a = add();
        states[s].eps.push_back(ks);
        states[s].eps.push_back(a);
        states[ka].eps.push_back(a);
        return {s, a};
      }
      case K::Repeat: {
        // Unroll: min mandatory copies, then (max-min) optional copies or a star.
        int s = add();
        int cur = s;
        for (int i = 0; i < n->min; i++) {
          auto [ks, ka] = frag(n->kids[0]);
          states[cur].eps.push_back(ks);
          cur = ka;
        }
        if (n->max_unbounded) {
          auto [ks, ka] = frag(n->kids[0]);
          int loop = add();
          states[cur].eps.push_back(loop);
          states[loop].eps.push_back(ks);
          states[ka].eps.push_back(loop);
          cur = loop;
        } else {
          int out = add();
          states[cur].eps.push_back(out);
          for (int i = n->min; i < n->max; i++) {
            auto [ks, ka] = frag(n->kids[0]);
            states[cur].eps.push_back(ks);
            cur = ka;
            states[cur].eps.push_back(out);
          }
          cur = out;
        }
        return {s, cur};
      }
    }
    throw RegexCompileError("internal: unhandled pattern node");
  }
};

}  // namespace

SafeRegex SafeRegex::compile(std::string_view pattern, bool cstring_mode, size_t state_cap) {
  auto impl = std::make_shared<Impl>();
  impl->pattern = std::string(pattern);
  impl->cstring_mode = cstring_mode;
  impl->syntax = rex::parse(pattern, cstring_mode);

  NfaBuilder nfa(state_cap * 8);
  nfa.build(impl->syntax);

  // Epsilon closure helper.
  auto closure = [&](std::set<int> s) {
    std::vector<int> work(s.begin(), s.end());
    while (!work.empty()) {
      int q = work.back();
      work.pop_back();
      for (int t : nfa.states[q].eps) {
        if (s.insert(t).second) work.push_back(t);
      }
    }
    return s;
  };

  std::map<std::set<int>, int> ids;
  std::vector<std::set<int>> sets;
  auto intern = [&](std::set<int> s) {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    if (sets.size() >= state_cap) {
      throw RegexCompileError("pattern too complex (DFA state cap exceeded)");
    }
    int id = static_cast<int>(sets.size());
    ids.emplace(s, id);
    sets.push_back(std::move(s));
    impl->states.emplace_back();
    return id;
  };

  int start = intern(closure({nfa.start}));
  impl->states[start].accept = sets[start].count(nfa.accept) > 0;
  impl->empty_accept = impl->states[start].accept;

  for (size_t qi = 0; qi < sets.size(); qi++) {
    // Partition the alphabet at all range boundaries leaving this set.
    std::set<uint32_t> cuts;
    for (int q : sets[qi]) {
      for (const auto& e : nfa.states[q].edges) {
        cuts.insert(e.first.first);
        if (e.first.second != UINT32_MAX) cuts.insert(e.first.second + 1);
      }
    }
    std::vector<uint32_t> bounds(cuts.begin(), cuts.end());
    for (size_t bi = 0; bi < bounds.size(); bi++) {
      uint32_t lo = bounds[bi];
      uint32_t hi = (bi + 1 < bounds.size()) ? bounds[bi + 1] - 1 : 0x10FFFF;
      std::set<int> next;
      for (int q : sets[qi]) {
        for (const auto& e : nfa.states[q].edges) {
          if (e.first.first <= lo && lo <= e.first.second) next.insert(e.second);
        }
      }
      if (next.empty()) continue;
      int tid = intern(closure(std::move(next)));
      impl->states[tid].accept = sets[tid].count(nfa.accept) > 0;
      impl->states[qi].edges.push_back({lo, hi, tid});
    }
    std::sort(impl->states[qi].edges.begin(), impl->states[qi].edges.end(),
              [](const Edge& a, const Edge& b) { return a.lo < b.lo; });
  }

  SafeRegex re;
  re.impl_ = std::move(impl);
  return re;
}

bool SafeRegex::matches(std::string_view text) const {
  int state = 0;
  if (impl_->states.empty()) return text.empty() && impl_->empty_accept;
  std::vector<uint32_t> cps = rex::decode_utf8(text);
  for (uint32_t cp : cps) {
    const State& st = impl_->states[state];
    // Binary search the sorted edge list.
    int lo = 0, hi = static_cast<int>(st.edges.size()) - 1, next = -1;
    while (lo <= hi) {
      int mid = (lo + hi) / 2;
      const Edge& e = st.edges[mid];
      if (cp < e.lo) {
        hi = mid - 1;
      } else if (cp > e.hi) {
        lo = mid + 1;
      } else {
        next = e.next;
        break;
      }
    }
    if (next < 0) return false;
    state = next;
  }
  return impl_->states[state].accept;
}

}  // namespace aisette
