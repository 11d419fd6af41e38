#include "aisette/parser.hpp"

#include <cassert>
#include <cstdlib>
#include <stdexcept>

#include "aisette/lexer.hpp"

namespace aisette {

namespace {

struct ParseError {
  std::string message;
  Span span;
};

[[noreturn]] void fail_at(Span sp, std::string msg) { throw ParseError{std::move(msg), sp}; }

int64_t parse_scaled_decimal(std::string_view digits, Span sp) {
  // digits is "123" or "123.45"; scale to 1e4 with at most 4 fractional digits.
  size_t dot = digits.find('.');
  std::string_view whole = dot == std::string_view::npos ? digits : digits.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? "" : digits.substr(dot + 1);
  if (frac.size() > 4) {
    fail_at(sp, "decimal literal has more than 4 fractional digits");
  }
  errno = 0;
  char* end = nullptr;
  std::string w(whole);
  long long wv = std::strtoll(w.c_str(), &end, 10);
  if (errno == ERANGE) fail_at(sp, "decimal literal out of range");
  long long fv = 0;
  if (!frac.empty()) {
    std::string f(frac);
    fv = std::strtoll(f.c_str(), nullptr, 10);
    for (size_t i = frac.size(); i < 4; i++) fv *= 10;
  }
  long long scaled;
  if (__builtin_mul_overflow(wv, 10000LL, &scaled) || __builtin_add_overflow(scaled, fv, &scaled)) {
    fail_at(sp, "decimal literal out of range");
  }
  return scaled;
}

std::string unescape_string(std::string_view body, Span sp) {
  std::string out;
  out.reserve(body.size());
  for (size_t i = 0; i < body.size(); i++) {
    char c = body[i];
    if (c != '\\') {
      out.push_back(c);
      continue;
    }
    if (++i >= body.size()) fail_at(sp, "dangling escape in string literal");
    switch (body[i]) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case '\\': out.push_back('\\'); break;
      case '\'': out.push_back('\''); break;
      case '"': out.push_back('"'); break;
      default: fail_at(sp, std::string("unknown escape '\\") + body[i] + "' in string literal");
    }
  }
  return out;
}

std::string strip_doc(std::string_view raw) {
  // raw is "%** ... **%"; drop delimiters and a leading '*' per line.
  std::string_view body = raw.substr(3, raw.size() - 6);
  std::string out;
  size_t start = 0;
  while (start <= body.size()) {
    size_t nl = body.find('\n', start);
    std::string_view line = body.substr(start, nl == std::string_view::npos ? body.size() - start : nl - start);
    size_t b = line.find_first_not_of(" \t");
    if (b != std::string_view::npos) {
      if (line[b] == '*') b++;
      if (b < line.size() && line[b] == ' ') b++;
      line = line.substr(b);
    } else {
      line = "";
    }
    size_t e = line.find_last_not_of(" \t\r");
    line = e == std::string_view::npos ? std::string_view{} : line.substr(0, e + 1);
    if (!line.empty()) {
      if (!out.empty()) out.push_back('\n');
      out.append(line);
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

PermissionTemplate parse_permission_template(std::string_view raw_token, Span sp) {
  // raw_token includes the backslash delimiters.
  PermissionTemplate t;
  t.span = sp;
  std::string_view body = raw_token.substr(1, raw_token.size() - 2);
  t.raw = std::string(body);
  std::string lit;
  for (size_t i = 0; i < body.size(); i++) {
    if (body[i] == '$' && i + 1 < body.size() && body[i + 1] == '{') {
      size_t close = body.find('}', i + 2);
      if (close == std::string_view::npos) fail_at(sp, "unterminated ${...} slot in permission glob");
      if (!lit.empty()) {
        t.pieces.push_back({false, lit, "", ""});
        lit.clear();
      }
      std::string_view slot = body.substr(i + 2, close - i - 2);
      size_t dot = slot.find('.');
      PermissionTemplate::Piece p;
      p.is_slot = true;
      if (dot == std::string_view::npos) {
        p.param = std::string(slot);
      } else {
        p.param = std::string(slot.substr(0, dot));
        p.field = std::string(slot.substr(dot + 1));
      }
      if (p.param.empty()) fail_at(sp, "empty ${...} slot in permission glob");
      t.pieces.push_back(std::move(p));
      i = close;
    } else {
      lit.push_back(body[i]);
    }
  }
  if (!lit.empty()) t.pieces.push_back({false, lit, "", ""});
  return t;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string_view source)
      : toks_(std::move(tokens)), src_(source) {}

  SourceModule module() {
    SourceModule m;
    m.source = std::string(src_);
    while (!at(Tok::Eof)) {
      std::string doc;
      if (at(Tok::DocComment)) {
        doc = strip_doc(next().text);
      }
      switch (cur().kind) {
        case Tok::KwSensitive:
        case Tok::KwType: m.aliases.push_back(alias_decl(std::move(doc))); break;
        case Tok::KwEntity: m.entities.push_back(entity_decl(std::move(doc))); break;
        case Tok::KwFunction: m.functions.push_back(function_decl(FunctionDecl::Kind::Function, std::move(doc))); break;
        case Tok::KwAction: m.functions.push_back(function_decl(FunctionDecl::Kind::Action, std::move(doc))); break;
        case Tok::KwChktest: m.chktests.push_back(function_decl(FunctionDecl::Kind::Chktest, std::move(doc))); break;
        case Tok::KwApi: m.apis.push_back(api_decl(std::move(doc))); break;
        case Tok::KwAgent: m.agents.push_back(agent_decl(std::move(doc))); break;
        default:
          fail_at(cur().span, "expected a declaration (type, entity, function, action, api, agent, chktest), found " +
                                  std::string(token_name(cur().kind)));
      }
    }
    return m;
  }

 private:
  std::vector<Token> toks_;
  std::string_view src_;
  size_t pos_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(size_t off = 1) const {
    size_t i = pos_ + off;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(Tok k) const { return cur().kind == k; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  const Token& expect(Tok k, const char* what) {
    if (!at(k)) {
      fail_at(cur().span, std::string("expected ") + token_name(k) + " (" + what + "), found " +
                              token_name(cur().kind));
    }
    return next();
  }
  bool accept(Tok k) {
    if (at(k)) {
      pos_++;
      return true;
    }
    return false;
  }
  Span span_from(Span start) const {
    Span s = start;
    s.end = pos_ > 0 ? toks_[pos_ - 1].span.end : start.end;
    return s;
  }
  std::string slice(Span s) const { return std::string(src_.substr(s.begin, s.end - s.begin)); }

  std::string ident(const char* what) { return std::string(expect(Tok::Ident, what).text); }

  // ---- declarations ----

  TypeAliasDecl alias_decl(std::string doc) {
    TypeAliasDecl d;
    d.doc = std::move(doc);
    Span start = cur().span;
    d.sensitive = accept(Tok::KwSensitive);
    expect(Tok::KwType, "type alias");
    d.name = ident("alias name");
    expect(Tok::Assign, "alias definition");
    d.base = ident("base type");
    if (d.base != "Int" && d.base != "Decimal" && d.base != "CString" && d.base != "String" &&
        d.base != "Bool") {
      fail_at(toks_[pos_ - 1].span, "alias base must be a primitive type (Int, Decimal, CString, String, Bool)");
    }
    if (accept(Tok::KwOf)) {
      const Token& re = expect(Tok::RegexLit, "alias constraint");
      size_t trailing = re.suffix == 'c' ? 2 : 1;
      d.constraint = std::string(re.text.substr(1, re.text.size() - 1 - trailing));
      d.has_constraint = true;
      d.cstring_mode = re.suffix == 'c';
      if (d.base != "CString" && d.base != "String") {
        fail_at(re.span, "regex constraints apply only to string type aliases");
      }
    }
    expect(Tok::Semi, "end of type alias");
    d.span = span_from(start);
    return d;
  }

  EntityDecl entity_decl(std::string doc) {
    EntityDecl d;
    d.doc = std::move(doc);
    Span start = cur().span;
    expect(Tok::KwEntity, "entity");
    d.name = ident("entity name");
    expect(Tok::LBrace, "entity body");
    while (!at(Tok::RBrace)) {
      if (accept(Tok::KwInvariant)) {
        Span cs = cur().span;
        ExprPtr e = expr();
        Clause c;
        c.span = span_from(cs);
        c.text = slice(c.span);
        c.expr = std::move(e);
        d.invariants.push_back(std::move(c));
        expect(Tok::Semi, "end of invariant");
      } else {
        accept(Tok::KwField);  // 'field' keyword is optional (Fig. 9 omits it)
        EntityField f;
        f.span = cur().span;
        f.name = ident("field name");
        expect(Tok::Colon, "field type");
        f.type = type_ref();
        expect(Tok::Semi, "end of field");
        d.fields.push_back(std::move(f));
      }
    }
    expect(Tok::RBrace, "end of entity");
    d.span = span_from(start);
    return d;
  }

  std::vector<Param> param_list() {
    std::vector<Param> ps;
    expect(Tok::LParen, "parameter list");
    while (!at(Tok::RParen)) {
      if (!ps.empty()) expect(Tok::Comma, "parameter separator");
      Param p;
      p.span = cur().span;
      p.name = ident("parameter name");
      expect(Tok::Colon, "parameter type");
      p.type = type_ref();
      ps.push_back(std::move(p));
    }
    expect(Tok::RParen, "end of parameter list");
    return ps;
  }

  std::vector<EnvEntry> env_clause() {
    expect(Tok::KwEnv, "env clause");
    expect(Tok::Assign, "env clause");
    expect(Tok::LBrace, "env clause");
    std::vector<EnvEntry> es;
    while (!at(Tok::RBrace)) {
      if (!es.empty()) expect(Tok::Comma, "env entry separator");
      EnvEntry e;
      e.span = cur().span;
      e.name = ident("env name");
      expect(Tok::Colon, "env entry type");
      e.type = type_ref();
      es.push_back(std::move(e));
    }
    expect(Tok::RBrace, "end of env clause");
    return es;
  }

  Clause contract_clause() {
    Span cs = cur().span;
    ExprPtr e = expr();
    Clause c;
    c.span = span_from(cs);
    c.text = slice(c.span);
    c.expr = std::move(e);
    expect(Tok::Semi, "end of contract clause");
    return c;
  }

  FunctionDecl function_decl(FunctionDecl::Kind kind, std::string doc) {
    FunctionDecl d;
    d.kind = kind;
    d.doc = std::move(doc);
    Span start = cur().span;
    next();  // function/action/chktest keyword
    d.name = ident("declaration name");
    d.params = param_list();
    if (accept(Tok::Colon)) {
      d.ret = type_ref();
      d.has_ret = true;
    }
    if (at(Tok::KwEnv)) {
      if (kind != FunctionDecl::Kind::Action) {
        fail_at(cur().span, "env clauses are only allowed on actions and apis");
      }
      d.env = env_clause();
      d.has_env = true;
    }
    while (at(Tok::KwRequires) || at(Tok::KwEnsures)) {
      bool is_req = next().kind == Tok::KwRequires;
      Clause c = contract_clause();
      (is_req ? d.requires_clauses : d.ensures_clauses).push_back(std::move(c));
    }
    d.body = block();
    // A body consisting of a single hole expression statement is a body hole.
    if (d.body.size() == 1 && d.body[0]->kind == StmtKind::ExprStmt &&
        d.body[0]->expr->kind == ExprKind::Hole) {
      d.body_is_hole = true;
      d.body_hole = std::move(d.body[0]->expr);
      d.body.clear();
    }
    d.span = span_from(start);
    return d;
  }

  ApiDecl api_decl(std::string doc) {
    ApiDecl d;
    d.doc = std::move(doc);
    Span start = cur().span;
    expect(Tok::KwApi, "api declaration");
    d.name = ident("api name");
    d.params = param_list();
    if (accept(Tok::Colon)) {
      d.ret = type_ref();
      d.has_ret = true;
    }
    if (at(Tok::KwEnv)) d.env = env_clause();
    if (at(Tok::KwPermissions)) {
      next();
      expect(Tok::Assign, "permissions clause");
      expect(Tok::LBrace, "permissions clause");
      while (!at(Tok::RBrace)) {
        if (!d.permissions.empty()) expect(Tok::Comma, "permission separator");
        const Token& g = expect(Tok::GlobLit, "permission glob");
        d.permissions.push_back(parse_permission_template(g.text, g.span));
      }
      expect(Tok::RBrace, "end of permissions clause");
    }
    while (accept(Tok::KwRequires)) {
      d.requires_clauses.push_back(contract_clause());
    }
    if (at(Tok::LBrace)) {
      d.body = block();
      d.has_body = true;
    } else {
      expect(Tok::Semi, "end of externally bound api");
    }
    d.span = span_from(start);
    return d;
  }

  AgentDecl agent_decl(std::string doc) {
    AgentDecl d;
    d.doc = std::move(doc);
    Span start = cur().span;
    expect(Tok::KwAgent, "agent declaration");
    d.name = ident("agent namespace");
    expect(Tok::ColonColon, "agent name");
    d.name += "::" + ident("agent operation");
    if (at(Tok::KwEnv)) d.env = env_clause();
    expect(Tok::Semi, "end of agent declaration");
    d.span = span_from(start);
    return d;
  }

  // ---- statements ----

  std::vector<StmtPtr> block() {
    expect(Tok::LBrace, "block");
    std::vector<StmtPtr> body;
    while (!at(Tok::RBrace)) {
      body.push_back(stmt());
    }
    expect(Tok::RBrace, "end of block");
    return body;
  }

  StmtPtr stmt() {
    Span start = cur().span;
    if (at(Tok::DocComment)) {
      // A doc comment inside a block annotates the hole in the next statement.
      std::string doc = strip_doc(next().text);
      StmtPtr s = stmt();
      Expr* e = s->expr.get();
      if (e && e->kind == ExprKind::Hole) {
        e->hole_doc = std::move(doc);
      }
      return s;
    }
    if (at(Tok::KwLet) || at(Tok::KwVar)) {
      bool is_let = next().kind == Tok::KwLet;
      auto s = Stmt::make(is_let ? StmtKind::Let : StmtKind::Var, start);
      s->name = ident("binding name");
      expect(Tok::Assign, "initializer");
      s->expr = expr();
      expect(Tok::Semi, "end of statement");
      s->span = span_from(start);
      return s;
    }
    if (at(Tok::KwIf)) {
      next();
      auto s = Stmt::make(StmtKind::If, start);
      expect(Tok::LParen, "if condition");
      s->expr = expr();
      expect(Tok::RParen, "end of if condition");
      s->then_block = block();
      if (accept(Tok::KwElse)) {
        s->has_else = true;
        s->else_block = block();
      }
      s->span = span_from(start);
      return s;
    }
    if (at(Tok::KwReturn)) {
      next();
      auto s = Stmt::make(StmtKind::Return, start);
      s->expr = expr();
      expect(Tok::Semi, "end of return");
      s->span = span_from(start);
      return s;
    }
    if (at(Tok::KwAssert)) {
      next();
      auto s = Stmt::make(StmtKind::Assert, start);
      s->expr = expr();
      expect(Tok::Semi, "end of assert");
      s->span = span_from(start);
      return s;
    }
    if (at(Tok::Ident) && peek().kind == Tok::Assign) {
      auto s = Stmt::make(StmtKind::Assign, start);
      s->name = std::string(next().text);
      next();  // =
      s->expr = expr();
      expect(Tok::Semi, "end of assignment");
      s->span = span_from(start);
      return s;
    }
    auto s = Stmt::make(StmtKind::ExprStmt, start);
    s->expr = expr();
    expect(Tok::Semi, "end of expression statement");
    s->span = span_from(start);
    return s;
  }

  // ---- types ----

  TypeRef type_ref() {
    TypeRef t;
    t.span = cur().span;
    t.name = ident("type name");
    if ((t.name == "List" || t.name == "Option")) {
      expect(Tok::Lt, "container element type");
      t.args.push_back(type_ref());
      expect(Tok::Gt, "end of container element type");
    }
    t.span = span_from(t.span);
    return t;
  }

  // ---- expressions ----

  ExprPtr expr() { return or_expr(); }

  ExprPtr or_expr() {
    ExprPtr lhs = and_expr();
    while (at(Tok::PipePipe)) {
      Span sp = lhs->span;
      next();
      auto e = Expr::make(ExprKind::Binary, sp);
      e->bin_op = BinOp::Or;
      e->args.push_back(std::move(lhs));
      e->args.push_back(and_expr());
      e->span = span_from(sp);
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr and_expr() {
    ExprPtr lhs = eq_expr();
    while (at(Tok::AmpAmp)) {
      Span sp = lhs->span;
      next();
      auto e = Expr::make(ExprKind::Binary, sp);
      e->bin_op = BinOp::And;
      e->args.push_back(std::move(lhs));
      e->args.push_back(eq_expr());
      e->span = span_from(sp);
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr eq_expr() {
    ExprPtr lhs = rel_expr();
    if (at(Tok::EqEq) || at(Tok::EqEqEq) || at(Tok::BangEq) || at(Tok::BangEqEq)) {
      Span sp = lhs->span;
      Tok k = next().kind;
      auto e = Expr::make(ExprKind::Binary, sp);
      e->bin_op = (k == Tok::EqEq || k == Tok::EqEqEq) ? BinOp::Eq : BinOp::NotEq;
      e->args.push_back(std::move(lhs));
      e->args.push_back(rel_expr());
      e->span = span_from(sp);
      return e;
    }
    return lhs;
  }

  ExprPtr rel_expr() {
    ExprPtr lhs = add_expr();
    if (at(Tok::Lt) || at(Tok::LtEq) || at(Tok::Gt) || at(Tok::GtEq)) {
      Span sp = lhs->span;
      Tok k = next().kind;
      auto e = Expr::make(ExprKind::Binary, sp);
      e->bin_op = k == Tok::Lt    ? BinOp::Lt
                  : k == Tok::LtEq ? BinOp::LtEq
                  : k == Tok::Gt   ? BinOp::Gt
                                   : BinOp::GtEq;
      e->args.push_back(std::move(lhs));
      e->args.push_back(add_expr());
      e->span = span_from(sp);
      return e;
    }
    return lhs;
  }

  ExprPtr add_expr() {
    ExprPtr lhs = mul_expr();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      Span sp = lhs->span;
      Tok k = next().kind;
      auto e = Expr::make(ExprKind::Binary, sp);
      e->bin_op = k == Tok::Plus ? BinOp::Add : BinOp::Sub;
      e->args.push_back(std::move(lhs));
      e->args.push_back(mul_expr());
      e->span = span_from(sp);
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr mul_expr() {
    ExprPtr lhs = unary_expr();
    while (at(Tok::Star) || at(Tok::Slash)) {
      Span sp = lhs->span;
      Tok k = next().kind;
      auto e = Expr::make(ExprKind::Binary, sp);
      e->bin_op = k == Tok::Star ? BinOp::Mul : BinOp::Div;
      e->args.push_back(std::move(lhs));
      e->args.push_back(unary_expr());
      e->span = span_from(sp);
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr unary_expr() {
    Span start = cur().span;
    if (accept(Tok::Minus)) {
      auto e = Expr::make(ExprKind::Unary, start);
      e->un_op = UnOp::Neg;
      e->args.push_back(unary_expr());
      e->span = span_from(start);
      return e;
    }
    if (accept(Tok::Bang)) {
      auto e = Expr::make(ExprKind::Unary, start);
      e->un_op = UnOp::Not;
      e->args.push_back(unary_expr());
      e->span = span_from(start);
      return e;
    }
    return postfix_expr();
  }

  ExprPtr postfix_expr() {
    ExprPtr e = primary_expr();
    while (at(Tok::Dot)) {
      Span sp = e->span;
      next();
      std::string member = ident("member name");
      if (member == "allOf" || member == "noneOf" || member == "map" || member == "filter" ||
          member == "sum") {
        auto call = Expr::make(ExprKind::CollectionCall, sp);
        call->name = member;
        call->args.push_back(std::move(e));
        if (member == "map" && accept(Tok::Lt)) {
          call->type_arg = type_ref();
          call->has_type_arg = true;
          expect(Tok::Gt, "end of map type argument");
        }
        expect(Tok::LParen, "collection operation arguments");
        if (!at(Tok::RParen)) {
          call->args.push_back(expr());
        }
        expect(Tok::RParen, "end of collection operation");
        call->span = span_from(sp);
        e = std::move(call);
      } else if (member == "contains" && e->kind == ExprKind::Var && e->name == "$events") {
        auto call = Expr::make(ExprKind::EventsContains, sp);
        expect(Tok::LParen, "contains pattern");
        call->args.push_back(expr());
        expect(Tok::RParen, "end of contains");
        call->span = span_from(sp);
        e = std::move(call);
      } else {
        auto fa = Expr::make(ExprKind::FieldAccess, sp);
        fa->name = member;
        fa->args.push_back(std::move(e));
        fa->span = span_from(sp);
        e = std::move(fa);
      }
    }
    return e;
  }

  // Alias annotation after a literal: <Name>. Strings take it optionally;
  // suffixless numbers require it (the lexer already guarantees one follows).
  std::string maybe_annotation(bool required) {
    if (at(Tok::Lt) && peek().kind == Tok::Ident && peek(2).kind == Tok::Gt) {
      next();
      std::string name = std::string(next().text);
      next();
      return name;
    }
    if (required) fail_at(cur().span, "expected <Alias> annotation after unsuffixed literal");
    return "";
  }

  ExprPtr entity_fields(ExprPtr e, Tok close) {
    bool first = true;
    bool named = false;
    while (!at(close)) {
      if (!first) expect(Tok::Comma, "field separator");
      if (at(Tok::Ident) && peek().kind == Tok::Assign) {
        named = true;
        e->labels.push_back(std::string(next().text));
        next();  // =
        e->args.push_back(expr());
      } else {
        if (named) fail_at(cur().span, "cannot mix named and positional fields");
        e->args.push_back(expr());
      }
      first = false;
    }
    next();  // close
    e->named_fields = named;
    if (named && e->labels.size() != e->args.size()) {
      fail_at(e->span, "cannot mix named and positional fields");
    }
    return e;
  }

  ExprPtr primary_expr() {
    Span start = cur().span;
    switch (cur().kind) {
      case Tok::Number: {
        const Token& t = next();
        std::string_view digits = t.text;
        if (t.suffix != 0) digits = digits.substr(0, digits.size() - 1);
        bool is_dec = t.suffix == 'd' || digits.find('.') != std::string_view::npos;
        auto e = Expr::make(is_dec ? ExprKind::DecimalLit : ExprKind::IntLit, t.span);
        if (is_dec) {
          e->num = parse_scaled_decimal(digits, t.span);
        } else {
          errno = 0;
          std::string d(digits);
          long long v = std::strtoll(d.c_str(), nullptr, 10);
          if (errno == ERANGE || v == INT64_MIN) fail_at(t.span, "integer literal out of range");
          e->num = v;
        }
        if (t.suffix == 0) {
          e->alias = maybe_annotation(true);
        }
        e->span = span_from(start);
        return e;
      }
      case Tok::CStringLit:
      case Tok::StringLit: {
        const Token& t = next();
        auto e = Expr::make(ExprKind::StringLit, t.span);
        e->cstring = t.kind == Tok::CStringLit;
        e->name = unescape_string(t.text.substr(1, t.text.size() - 2), t.span);
        e->alias = maybe_annotation(false);
        e->span = span_from(start);
        return e;
      }
      case Tok::KwTrue:
      case Tok::KwFalse: {
        auto e = Expr::make(ExprKind::BoolLit, next().span);
        e->bval = toks_[pos_ - 1].kind == Tok::KwTrue;
        return e;
      }
      case Tok::KwNone:
        return Expr::make(ExprKind::NoneLit, next().span);
      case Tok::KwSome: {
        next();
        auto e = Expr::make(ExprKind::Some, start);
        expect(Tok::LParen, "some payload");
        e->args.push_back(expr());
        expect(Tok::RParen, "end of some");
        e->span = span_from(start);
        return e;
      }
      case Tok::LParen: {
        next();
        ExprPtr e = expr();
        expect(Tok::RParen, "closing parenthesis");
        return e;
      }
      case Tok::DollarIdent: {
        const Token& t = next();
        if (t.text == "$result") return Expr::make(ExprKind::DollarResult, t.span);
        auto e = Expr::make(t.text == "$events" ? ExprKind::Var : ExprKind::DollarField, t.span);
        e->name = std::string(t.text);
        if (t.text != "$events") e->name = std::string(t.text.substr(1));
        return e;
      }
      case Tok::KwEnv: {
        next();
        if (accept(Tok::Dot)) {
          auto e = Expr::make(ExprKind::EnvRead, start);
          e->name = ident("env entry name");
          e->span = span_from(start);
          return e;
        }
        expect(Tok::LBrace, "env literal");
        auto e = Expr::make(ExprKind::EnvLit, start);
        e->env_spread = accept(Tok::Ellipsis);
        expect(Tok::RBrace, "end of env literal");
        e->span = span_from(start);
        return e;
      }
      case Tok::KwIf: {
        next();
        auto e = Expr::make(ExprKind::IfExpr, start);
        expect(Tok::LParen, "if condition");
        e->args.push_back(expr());
        expect(Tok::RParen, "end of if condition");
        expect(Tok::KwThen, "then branch");
        e->args.push_back(expr());
        expect(Tok::KwElse, "else branch");
        e->args.push_back(expr());
        e->span = span_from(start);
        return e;
      }
      case Tok::KwFail: {
        next();
        auto e = Expr::make(ExprKind::Fail, start);
        expect(Tok::LParen, "fail message");
        e->args.push_back(expr());
        expect(Tok::RParen, "end of fail");
        e->span = span_from(start);
        return e;
      }
      case Tok::KwApi: {
        next();
        auto e = Expr::make(ExprKind::ApiCall, start);
        e->name = ident("api name");
        expect(Tok::LParen, "api call arguments");
        while (!at(Tok::RParen)) {
          if (!e->args.empty()) expect(Tok::Comma, "argument separator");
          e->args.push_back(expr());
        }
        expect(Tok::RParen, "end of api call");
        if (e->args.empty()) fail_at(e->span, "api call requires an env argument");
        e->span = span_from(start);
        return e;
      }
      case Tok::KwAgent: {
        next();
        auto e = Expr::make(ExprKind::AgentCall, start);
        e->name = ident("agent namespace");
        expect(Tok::ColonColon, "agent operation");
        e->name += "::" + ident("agent operation");
        expect(Tok::Lt, "agent result shape");
        e->type_arg = type_ref();
        e->has_type_arg = true;
        expect(Tok::Gt, "end of agent result shape");
        expect(Tok::LParen, "agent call arguments");
        while (!at(Tok::RParen)) {
          if (!e->args.empty()) expect(Tok::Comma, "argument separator");
          e->args.push_back(expr());
        }
        expect(Tok::RParen, "end of agent call");
        if (e->args.size() != 3) {
          fail_at(e->span, "agent call takes (env, input, prompt)");
        }
        e->span = span_from(start);
        return e;
      }
      case Tok::Question: {
        next();
        auto e = Expr::make(ExprKind::Hole, start);
        std::string tag = ident("hole name");
        if (tag != "_") {
          e->hole_name = tag;
        }
        if (at(Tok::LParen)) {
          next();
          std::string key = ident("hole option");
          if (key != "examples") fail_at(toks_[pos_ - 1].span, "unknown hole option '" + key + "'");
          expect(Tok::Assign, "hole option value");
          if (accept(Tok::KwTrue)) {
            e->hole_examples = true;
          } else {
            expect(Tok::KwFalse, "hole option value");
          }
          expect(Tok::RParen, "end of hole options");
        }
        if (accept(Tok::Arrow)) {
          e->hole_type = type_ref();
          e->hole_has_type = true;
        }
        e->span = span_from(start);
        return e;
      }
      case Tok::KwPred:
      case Tok::KwFn: {
        bool is_pred = cur().kind == Tok::KwPred;
        next();
        auto e = Expr::make(ExprKind::Lambda, start);
        e->name = is_pred ? "pred" : "fn";
        expect(Tok::LParen, "lambda parameter");
        e->lambda_param = ident("lambda parameter");
        expect(Tok::RParen, "end of lambda parameter");
        expect(Tok::FatArrow, "lambda body");
        e->args.push_back(expr());
        e->span = span_from(start);
        return e;
      }
      case Tok::Ident: {
        const Token& t = next();
        std::string name(t.text);
        if (name == "List" && at(Tok::Lt)) {
          auto e = Expr::make(ExprKind::ListCtor, start);
          next();
          e->type_arg = type_ref();
          e->has_type_arg = true;
          expect(Tok::Gt, "end of list element type");
          expect(Tok::LBrace, "list elements");
          while (!at(Tok::RBrace)) {
            if (!e->args.empty()) expect(Tok::Comma, "element separator");
            e->args.push_back(expr());
          }
          expect(Tok::RBrace, "end of list");
          e->span = span_from(start);
          return e;
        }
        if (at(Tok::LParen)) {
          auto e = Expr::make(ExprKind::Call, start);
          e->name = name;
          next();
          while (!at(Tok::RParen)) {
            if (!e->args.empty()) expect(Tok::Comma, "argument separator");
            e->args.push_back(expr());
          }
          expect(Tok::RParen, "end of call");
          e->span = span_from(start);
          return e;
        }
        if (at(Tok::LBrace)) {
          next();
          auto e = Expr::make(ExprKind::EntityCtor, start);
          e->name = name;
          e = entity_fields(std::move(e), Tok::RBrace);
          e->span = span_from(start);
          return e;
        }
        if (at(Tok::LBracePipe)) {
          next();
          auto e = Expr::make(ExprKind::EntityPattern, start);
          e->name = name;
          e = entity_fields(std::move(e), Tok::RBracePipe);
          if (!e->named_fields && !e->args.empty()) {
            fail_at(e->span, "event patterns use named fields");
          }
          e->span = span_from(start);
          return e;
        }
        auto e = Expr::make(ExprKind::Var, t.span);
        e->name = name;
        return e;
      }
      default:
        fail_at(cur().span, std::string("expected an expression, found ") + token_name(cur().kind));
    }
  }
};

}  // namespace

ParseResult parse_module(std::string_view source) {
  ParseResult out;
  LexResult lexed = tokenize(source);
  out.diags.append(lexed.diags);
  if (!lexed.ok()) return out;
  try {
    Parser p(std::move(lexed.tokens), source);
    out.module = p.module();
  } catch (const ParseError& e) {
    out.diags.error("parse", e.message, e.span);
  }
  return out;
}

}  // namespace aisette
