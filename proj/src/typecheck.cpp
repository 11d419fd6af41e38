#include "aisette/typecheck.hpp"

#include <functional>
#include <set>

#include "aisette/parser.hpp"

namespace aisette {

namespace {

TypePtr make_type(Type::K k, std::string name = "", TypePtr elem = nullptr) {
  auto t = std::make_shared<Type>();
  t->kind = k;
  t->name = std::move(name);
  t->elem = std::move(elem);
  return t;
}

}  // namespace

TypePtr t_bool() { static TypePtr t = make_type(Type::K::Bool); return t; }
TypePtr t_int() { static TypePtr t = make_type(Type::K::Int); return t; }
TypePtr t_decimal() { static TypePtr t = make_type(Type::K::Decimal); return t; }
TypePtr t_cstring() { static TypePtr t = make_type(Type::K::CString); return t; }
TypePtr t_string() { static TypePtr t = make_type(Type::K::String); return t; }
TypePtr t_alias(std::string name) { return make_type(Type::K::Alias, std::move(name)); }
TypePtr t_entity(std::string name) { return make_type(Type::K::Entity, std::move(name)); }
TypePtr t_list(TypePtr elem) { return make_type(Type::K::List, "", std::move(elem)); }
TypePtr t_option(TypePtr elem) { return make_type(Type::K::Option, "", std::move(elem)); }

bool type_equal(const Type& a, const Type& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Type::K::Alias || a.kind == Type::K::Entity) return a.name == b.name;
  if (a.kind == Type::K::List || a.kind == Type::K::Option) return type_equal(*a.elem, *b.elem);
  return true;
}

std::string type_name(const Type& t) {
  switch (t.kind) {
    case Type::K::Bool: return "Bool";
    case Type::K::Int: return "Int";
    case Type::K::Decimal: return "Decimal";
    case Type::K::CString: return "CString";
    case Type::K::String: return "String";
    case Type::K::Alias:
    case Type::K::Entity: return t.name;
    case Type::K::List: return "List<" + type_name(*t.elem) + ">";
    case Type::K::Option: return "Option<" + type_name(*t.elem) + ">";
  }
  return "?";
}

TypePtr TypedModule::resolve(const TypeRef& ref, DiagnosticList* diags) const {
  if (ref.name == "Bool") return t_bool();
  if (ref.name == "Int") return t_int();
  if (ref.name == "Decimal") return t_decimal();
  if (ref.name == "CString") return t_cstring();
  if (ref.name == "String") return t_string();
  if (ref.name == "List" || ref.name == "Option") {
    if (ref.args.size() != 1) {
      if (diags) diags->error("type-arity", ref.name + " takes one type argument", ref.span);
      return nullptr;
    }
    TypePtr elem = resolve(ref.args[0], diags);
    if (!elem) return nullptr;
    return ref.name == "List" ? t_list(elem) : t_option(elem);
  }
  if (aliases.count(ref.name)) return t_alias(ref.name);
  if (entities.count(ref.name)) return t_entity(ref.name);
  if (diags) diags->error("unknown-type", "unknown type '" + ref.name + "'", ref.span);
  return nullptr;
}

Type::K TypedModule::base_kind(const Type& t) const {
  if (t.kind != Type::K::Alias) return t.kind;
  auto it = aliases.find(t.name);
  return it == aliases.end() ? Type::K::Alias : it->second.base;
}

bool TypedModule::is_sensitive(const Type& t) const {
  switch (t.kind) {
    case Type::K::Alias: {
      auto it = aliases.find(t.name);
      return it != aliases.end() && it->second.sensitive;
    }
    case Type::K::Entity: {
      auto it = entities.find(t.name);
      if (it == entities.end()) return false;
      for (const auto& ft : it->second.field_types) {
        if (is_sensitive(*ft)) return true;
      }
      return false;
    }
    case Type::K::List:
    case Type::K::Option:
      return is_sensitive(*t.elem);
    default:
      return false;
  }
}

namespace {

enum class Ctx {
  PureBody,      // function / chktest body
  ActionBody,    // action or api body
  Invariant,     // entity invariant
  Requires,      // function/action requires
  ApiRequires,   // api requires ($events allowed)
  Ensures,       // ensures ($result allowed)
};

struct VarInfo {
  TypePtr type;
  bool mutable_binding = false;
};

class Checker {
 public:
  explicit Checker(TypedModule& m, DiagnosticList& diags) : m_(m), diags_(diags) {}

  void run() {
    index_declarations();
    if (diags_.has_errors()) return;
    check_entities();
    for (auto& f : m_.src.functions) check_function(f);
    for (auto& t : m_.src.chktests) check_function(t);
    for (auto& a : m_.src.apis) check_api(a);
    check_recursion();
  }

 private:
  TypedModule& m_;
  DiagnosticList& diags_;

  Ctx ctx_ = Ctx::PureBody;
  std::vector<std::map<std::string, VarInfo>> scopes_;
  const EntityDecl* current_entity_ = nullptr;
  TypePtr current_result_;                      // $result type in ensures
  const std::vector<EnvEntry>* current_env_ = nullptr;
  std::string current_callable_;
  std::map<std::string, std::set<std::string>> call_edges_;

  void error(Span sp, std::string code, std::string msg) {
    diags_.error(std::move(code), std::move(msg), sp);
  }

  // ---- indexing ----

  void index_declarations() {
    std::set<std::string> type_names;
    for (auto& a : m_.src.aliases) {
      if (!type_names.insert(a.name).second) {
        error(a.span, "duplicate-name", "duplicate type name '" + a.name + "'");
        continue;
      }
      AliasInfo info;
      info.decl = &a;
      info.sensitive = a.sensitive;
      info.base = a.base == "Int"       ? Type::K::Int
                  : a.base == "Decimal" ? Type::K::Decimal
                  : a.base == "CString" ? Type::K::CString
                  : a.base == "String"  ? Type::K::String
                                        : Type::K::Bool;
      if (a.has_constraint) {
        try {
          info.constraint = SafeRegex::compile(a.constraint, a.cstring_mode);
        } catch (const RegexCompileError& e) {
          error(a.span, "regex", std::string("in alias '") + a.name + "': " + e.what());
        }
      }
      m_.aliases.emplace(a.name, std::move(info));
    }
    for (auto& e : m_.src.entities) {
      if (!type_names.insert(e.name).second) {
        error(e.span, "duplicate-name", "duplicate type name '" + e.name + "'");
        continue;
      }
      m_.entities.emplace(e.name, EntityInfo{&e, {}});
    }
    // Resolve entity field types after all type names are known.
    for (auto& [name, info] : m_.entities) {
      for (const auto& f : info.decl->fields) {
        TypePtr t = m_.resolve(f.type, &diags_);
        info.field_types.push_back(t ? t : t_bool());
      }
    }
    std::set<std::string> callables;
    for (auto& f : m_.src.functions) {
      if (!callables.insert(f.name).second) {
        error(f.span, "duplicate-name", "duplicate declaration '" + f.name + "'");
        continue;
      }
      m_.functions.emplace(f.name, &f);
    }
    for (auto& a : m_.src.apis) {
      if (!callables.insert(a.name).second) {
        error(a.span, "duplicate-name", "duplicate declaration '" + a.name + "'");
        continue;
      }
      m_.apis.emplace(a.name, &a);
    }
    for (auto& t : m_.src.chktests) {
      if (!callables.insert(t.name).second) {
        error(t.span, "duplicate-name", "duplicate declaration '" + t.name + "'");
        continue;
      }
      m_.chktests.emplace(t.name, &t);
    }
    for (auto& a : m_.src.agents) {
      if (!m_.agents.emplace(a.name, &a).second) {
        error(a.span, "duplicate-name", "duplicate agent '" + a.name + "'");
      }
    }
  }

  // ---- declaration checks ----

  void check_entities() {
    for (auto& e : m_.src.entities) {
      auto& info = m_.entities.at(e.name);
      std::set<std::string> fnames;
      for (auto& f : e.fields) {
        if (!fnames.insert(f.name).second) {
          error(f.span, "duplicate-name", "duplicate field '" + f.name + "'");
        }
      }
      current_entity_ = &e;
      ctx_ = Ctx::Invariant;
      for (auto& inv : e.invariants) {
        TypePtr t = check_expr(*inv.expr, nullptr);
        if (t && t->kind != Type::K::Bool) {
          error(inv.span, "invariant-type", "invariant expression must be Bool, found " + type_name(*t));
        }
      }
      current_entity_ = nullptr;
      (void)info;
    }
  }

  void push_params(const std::vector<Param>& params) {
    for (const auto& p : params) {
      TypePtr t = m_.resolve(p.type, &diags_);
      if (!t) t = t_bool();
      if (!scopes_.back().emplace(p.name, VarInfo{t, false}).second) {
        error(p.span, "duplicate-name", "duplicate parameter '" + p.name + "'");
      }
    }
  }

  void check_env_entries(const std::vector<EnvEntry>& env) {
    std::set<std::string> names;
    for (const auto& e : env) {
      if (!names.insert(e.name).second) {
        error(e.span, "duplicate-name", "duplicate env entry '" + e.name + "'");
      }
      m_.resolve(e.type, &diags_);
    }
  }

  void check_function(FunctionDecl& f) {
    current_callable_ = f.name;
    scopes_.clear();
    scopes_.emplace_back();
    push_params(f.params);
    if (f.has_env) check_env_entries(f.env);

    TypePtr ret = t_bool();  // omitted return types default to Bool
    if (f.has_ret) {
      TypePtr r = m_.resolve(f.ret, &diags_);
      if (r) ret = r;
    }

    bool is_action = f.kind == FunctionDecl::Kind::Action;
    current_env_ = f.has_env ? &f.env : nullptr;

    ctx_ = Ctx::Requires;
    for (auto& c : f.requires_clauses) check_bool_clause(c, "requires");
    ctx_ = Ctx::Ensures;
    current_result_ = ret;
    for (auto& c : f.ensures_clauses) check_bool_clause(c, "ensures");
    current_result_ = nullptr;

    ctx_ = is_action ? Ctx::ActionBody : Ctx::PureBody;
    if (f.body_is_hole) {
      check_hole(*f.body_hole, ret);
    } else {
      bool exits = check_block(f.body, ret);
      if (!exits && f.kind != FunctionDecl::Kind::Chktest) {
        error(f.span, "missing-return", "'" + f.name + "': not all paths return a value");
      }
    }
    current_env_ = nullptr;
  }

  void check_api(ApiDecl& a) {
    current_callable_ = a.name;
    scopes_.clear();
    scopes_.emplace_back();
    push_params(a.params);
    check_env_entries(a.env);
    if (a.has_ret) m_.resolve(a.ret, &diags_);

    // Permission glob slots must name reachable fields of declared params.
    for (const auto& perm : a.permissions) {
      for (const auto& piece : perm.pieces) {
        if (!piece.is_slot) continue;
        const Param* p = nullptr;
        for (const auto& q : a.params) {
          if (q.name == piece.param) p = &q;
        }
        if (!p) {
          error(perm.span, "permission-slot",
                "permission slot references unknown parameter '" + piece.param + "'");
          continue;
        }
        if (!piece.field.empty()) {
          TypePtr t = m_.resolve(p->type, nullptr);
          const EntityInfo* info =
              t && t->kind == Type::K::Entity ? &m_.entities.at(t->name) : nullptr;
          if (!info || info->field_index(piece.field) < 0) {
            error(perm.span, "permission-slot",
                  "permission slot references unknown field '" + piece.param + "." + piece.field + "'");
          }
        }
      }
    }

    current_env_ = &a.env;
    ctx_ = Ctx::ApiRequires;
    for (auto& c : a.requires_clauses) check_bool_clause(c, "requires");

    if (a.has_body) {
      ctx_ = Ctx::ActionBody;
      TypePtr ret = a.has_ret ? m_.resolve(a.ret, nullptr) : t_bool();
      if (!ret) ret = t_bool();
      bool exits = check_block(a.body, ret);
      if (!exits) {
        error(a.span, "missing-return", "'" + a.name + "': not all paths return a value");
      }
    }
    current_env_ = nullptr;
  }

  void check_bool_clause(Clause& c, const char* what) {
    TypePtr t = check_expr(*c.expr, t_bool());
    if (t && t->kind != Type::K::Bool) {
      error(c.span, "clause-type", std::string(what) + " clause must be Bool, found " + type_name(*t));
    }
  }

  void check_recursion() {
    // The checked fragment is loop-free; reject call cycles.
    std::set<std::string> done, path;
    std::function<bool(const std::string&)> visit = [&](const std::string& n) {
      if (done.count(n)) return true;
      if (!path.insert(n).second) return false;
      for (const auto& callee : call_edges_[n]) {
        if (!visit(callee)) {
          return false;
        }
      }
      path.erase(n);
      done.insert(n);
      return true;
    };
    for (const auto& [name, edges] : call_edges_) {
      if (!visit(name)) {
        Span sp;
        if (const FunctionDecl* f = m_.find_callable(name)) sp = f->span;
        error(sp, "recursion", "recursion is not allowed in the checked fragment (cycle through '" + name + "')");
        return;
      }
    }
  }

  // ---- statements ----

  VarInfo* lookup(const std::string& name) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  bool stmt_exits(const Stmt& s) {
    if (s.kind == StmtKind::Return) return true;
    if (s.kind == StmtKind::If && s.has_else) {
      return block_exits(s.then_block) && block_exits(s.else_block);
    }
    return false;
  }
  bool block_exits(const std::vector<StmtPtr>& b) {
    for (const auto& s : b) {
      if (stmt_exits(*s)) return true;
    }
    return false;
  }

  bool check_block(std::vector<StmtPtr>& stmts, const TypePtr& ret) {
    scopes_.emplace_back();
    bool exits = false;
    for (auto& sp : stmts) {
      if (exits) {
        error(sp->span, "unreachable", "unreachable statement");
        break;
      }
      exits = check_stmt(*sp, ret);
    }
    scopes_.pop_back();
    return exits;
  }

  bool check_stmt(Stmt& s, const TypePtr& ret) {
    switch (s.kind) {
      case StmtKind::Let:
      case StmtKind::Var: {
        TypePtr t = check_expr(*s.expr, nullptr);
        if (!t) t = t_bool();
        if (lookup(s.name)) {
          error(s.span, "duplicate-name", "redeclaration of '" + s.name + "'");
        } else {
          scopes_.back().emplace(s.name, VarInfo{t, s.kind == StmtKind::Var});
        }
        return false;
      }
      case StmtKind::Assign: {
        VarInfo* v = lookup(s.name);
        if (!v) {
          error(s.span, "unknown-name", "unknown variable '" + s.name + "'");
          check_expr(*s.expr, nullptr);
          return false;
        }
        if (!v->mutable_binding) {
          error(s.span, "immutable-binding",
                "immutable binding: '" + s.name + "' was declared with let");
        }
        TypePtr t = check_expr(*s.expr, v->type);
        if (t && !type_equal(*t, *v->type)) {
          error(s.span, "type-mismatch",
                "cannot assign " + type_name(*t) + " to '" + s.name + "' of type " + type_name(*v->type));
        }
        return false;
      }
      case StmtKind::If: {
        TypePtr c = check_expr(*s.expr, t_bool());
        if (c && c->kind != Type::K::Bool) {
          error(s.expr->span, "type-mismatch", "if condition must be Bool, found " + type_name(*c));
        }
        detect_narrowing(s);
        // `if (x !== none)` unwraps x inside the then block.
        scopes_.emplace_back();
        if (s.narrow_inside) {
          VarInfo* v = lookup(s.narrow_var);
          scopes_.back().emplace(s.narrow_var, VarInfo{v->type->elem, false});
        }
        bool then_exits = false;
        {
          bool exits = false;
          for (auto& t : s.then_block) {
            if (exits) {
              error(t->span, "unreachable", "unreachable statement");
              break;
            }
            exits = check_stmt(*t, ret);
          }
          then_exits = exits;
        }
        scopes_.pop_back();
        bool else_exits = false;
        if (s.has_else) {
          else_exits = check_block(s.else_block, ret);
        }
        // `if (x === none) { ..always exits.. }` unwraps x afterwards.
        if (s.narrow_after) {
          if (then_exits && !s.has_else) {
            VarInfo* v = lookup(s.narrow_var);
            v->type = v->type->elem;
          } else {
            s.narrow_after = false;
          }
        }
        return then_exits && s.has_else && else_exits;
      }
      case StmtKind::Return: {
        TypePtr t = check_expr(*s.expr, ret);
        if (t && t->kind != Type::K::Bool && s.expr->kind == ExprKind::Fail) {
          // fail(...) aborts; it satisfies any return type
        } else if (t && s.expr->kind != ExprKind::Fail && !type_equal(*t, *ret)) {
          error(s.span, "type-mismatch",
                "return type mismatch: expected " + type_name(*ret) + ", found " + type_name(*t));
        }
        return true;
      }
      case StmtKind::Assert: {
        TypePtr t = check_expr(*s.expr, t_bool());
        if (t && t->kind != Type::K::Bool) {
          error(s.span, "type-mismatch", "assert expression must be Bool, found " + type_name(*t));
        }
        return false;
      }
      case StmtKind::ExprStmt: {
        check_expr(*s.expr, nullptr);
        return false;
      }
    }
    return false;
  }

  void detect_narrowing(Stmt& s) {
    const Expr& c = *s.expr;
    if (c.kind != ExprKind::Binary) return;
    if (c.bin_op != BinOp::Eq && c.bin_op != BinOp::NotEq) return;
    const Expr* var = nullptr;
    if (c.args[0]->kind == ExprKind::Var && c.args[1]->kind == ExprKind::NoneLit) {
      var = c.args[0].get();
    } else if (c.args[1]->kind == ExprKind::Var && c.args[0]->kind == ExprKind::NoneLit) {
      var = c.args[1].get();
    }
    if (!var) return;
    VarInfo* v = lookup(var->name);
    if (!v || v->type->kind != Type::K::Option || v->mutable_binding) return;
    s.narrow_var = var->name;
    if (c.bin_op == BinOp::Eq) {
      s.narrow_after = true;  // confirmed after then-block analysis
    } else {
      s.narrow_inside = true;
    }
  }

  // ---- expressions ----

  bool in_pure_ctx() const {
    return ctx_ == Ctx::PureBody || ctx_ == Ctx::Invariant || ctx_ == Ctx::Requires ||
           ctx_ == Ctx::ApiRequires || ctx_ == Ctx::Ensures;
  }

  TypePtr set(Expr& e, TypePtr t) {
    e.rtype = t;
    return t;
  }

  TypePtr expect_alias_literal(Expr& e, Type::K literal_base) {
    auto it = m_.aliases.find(e.alias);
    if (it == m_.aliases.end()) {
      error(e.span, "unknown-type", "unknown alias '" + e.alias + "' in literal annotation");
      return nullptr;
    }
    Type::K base = it->second.base;
    bool ok = base == literal_base;
    // A decimal-looking literal can only feed a Decimal alias; an integer
    // literal only an Int alias; string flavors must match exactly.
    if (!ok) {
      error(e.span, "alias-base",
            "literal does not match base type of alias '" + e.alias + "'");
      return nullptr;
    }
    if (it->second.constraint && e.kind == ExprKind::StringLit &&
        !it->second.constraint->matches(e.name)) {
      error(e.span, "constraint",
            "literal does not match constraint of alias '" + e.alias + "' (/" +
                it->second.decl->constraint + "/)");
    }
    return t_alias(e.alias);
  }

  TypePtr check_hole(Expr& e, const TypePtr& expected) {
    TypePtr declared;
    if (e.hole_has_type) {
      declared = m_.resolve(e.hole_type, &diags_);
    }
    if (!declared && expected) declared = expected;
    if (!declared) {
      error(e.span, "hole-type", "hole needs a declared type ('?_ -> T') in this context");
      return set(e, t_bool());
    }
    if (expected && !type_equal(*declared, *expected)) {
      error(e.span, "type-mismatch",
            "hole type " + type_name(*declared) + " does not match expected " + type_name(*expected));
    }
    return set(e, declared);
  }

  TypePtr check_expr(Expr& e, TypePtr expected) {
    switch (e.kind) {
      case ExprKind::IntLit: {
        if (!e.alias.empty()) return set(e, expect_alias_literal(e, Type::K::Int));
        if (expected && expected->kind == Type::K::Alias &&
            m_.base_kind(*expected) == Type::K::Int) {
          return set(e, expected);  // literal adopts the expected alias
        }
        return set(e, t_int());
      }
      case ExprKind::DecimalLit: {
        if (!e.alias.empty()) return set(e, expect_alias_literal(e, Type::K::Decimal));
        if (expected && expected->kind == Type::K::Alias &&
            m_.base_kind(*expected) == Type::K::Decimal) {
          return set(e, expected);
        }
        return set(e, t_decimal());
      }
      case ExprKind::BoolLit:
        return set(e, t_bool());
      case ExprKind::StringLit: {
        Type::K lit = e.cstring ? Type::K::CString : Type::K::String;
        if (!e.alias.empty()) return set(e, expect_alias_literal(e, lit));
        if (expected && expected->kind == Type::K::Alias && m_.base_kind(*expected) == lit) {
          auto& info = m_.aliases.at(expected->name);
          if (info.constraint && !info.constraint->matches(e.name)) {
            error(e.span, "constraint",
                  "literal does not match constraint of alias '" + expected->name + "'");
          }
          return set(e, expected);
        }
        return set(e, lit == Type::K::CString ? t_cstring() : t_string());
      }
      case ExprKind::NoneLit: {
        if (expected && expected->kind == Type::K::Option) return set(e, expected);
        error(e.span, "type-ambiguous", "cannot infer the Option type of 'none' here");
        return set(e, t_option(t_bool()));
      }
      case ExprKind::Some: {
        TypePtr inner_expected =
            expected && expected->kind == Type::K::Option ? expected->elem : nullptr;
        TypePtr inner = check_expr(*e.args[0], inner_expected);
        return set(e, t_option(inner ? inner : t_bool()));
      }
      case ExprKind::Var: {
        if (e.name == "$events") {
          error(e.span, "events-context",
                "$events is only usable as $events.contains(...) in api requires clauses");
          return set(e, t_bool());
        }
        VarInfo* v = lookup(e.name);
        if (!v) {
          error(e.span, "unknown-name", "unknown identifier '" + e.name + "'");
          return set(e, t_bool());
        }
        return set(e, v->type);
      }
      case ExprKind::DollarField: {
        if (ctx_ != Ctx::Invariant || !current_entity_) {
          error(e.span, "dollar-context", "$" + e.name + " is only usable in entity invariants");
          return set(e, t_bool());
        }
        const auto& info = m_.entities.at(current_entity_->name);
        int idx = info.field_index(e.name);
        if (idx < 0) {
          error(e.span, "unknown-name",
                "invariant references unknown field '$" + e.name + "'");
          return set(e, t_bool());
        }
        return set(e, info.field_types[idx]);
      }
      case ExprKind::DollarResult: {
        if (ctx_ != Ctx::Ensures || !current_result_) {
          error(e.span, "dollar-context", "$result is only usable in ensures clauses");
          return set(e, t_bool());
        }
        return set(e, current_result_);
      }
      case ExprKind::Unary: {
        if (e.un_op == UnOp::Not) {
          TypePtr t = check_expr(*e.args[0], t_bool());
          if (t && t->kind != Type::K::Bool) {
            error(e.span, "type-mismatch", "'!' needs Bool, found " + type_name(*t));
          }
          return set(e, t_bool());
        }
        TypePtr t = check_expr(*e.args[0], expected);
        if (t) {
          Type::K b = m_.base_kind(*t);
          if (b != Type::K::Int && b != Type::K::Decimal) {
            error(e.span, "type-mismatch", "negation needs Int or Decimal, found " + type_name(*t));
            return set(e, t_int());
          }
        }
        return set(e, t ? t : t_int());
      }
      case ExprKind::Binary:
        return check_binary(e, expected);
      case ExprKind::IfExpr: {
        TypePtr c = check_expr(*e.args[0], t_bool());
        if (c && c->kind != Type::K::Bool) {
          error(e.args[0]->span, "type-mismatch", "condition must be Bool");
        }
        TypePtr a = check_expr(*e.args[1], expected);
        TypePtr b = check_expr(*e.args[2], expected ? expected : a);
        if (a && b && !type_equal(*a, *b)) {
          error(e.span, "type-mismatch",
                "if branches differ: " + type_name(*a) + " vs " + type_name(*b));
        }
        return set(e, a ? a : t_bool());
      }
      case ExprKind::FieldAccess: {
        TypePtr r = check_expr(*e.args[0], nullptr);
        if (!r) return set(e, t_bool());
        if (r->kind != Type::K::Entity) {
          error(e.span, "type-mismatch",
                "field access needs an entity, found " + type_name(*r));
          return set(e, t_bool());
        }
        const auto& info = m_.entities.at(r->name);
        int idx = info.field_index(e.name);
        if (idx < 0) {
          error(e.span, "unknown-name",
                "entity '" + r->name + "' has no field '" + e.name + "'");
          return set(e, t_bool());
        }
        return set(e, info.field_types[idx]);
      }
      case ExprKind::EntityCtor:
        return check_entity_ctor(e);
      case ExprKind::EntityPattern:
        error(e.span, "pattern-context",
              "entity patterns are only usable inside $events.contains(...)");
        return set(e, t_bool());
      case ExprKind::ListCtor: {
        TypePtr elem = m_.resolve(e.type_arg, &diags_);
        if (!elem) elem = t_bool();
        for (auto& a : e.args) {
          TypePtr t = check_expr(*a, elem);
          if (t && !type_equal(*t, *elem)) {
            error(a->span, "type-mismatch",
                  "list element is " + type_name(*t) + ", expected " + type_name(*elem));
          }
        }
        return set(e, t_list(elem));
      }
      case ExprKind::CollectionCall:
        return check_collection_call(e);
      case ExprKind::Call: {
        const FunctionDecl* f = m_.find_callable(e.name);
        if (!f || f->kind != FunctionDecl::Kind::Function) {
          error(e.span, "unknown-name",
                f ? "'" + e.name + "' is not a plain function (actions are invoked by the runtime)"
                  : "unknown function '" + e.name + "'");
          for (auto& a : e.args) check_expr(*a, nullptr);
          return set(e, t_bool());
        }
        call_edges_[current_callable_].insert(e.name);
        if (e.args.size() != f->params.size()) {
          error(e.span, "arity", "'" + e.name + "' takes " + std::to_string(f->params.size()) +
                                     " arguments, got " + std::to_string(e.args.size()));
        }
        for (size_t i = 0; i < e.args.size() && i < f->params.size(); i++) {
          TypePtr pt = m_.resolve(f->params[i].type, nullptr);
          TypePtr at = check_expr(*e.args[i], pt);
          if (at && pt && !type_equal(*at, *pt)) {
            error(e.args[i]->span, "type-mismatch",
                  "argument " + std::to_string(i + 1) + " of '" + e.name + "' is " + type_name(*at) +
                      ", expected " + type_name(*pt));
          }
        }
        TypePtr ret = f->has_ret ? m_.resolve(f->ret, nullptr) : t_bool();
        return set(e, ret ? ret : t_bool());
      }
      case ExprKind::ApiCall:
        return check_api_call(e);
      case ExprKind::AgentCall:
        return check_agent_call(e);
      case ExprKind::EnvRead: {
        if (ctx_ != Ctx::ActionBody && ctx_ != Ctx::ApiRequires) {
          error(e.span, "env-context", "env.* reads are only allowed in action/api bodies and api requires");
          return set(e, t_bool());
        }
        if (!current_env_) {
          error(e.span, "env-missing", "enclosing declaration has no env clause");
          return set(e, t_bool());
        }
        for (const auto& entry : *current_env_) {
          if (entry.name == e.name) {
            TypePtr t = m_.resolve(entry.type, nullptr);
            return set(e, t ? t : t_bool());
          }
        }
        error(e.span, "env-missing", "env entry '" + e.name + "' is not declared in the env clause");
        return set(e, t_bool());
      }
      case ExprKind::EnvLit: {
        if (e.env_spread && !current_env_) {
          error(e.span, "env-missing", "env{...} needs an enclosing env clause to forward");
        }
        return set(e, t_bool());  // env literal types are positional-only
      }
      case ExprKind::EventsContains: {
        if (ctx_ != Ctx::ApiRequires) {
          error(e.span, "events-context",
                "$events.contains(...) is only allowed in api requires clauses");
          return set(e, t_bool());
        }
        Expr& p = *e.args[0];
        if (p.kind != ExprKind::EntityPattern) {
          error(p.span, "pattern-context", "$events.contains takes an entity pattern Type{|...|}");
          return set(e, t_bool());
        }
        check_pattern(p);
        return set(e, t_bool());
      }
      case ExprKind::Hole:
        return check_hole(e, expected);
      case ExprKind::Fail: {
        if (ctx_ != Ctx::ActionBody) {
          error(e.span, "fail-context", "fail(...) is only allowed in action/api bodies");
        }
        TypePtr t = check_expr(*e.args[0], t_string());
        if (t && m_.base_kind(*t) != Type::K::String && m_.base_kind(*t) != Type::K::CString) {
          error(e.span, "type-mismatch", "fail message must be a string");
        }
        return set(e, expected ? expected : t_bool());
      }
      case ExprKind::Lambda:
        error(e.span, "lambda-context", "lambdas are only usable as collection operation arguments");
        return set(e, t_bool());
    }
    return set(e, t_bool());
  }

  TypePtr check_binary(Expr& e, TypePtr expected) {
    switch (e.bin_op) {
      case BinOp::And:
      case BinOp::Or: {
        TypePtr a = check_expr(*e.args[0], t_bool());
        TypePtr b = check_expr(*e.args[1], t_bool());
        for (auto [t, sp] : {std::pair{a, e.args[0]->span}, std::pair{b, e.args[1]->span}}) {
          if (t && t->kind != Type::K::Bool) {
            error(sp, "type-mismatch", "logical operand must be Bool, found " + type_name(*t));
          }
        }
        return set(e, t_bool());
      }
      case BinOp::Eq:
      case BinOp::NotEq: {
        // `x === none` compares an Option against none.
        Expr& lhs = *e.args[0];
        Expr& rhs = *e.args[1];
        if (rhs.kind == ExprKind::NoneLit || lhs.kind == ExprKind::NoneLit) {
          Expr& other = rhs.kind == ExprKind::NoneLit ? lhs : rhs;
          Expr& none = rhs.kind == ExprKind::NoneLit ? rhs : lhs;
          TypePtr t = check_expr(other, nullptr);
          if (t && t->kind != Type::K::Option) {
            error(e.span, "type-mismatch",
                  "comparison against none needs an Option, found " + type_name(*t));
            set(none, t_option(t_bool()));
          } else {
            set(none, t);
          }
          return set(e, t_bool());
        }
        TypePtr a = check_expr(lhs, nullptr);
        TypePtr b = check_expr(rhs, a);
        if (a && b && !type_equal(*a, *b)) {
          error(e.span, "type-mismatch",
                "cannot compare " + type_name(*a) + " with " + type_name(*b));
        }
        return set(e, t_bool());
      }
      case BinOp::Lt:
      case BinOp::LtEq:
      case BinOp::Gt:
      case BinOp::GtEq: {
        TypePtr a = check_expr(*e.args[0], nullptr);
        TypePtr b = check_expr(*e.args[1], a);
        if (a && b) {
          if (!type_equal(*a, *b)) {
            error(e.span, "type-mismatch",
                  "cannot compare " + type_name(*a) + " with " + type_name(*b) +
                      " (aliases do not coerce)");
          } else {
            Type::K base = m_.base_kind(*a);
            if (base != Type::K::Int && base != Type::K::Decimal) {
              error(e.span, "type-mismatch",
                    "ordering comparison needs Int or Decimal, found " + type_name(*a));
            }
          }
        }
        return set(e, t_bool());
      }
      default: {  // arithmetic
        TypePtr a = check_expr(*e.args[0], expected);
        TypePtr b = check_expr(*e.args[1], a ? a : expected);
        if (a && b) {
          if (!type_equal(*a, *b)) {
            error(e.span, "type-mismatch",
                  "arithmetic operands differ: " + type_name(*a) + " vs " + type_name(*b) +
                      " (aliases do not coerce)");
          } else {
            Type::K base = m_.base_kind(*a);
            if (base != Type::K::Int && base != Type::K::Decimal) {
              error(e.span, "type-mismatch",
                    "arithmetic needs Int or Decimal, found " + type_name(*a));
            }
          }
        }
        return set(e, a ? a : t_int());
      }
    }
  }

  void check_pattern(Expr& p) {
    auto it = m_.entities.find(p.name);
    if (it == m_.entities.end()) {
      error(p.span, "unknown-type", "unknown entity '" + p.name + "' in pattern");
      return;
    }
    std::set<std::string> seen;
    for (size_t i = 0; i < p.args.size(); i++) {
      const std::string& label = p.labels[i];
      if (!seen.insert(label).second) {
        error(p.span, "duplicate-name", "duplicate field '" + label + "' in pattern");
      }
      int idx = it->second.field_index(label);
      if (idx < 0) {
        error(p.span, "unknown-name", "entity '" + p.name + "' has no field '" + label + "'");
        check_expr(*p.args[i], nullptr);
        continue;
      }
      TypePtr ft = it->second.field_types[idx];
      TypePtr at = check_expr(*p.args[i], ft);
      if (at && !type_equal(*at, *ft)) {
        error(p.args[i]->span, "type-mismatch",
              "pattern field '" + label + "' is " + type_name(*at) + ", expected " + type_name(*ft));
      }
    }
    p.rtype = t_entity(p.name);
  }

  TypePtr check_entity_ctor(Expr& e) {
    auto it = m_.entities.find(e.name);
    if (it == m_.entities.end()) {
      error(e.span, "unknown-type", "unknown entity '" + e.name + "'");
      for (auto& a : e.args) check_expr(*a, nullptr);
      return set(e, t_bool());
    }
    const EntityInfo& info = it->second;
    if (e.named_fields) {
      std::set<std::string> seen;
      for (const auto& l : e.labels) {
        if (!seen.insert(l).second) {
          error(e.span, "duplicate-name", "duplicate field '" + l + "'");
        }
        if (info.field_index(l) < 0) {
          error(e.span, "unknown-name", "entity '" + e.name + "' has no field '" + l + "'");
        }
      }
      for (const auto& f : info.decl->fields) {
        if (!seen.count(f.name)) {
          error(e.span, "missing-field", "missing field '" + f.name + "' in '" + e.name + "' construction");
        }
      }
      for (size_t i = 0; i < e.args.size(); i++) {
        int idx = info.field_index(e.labels[i]);
        TypePtr ft = idx >= 0 ? info.field_types[idx] : nullptr;
        TypePtr at = check_expr(*e.args[i], ft);
        if (at && ft && !type_equal(*at, *ft)) {
          error(e.args[i]->span, "type-mismatch",
                "field '" + e.labels[i] + "' is " + type_name(*at) + ", expected " + type_name(*ft));
        }
      }
    } else {
      if (e.args.size() != info.decl->fields.size()) {
        error(e.span, "arity", "'" + e.name + "' has " + std::to_string(info.decl->fields.size()) +
                                   " fields, got " + std::to_string(e.args.size()));
      }
      for (size_t i = 0; i < e.args.size() && i < info.field_types.size(); i++) {
        TypePtr at = check_expr(*e.args[i], info.field_types[i]);
        if (at && !type_equal(*at, *info.field_types[i])) {
          error(e.args[i]->span, "type-mismatch",
                "field '" + info.decl->fields[i].name + "' is " + type_name(*at) + ", expected " +
                    type_name(*info.field_types[i]));
        }
      }
    }
    return set(e, t_entity(e.name));
  }

  TypePtr check_collection_call(Expr& e) {
    TypePtr recv = check_expr(*e.args[0], nullptr);
    if (!recv || recv->kind != Type::K::List) {
      if (recv) {
        error(e.span, "type-mismatch",
              "'" + e.name + "' needs a List receiver, found " + type_name(*recv));
      }
      return set(e, t_bool());
    }
    TypePtr elem = recv->elem;
    if (e.name == "sum") {
      if (e.args.size() != 1) {
        error(e.span, "arity", "sum() takes no arguments");
      }
      Type::K base = m_.base_kind(*elem);
      if (base != Type::K::Int && base != Type::K::Decimal) {
        error(e.span, "type-mismatch", "sum() needs numeric elements, found " + type_name(*elem));
      }
      return set(e, elem);
    }
    if (e.args.size() != 2 || e.args[1]->kind != ExprKind::Lambda) {
      error(e.span, "arity", "'" + e.name + "' takes one lambda argument");
      return set(e, t_bool());
    }
    Expr& lam = *e.args[1];
    TypePtr out_elem;
    TypePtr body_expected;
    if (e.name == "map") {
      if (!e.has_type_arg) {
        error(e.span, "type-ambiguous", "map needs an explicit element type: .map<T>(...)");
        out_elem = t_bool();
      } else {
        out_elem = m_.resolve(e.type_arg, &diags_);
        if (!out_elem) out_elem = t_bool();
      }
      body_expected = out_elem;
    } else {
      body_expected = t_bool();
    }
    scopes_.emplace_back();
    scopes_.back().emplace(lam.lambda_param, VarInfo{elem, false});
    TypePtr body = check_expr(*lam.args[0], body_expected);
    scopes_.pop_back();
    lam.rtype = body;
    if (body && body_expected && !type_equal(*body, *body_expected)) {
      error(lam.span, "type-mismatch",
            "'" + e.name + "' lambda returns " + type_name(*body) + ", expected " +
                type_name(*body_expected));
    }
    if (e.name == "map") return set(e, t_list(out_elem));
    if (e.name == "filter") return set(e, recv);
    return set(e, t_bool());  // allOf / noneOf
  }

  TypePtr check_api_call(Expr& e) {
    if (ctx_ != Ctx::ActionBody) {
      error(e.span, "purity", "api calls are only allowed in action/api bodies");
    }
    const ApiDecl* api = m_.find_api(e.name);
    if (!api) {
      error(e.span, "unknown-name", "unknown api '" + e.name + "'");
      for (auto& a : e.args) check_expr(*a, nullptr);
      return set(e, t_bool());
    }
    Expr& env_arg = *e.args[0];
    if (env_arg.kind != ExprKind::EnvLit) {
      error(env_arg.span, "env-context", "the first api argument must be env{} or env{...}");
    } else {
      check_expr(env_arg, nullptr);
      check_env_forwarding(env_arg, api->env, e.span, "api '" + e.name + "'");
    }
    if (e.args.size() - 1 != api->params.size()) {
      error(e.span, "arity", "api '" + e.name + "' takes " + std::to_string(api->params.size()) +
                                 " arguments, got " + std::to_string(e.args.size() - 1));
    }
    for (size_t i = 1; i < e.args.size() && i - 1 < api->params.size(); i++) {
      TypePtr pt = m_.resolve(api->params[i - 1].type, nullptr);
      TypePtr at = check_expr(*e.args[i], pt);
      if (at && pt && !type_equal(*at, *pt)) {
        error(e.args[i]->span, "type-mismatch",
              "argument '" + api->params[i - 1].name + "' is " + type_name(*at) + ", expected " +
                  type_name(*pt));
      }
    }
    TypePtr ret = api->has_ret ? m_.resolve(api->ret, nullptr) : t_bool();
    return set(e, ret ? ret : t_bool());
  }

  void check_env_forwarding(const Expr& env_arg, const std::vector<EnvEntry>& target_env,
                            Span sp, const std::string& what) {
    if (env_arg.env_spread) {
      for (const auto& need : target_env) {
        bool found = false;
        if (current_env_) {
          for (const auto& have : *current_env_) {
            if (have.name == need.name) {
              found = true;
              TypePtr ht = m_.resolve(have.type, nullptr);
              TypePtr nt = m_.resolve(need.type, nullptr);
              if (ht && nt && !type_equal(*ht, *nt)) {
                error(sp, "env-type", "env entry '" + need.name + "' has type " + type_name(*ht) +
                                          " here but " + what + " needs " + type_name(*nt));
              }
            }
          }
        }
        if (!found) {
          error(sp, "env-missing",
                "env{...} does not provide '" + need.name + "' required by " + what);
        }
      }
    } else {
      if (!target_env.empty()) {
        error(sp, "env-missing",
              what + " requires env entries (" + target_env[0].name + ", ...) but env{} is empty");
      }
    }
  }

  TypePtr check_agent_call(Expr& e) {
    if (ctx_ != Ctx::ActionBody) {
      error(e.span, "purity", "agent calls are only allowed in action/api bodies");
    }
    auto it = m_.agents.find(e.name);
    if (it == m_.agents.end()) {
      error(e.span, "unknown-name", "unknown agent '" + e.name + "'");
    }
    TypePtr shape = m_.resolve(e.type_arg, &diags_);
    if (!shape) shape = t_bool();
    Expr& env_arg = *e.args[0];
    if (env_arg.kind != ExprKind::EnvLit) {
      error(env_arg.span, "env-context", "the first agent argument must be env{} or env{...}");
    } else {
      check_expr(env_arg, nullptr);
      if (it != m_.agents.end()) {
        check_env_forwarding(env_arg, it->second->env, e.span, "agent '" + e.name + "'");
      }
    }
    TypePtr input = check_expr(*e.args[1], t_string());
    if (input) {
      Type::K b = m_.base_kind(*input);
      if (b != Type::K::String && b != Type::K::CString) {
        error(e.args[1]->span, "type-mismatch", "agent input must be a string");
      }
    }
    TypePtr prompt = check_expr(*e.args[2], t_string());
    if (prompt) {
      Type::K b = m_.base_kind(*prompt);
      if (b != Type::K::String && b != Type::K::CString) {
        error(e.args[2]->span, "type-mismatch", "agent prompt must be a string");
      }
    }
    return set(e, shape);
  }
};

}  // namespace

TypecheckResult typecheck(SourceModule m) {
  TypecheckResult out;
  TypedModule tm;
  tm.src = std::move(m);
  Checker checker(tm, out.diags);
  checker.run();
  if (!out.diags.has_errors()) {
    out.module = std::move(tm);
  }
  return out;
}

TypecheckResult compile_module(std::string_view source) {
  ParseResult p = parse_module(source);
  if (!p.ok()) {
    TypecheckResult out;
    out.diags = std::move(p.diags);
    return out;
  }
  return typecheck(std::move(*p.module));
}

}  // namespace aisette
