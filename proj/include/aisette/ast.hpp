#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "aisette/diagnostics.hpp"

namespace aisette {

struct Type;
using TypePtr = std::shared_ptr<const Type>;

// Syntactic type reference: a name plus optional container arguments.
struct TypeRef {
  std::string name;
  std::vector<TypeRef> args;
  Span span;

  bool empty() const { return name.empty(); }
};

enum class ExprKind {
  IntLit,
  DecimalLit,
  BoolLit,
  StringLit,  // cstring flag distinguishes '...' from "..."
  NoneLit,
  Some,           // some(e)
  Var,
  DollarField,    // $name inside entity invariants
  DollarResult,   // $result inside ensures
  Unary,
  Binary,
  IfExpr,         // if (c) then a else b
  FieldAccess,    // e.name
  EntityCtor,     // Type{...} named or positional
  EntityPattern,  // Type{| name = e, ... |}
  ListCtor,       // List<T>{...}
  CollectionCall, // e.allOf(...) etc.
  Call,           // f(args)
  ApiCall,        // api f(envexpr, args...)
  AgentCall,      // agent A::b<T>(envexpr, input, prompt)
  EnvRead,        // env.NAME
  EnvLit,         // env{} or env{...}
  EventsContains, // $events.contains(pattern)
  Hole,           // ?_name(examples = true) -> T
  Fail,           // fail(msg)
  Lambda,         // pred(x) => e / fn(x) => e
};

enum class BinOp { Add, Sub, Mul, Div, Lt, LtEq, Gt, GtEq, Eq, NotEq, And, Or };
enum class UnOp { Neg, Not };

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  ExprKind kind;
  Span span;

  int64_t num = 0;        // IntLit value / DecimalLit scaled-by-10^4 value
  bool bval = false;      // BoolLit
  std::string name;       // var/field/callee/entity/env/collection-op name; string text
  bool cstring = false;   // StringLit flavor
  std::string alias;      // alias annotation on a literal, "" if none

  UnOp un_op{};
  BinOp bin_op{};

  std::vector<ExprPtr> args;        // operands / call args / field values / elements
  std::vector<std::string> labels;  // field names for named EntityCtor / EntityPattern
  bool named_fields = false;

  TypeRef type_arg;       // List<T> element, map<T>, agent shape <T>
  bool has_type_arg = false;

  bool env_spread = false;  // EnvLit: env{...}

  std::string hole_name;    // "" for ?_
  std::string hole_doc;
  bool hole_examples = false;
  TypeRef hole_type;
  bool hole_has_type = false;

  std::string lambda_param;

  TypePtr rtype;  // resolved type, filled by the typechecker

  static ExprPtr make(ExprKind k, Span sp) {
    auto e = std::make_unique<Expr>();
    e->kind = k;
    e->span = sp;
    return e;
  }
};

enum class StmtKind { Let, Var, Assign, If, Return, ExprStmt, Assert };

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
  StmtKind kind;
  Span span;
  std::string name;  // binding / assignment target
  ExprPtr expr;      // init / value / condition / return value / asserted expr
  std::vector<StmtPtr> then_block;
  std::vector<StmtPtr> else_block;
  bool has_else = false;

  // Filled by the typechecker for option-narrowing if-statements:
  // `if (x === none) { ..exit.. }` unwraps x after the if, and
  // `if (x !== none) { ... }` unwraps x inside the then block.
  std::string narrow_var;
  bool narrow_after = false;
  bool narrow_inside = false;

  static StmtPtr make(StmtKind k, Span sp) {
    auto s = std::make_unique<Stmt>();
    s->kind = k;
    s->span = sp;
    return s;
  }
};

// A requires/ensures/invariant clause with its verbatim source text.
struct Clause {
  ExprPtr expr;
  std::string text;
  Span span;
};

struct TypeAliasDecl {
  std::string name;
  std::string base;  // Int | Decimal | CString | String | Bool
  std::string constraint;  // regex body without delimiters, "" if none
  bool has_constraint = false;
  bool cstring_mode = false;  // /.../c
  bool sensitive = false;
  std::string doc;
  Span span;
};

struct EntityField {
  std::string name;
  TypeRef type;
  Span span;
};

struct EntityDecl {
  std::string name;
  std::vector<EntityField> fields;
  std::vector<Clause> invariants;
  std::string doc;
  Span span;
};

struct Param {
  std::string name;
  TypeRef type;
  Span span;
};

struct EnvEntry {
  std::string name;
  TypeRef type;
  Span span;
};

// URI glob template from a permissions clause, split into literal text and
// ${param.field} interpolation slots.
struct PermissionTemplate {
  struct Piece {
    bool is_slot = false;
    std::string text;   // literal piece
    std::string param;  // slot: parameter name
    std::string field;  // slot: field path ("" = whole param)
  };
  std::string raw;
  std::vector<Piece> pieces;
  Span span;
};

struct FunctionDecl {
  enum class Kind { Function, Action, Chktest };
  Kind kind = Kind::Function;
  std::string name;
  std::vector<Param> params;
  TypeRef ret;
  bool has_ret = false;
  std::vector<Clause> requires_clauses;
  std::vector<Clause> ensures_clauses;
  std::vector<EnvEntry> env;
  bool has_env = false;
  std::vector<StmtPtr> body;
  bool body_is_hole = false;
  ExprPtr body_hole;
  std::string doc;
  Span span;
};

struct ApiDecl {
  std::string name;
  std::vector<Param> params;
  TypeRef ret;
  bool has_ret = false;
  std::vector<EnvEntry> env;
  std::vector<PermissionTemplate> permissions;
  std::vector<Clause> requires_clauses;
  std::vector<StmtPtr> body;
  bool has_body = false;
  std::string doc;
  Span span;
};

struct AgentDecl {
  std::string name;  // qualified, e.g. "Chat::compute"
  std::vector<EnvEntry> env;
  std::string doc;
  Span span;
};

struct SourceModule {
  std::vector<TypeAliasDecl> aliases;
  std::vector<EntityDecl> entities;
  std::vector<FunctionDecl> functions;  // kind Function and Action
  std::vector<ApiDecl> apis;
  std::vector<AgentDecl> agents;
  std::vector<FunctionDecl> chktests;   // kind Chktest
  std::string source;  // owned copy of the input text
};

// Deep structural clone (spans included, resolved types dropped).
ExprPtr clone_expr(const Expr& e);
StmtPtr clone_stmt(const Stmt& s);

}  // namespace aisette
