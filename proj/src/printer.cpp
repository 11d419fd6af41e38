#include <sstream>

#include "aisette/parser.hpp"

namespace aisette {

namespace {

std::string escape_string(const std::string& s, char quote) {
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back(quote);
  for (char c : s) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\\': out += "\\\\"; break;
      default:
        if (c == quote) {
          out.push_back('\\');
        }
        out.push_back(c);
    }
  }
  out.push_back(quote);
  return out;
}

std::string decimal_text(int64_t scaled) {
  bool neg = scaled < 0;
  uint64_t mag = neg ? -static_cast<uint64_t>(scaled) : static_cast<uint64_t>(scaled);
  uint64_t whole = mag / 10000;
  uint64_t frac = mag % 10000;
  char fbuf[8];
  std::snprintf(fbuf, sizeof(fbuf), "%04llu", static_cast<unsigned long long>(frac));
  std::string f(fbuf);
  // Trim trailing zeros but keep two fractional digits.
  while (f.size() > 2 && f.back() == '0') f.pop_back();
  return (neg ? "-" : "") + std::to_string(whole) + "." + f;
}

int prec_of(BinOp op) {
  switch (op) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Eq:
    case BinOp::NotEq: return 3;
    case BinOp::Lt:
    case BinOp::LtEq:
    case BinOp::Gt:
    case BinOp::GtEq: return 4;
    case BinOp::Add:
    case BinOp::Sub: return 5;
    case BinOp::Mul:
    case BinOp::Div: return 6;
  }
  return 0;
}

const char* op_text(BinOp op) {
  switch (op) {
    case BinOp::Or: return "||";
    case BinOp::And: return "&&";
    case BinOp::Eq: return "==";
    case BinOp::NotEq: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::LtEq: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::GtEq: return ">=";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
  }
  return "?";
}

void print_expr_prec(const Expr& e, int parent_prec, std::string& out);

void print_args(const Expr& e, size_t from, std::string& out) {
  for (size_t i = from; i < e.args.size(); i++) {
    if (i > from) out += ", ";
    print_expr_prec(*e.args[i], 0, out);
  }
}

void print_fields(const Expr& e, std::string& out) {
  for (size_t i = 0; i < e.args.size(); i++) {
    if (i > 0) out += ", ";
    if (e.named_fields) {
      out += e.labels[i] + " = ";
    }
    print_expr_prec(*e.args[i], 0, out);
  }
}

void print_expr_prec(const Expr& e, int parent_prec, std::string& out) {
  switch (e.kind) {
    case ExprKind::IntLit:
      out += std::to_string(e.num);
      out += e.alias.empty() ? "i" : "<" + e.alias + ">";
      break;
    case ExprKind::DecimalLit:
      out += decimal_text(e.num);
      out += e.alias.empty() ? "d" : "<" + e.alias + ">";
      break;
    case ExprKind::BoolLit:
      out += e.bval ? "true" : "false";
      break;
    case ExprKind::StringLit:
      out += escape_string(e.name, e.cstring ? '\'' : '"');
      if (!e.alias.empty()) out += "<" + e.alias + ">";
      break;
    case ExprKind::NoneLit:
      out += "none";
      break;
    case ExprKind::Some:
      out += "some(";
      print_expr_prec(*e.args[0], 0, out);
      out += ")";
      break;
    case ExprKind::Var:
      out += e.name;  // includes "$events"
      break;
    case ExprKind::DollarField:
      out += "$" + e.name;
      break;
    case ExprKind::DollarResult:
      out += "$result";
      break;
    case ExprKind::Unary: {
      out += e.un_op == UnOp::Neg ? "-" : "!";
      const Expr& a = *e.args[0];
      bool parens = a.kind == ExprKind::Binary;
      if (parens) out += "(";
      print_expr_prec(a, 7, out);
      if (parens) out += ")";
      break;
    }
    case ExprKind::Binary: {
      int p = prec_of(e.bin_op);
      bool parens = p < parent_prec;
      if (parens) out += "(";
      print_expr_prec(*e.args[0], p, out);
      out += " ";
      out += op_text(e.bin_op);
      out += " ";
      print_expr_prec(*e.args[1], p + 1, out);
      if (parens) out += ")";
      break;
    }
    case ExprKind::IfExpr:
      out += "if (";
      print_expr_prec(*e.args[0], 0, out);
      out += ") then ";
      print_expr_prec(*e.args[1], 7, out);
      out += " else ";
      print_expr_prec(*e.args[2], 7, out);
      break;
    case ExprKind::FieldAccess:
      print_expr_prec(*e.args[0], 8, out);
      out += "." + e.name;
      break;
    case ExprKind::EntityCtor:
      out += e.name + "{";
      print_fields(e, out);
      out += "}";
      break;
    case ExprKind::EntityPattern:
      out += e.name + "{|";
      print_fields(e, out);
      out += "|}";
      break;
    case ExprKind::ListCtor:
      out += "List<" + print_type_ref(e.type_arg) + ">{";
      print_args(e, 0, out);
      out += "}";
      break;
    case ExprKind::CollectionCall:
      print_expr_prec(*e.args[0], 8, out);
      out += "." + e.name;
      if (e.has_type_arg) out += "<" + print_type_ref(e.type_arg) + ">";
      out += "(";
      print_args(e, 1, out);
      out += ")";
      break;
    case ExprKind::Call:
      out += e.name + "(";
      print_args(e, 0, out);
      out += ")";
      break;
    case ExprKind::ApiCall:
      out += "api " + e.name + "(";
      print_args(e, 0, out);
      out += ")";
      break;
    case ExprKind::AgentCall:
      out += "agent " + e.name + "<" + print_type_ref(e.type_arg) + ">(";
      print_args(e, 0, out);
      out += ")";
      break;
    case ExprKind::EnvRead:
      out += "env." + e.name;
      break;
    case ExprKind::EnvLit:
      out += e.env_spread ? "env{...}" : "env{}";
      break;
    case ExprKind::EventsContains:
      out += "$events.contains(";
      print_expr_prec(*e.args[0], 0, out);
      out += ")";
      break;
    case ExprKind::Hole:
      out += "?" + (e.hole_name.empty() ? std::string("_") : e.hole_name);
      if (e.hole_examples) out += "(examples = true)";
      if (e.hole_has_type) out += " -> " + print_type_ref(e.hole_type);
      break;
    case ExprKind::Fail:
      out += "fail(";
      print_expr_prec(*e.args[0], 0, out);
      out += ")";
      break;
    case ExprKind::Lambda:
      out += (e.name == "fn" ? "fn(" : "pred(") + e.lambda_param + ") => ";
      print_expr_prec(*e.args[0], 0, out);
      break;
  }
}

void print_block(const std::vector<StmtPtr>& body, int indent, std::string& out) {
  out += "{\n";
  for (const auto& s : body) {
    out += print_stmt(*s, indent + 1);
  }
  out += std::string(indent * 2, ' ') + "}";
}

void print_doc(const std::string& doc, std::string& out) {
  if (doc.empty()) return;
  out += "%**";
  bool first = true;
  size_t start = 0;
  while (start <= doc.size()) {
    size_t nl = doc.find('\n', start);
    std::string line = doc.substr(start, nl == std::string::npos ? doc.size() - start : nl - start);
    out += first ? " " + line + "\n" : "* " + line + "\n";
    first = false;
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  out += "**%\n";
}

void print_env_clause(const std::vector<EnvEntry>& env, std::string& out) {
  out += "  env={";
  for (size_t i = 0; i < env.size(); i++) {
    if (i) out += ", ";
    out += env[i].name + ": " + print_type_ref(env[i].type);
  }
  out += "}\n";
}

void print_signature(const std::vector<Param>& params, std::string& out) {
  out += "(";
  for (size_t i = 0; i < params.size(); i++) {
    if (i) out += ", ";
    out += params[i].name + ": " + print_type_ref(params[i].type);
  }
  out += ")";
}

}  // namespace

std::string print_type_ref(const TypeRef& t) {
  std::string out = t.name;
  if (!t.args.empty()) {
    out += "<" + print_type_ref(t.args[0]) + ">";
  }
  return out;
}

std::string print_expr(const Expr& e) {
  std::string out;
  print_expr_prec(e, 0, out);
  return out;
}

std::string print_stmt(const Stmt& s, int indent) {
  std::string pad(indent * 2, ' ');
  std::string out = pad;
  switch (s.kind) {
    case StmtKind::Let:
      out += "let " + s.name + " = " + print_expr(*s.expr) + ";\n";
      break;
    case StmtKind::Var:
      out += "var " + s.name + " = " + print_expr(*s.expr) + ";\n";
      break;
    case StmtKind::Assign:
      out += s.name + " = " + print_expr(*s.expr) + ";\n";
      break;
    case StmtKind::Return:
      out += "return " + print_expr(*s.expr) + ";\n";
      break;
    case StmtKind::Assert:
      out += "assert " + print_expr(*s.expr) + ";\n";
      break;
    case StmtKind::ExprStmt:
      out += print_expr(*s.expr) + ";\n";
      break;
    case StmtKind::If: {
      out += "if (" + print_expr(*s.expr) + ") ";
      print_block(s.then_block, indent, out);
      if (s.has_else) {
        out += " else ";
        print_block(s.else_block, indent, out);
      }
      out += "\n";
      break;
    }
  }
  return out;
}

std::string print_module(const SourceModule& m) {
  std::string out;
  for (const auto& a : m.aliases) {
    print_doc(a.doc, out);
    if (a.sensitive) out += "sensitive ";
    out += "type " + a.name + " = " + a.base;
    if (a.has_constraint) {
      out += " of /" + a.constraint + "/";
      if (a.cstring_mode) out += "c";
    }
    out += ";\n\n";
  }
  for (const auto& e : m.entities) {
    print_doc(e.doc, out);
    out += "entity " + e.name + " {\n";
    for (const auto& f : e.fields) {
      out += "  field " + f.name + ": " + print_type_ref(f.type) + ";\n";
    }
    for (const auto& inv : e.invariants) {
      out += "  invariant " + print_expr(*inv.expr) + ";\n";
    }
    out += "}\n\n";
  }
  for (const auto& a : m.agents) {
    print_doc(a.doc, out);
    out += "agent " + a.name;
    if (!a.env.empty()) {
      out += "\n";
      print_env_clause(a.env, out);
    }
    out += ";\n\n";
  }
  for (const auto& a : m.apis) {
    print_doc(a.doc, out);
    out += "api " + a.name;
    print_signature(a.params, out);
    if (a.has_ret) out += ": " + print_type_ref(a.ret);
    out += "\n";
    if (!a.env.empty()) print_env_clause(a.env, out);
    if (!a.permissions.empty()) {
      out += "  permissions={";
      for (size_t i = 0; i < a.permissions.size(); i++) {
        if (i) out += ", ";
        out += "\\" + a.permissions[i].raw + "\\";
      }
      out += "}\n";
    }
    for (const auto& r : a.requires_clauses) {
      out += "  requires " + print_expr(*r.expr) + ";\n";
    }
    if (a.has_body) {
      print_block(a.body, 0, out);
      out += "\n\n";
    } else {
      out += ";\n\n";
    }
  }
  auto print_fn = [&](const FunctionDecl& f) {
    print_doc(f.doc, out);
    switch (f.kind) {
      case FunctionDecl::Kind::Function: out += "function "; break;
      case FunctionDecl::Kind::Action: out += "action "; break;
      case FunctionDecl::Kind::Chktest: out += "chktest "; break;
    }
    out += f.name;
    print_signature(f.params, out);
    if (f.has_ret) out += ": " + print_type_ref(f.ret);
    if (f.has_env) {
      out += "\n";
      print_env_clause(f.env, out);
    }
    for (const auto& r : f.requires_clauses) {
      out += "\n  requires " + print_expr(*r.expr) + ";";
    }
    for (const auto& r : f.ensures_clauses) {
      out += "\n  ensures " + print_expr(*r.expr) + ";";
    }
    out += f.requires_clauses.empty() && f.ensures_clauses.empty() && !f.has_env ? " " : "\n";
    if (f.body_is_hole) {
      out += "{\n  " + print_expr(*f.body_hole) + ";\n}";
    } else {
      print_block(f.body, 0, out);
    }
    out += "\n\n";
  };
  for (const auto& f : m.functions) print_fn(f);
  for (const auto& f : m.chktests) print_fn(f);
  return out;
}

// ---- deep clone ----

ExprPtr clone_expr(const Expr& e) {
  auto c = Expr::make(e.kind, e.span);
  c->num = e.num;
  c->bval = e.bval;
  c->name = e.name;
  c->cstring = e.cstring;
  c->alias = e.alias;
  c->un_op = e.un_op;
  c->bin_op = e.bin_op;
  for (const auto& a : e.args) c->args.push_back(clone_expr(*a));
  c->labels = e.labels;
  c->named_fields = e.named_fields;
  c->type_arg = e.type_arg;
  c->has_type_arg = e.has_type_arg;
  c->env_spread = e.env_spread;
  c->hole_name = e.hole_name;
  c->hole_doc = e.hole_doc;
  c->hole_examples = e.hole_examples;
  c->hole_type = e.hole_type;
  c->hole_has_type = e.hole_has_type;
  c->lambda_param = e.lambda_param;
  return c;
}

StmtPtr clone_stmt(const Stmt& s) {
  auto c = Stmt::make(s.kind, s.span);
  c->name = s.name;
  if (s.expr) c->expr = clone_expr(*s.expr);
  for (const auto& t : s.then_block) c->then_block.push_back(clone_stmt(*t));
  for (const auto& t : s.else_block) c->else_block.push_back(clone_stmt(*t));
  c->has_else = s.has_else;
  c->narrow_var = s.narrow_var;
  c->narrow_after = s.narrow_after;
  c->narrow_inside = s.narrow_inside;
  return c;
}

}  // namespace aisette
