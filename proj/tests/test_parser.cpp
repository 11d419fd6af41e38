#include "doctest.h"

#include "aisette/parser.hpp"
#include "support.hpp"

using namespace aisette;

TEST_SUITE_BEGIN("parser");

static SourceModule parse_or_fail(const std::string& src) {
  auto r = parse_module(src);
  if (!r.ok()) {
    std::string all;
    for (const auto& d : r.diags.items()) all += format_diagnostic(d) + "\n";
    FAIL("parse failed:\n", all);
  }
  return std::move(*r.module);
}

TEST_CASE("sign function structure") {
  auto m = parse_or_fail(read_file(sample_path("sign.bsq")));
  REQUIRE(m.functions.size() == 1);
  const auto& f = m.functions[0];
  CHECK(f.name == "sign");
  CHECK(f.kind == FunctionDecl::Kind::Function);
  REQUIRE(f.params.size() == 1);
  CHECK(f.params[0].name == "x");
  CHECK(f.params[0].type.name == "Int");
  REQUIRE(f.body.size() == 3);
  CHECK(f.body[0]->kind == StmtKind::Var);
  CHECK(f.body[1]->kind == StmtKind::If);
  CHECK(f.body[2]->kind == StmtKind::Return);
  REQUIRE(m.chktests.size() == 1);
  CHECK(m.chktests[0].name == "signRange");
}

TEST_CASE("aliases and invariants from the forecast module") {
  auto m = parse_or_fail(read_file(sample_path("forecast.bsq")));
  REQUIRE(m.aliases.size() == 2);
  CHECK(m.aliases[0].name == "Fahrenheit");
  CHECK(m.aliases[0].base == "Int");
  CHECK(!m.aliases[0].has_constraint);
  CHECK(m.aliases[1].name == "ZipCode");
  CHECK(m.aliases[1].has_constraint);
  CHECK(m.aliases[1].cstring_mode);
  REQUIRE(m.entities.size() == 2);
  const auto& tr = m.entities[0];
  CHECK(tr.name == "TempRange");
  REQUIRE(tr.invariants.size() == 1);
  CHECK(tr.invariants[0].text == "$low <= $high");
  CHECK(m.entities[1].invariants.empty());
}

TEST_CASE("abs body hole with examples flag") {
  auto m = parse_or_fail(read_file(sample_path("holes.bsq")));
  REQUIRE(m.functions.size() == 2);
  const auto& abs = m.functions[1];
  CHECK(abs.name == "abs");
  CHECK(abs.body_is_hole);
  REQUIRE(abs.body_hole);
  CHECK(abs.body_hole->hole_name == "_absbody");
  CHECK(abs.body_hole->hole_examples);
  REQUIRE(abs.ensures_clauses.size() == 1);
  CHECK(abs.ensures_clauses[0].text == "$result >= 0i");

  const auto& sign = m.functions[0];
  const Stmt& ifstmt = *sign.body[1];
  REQUIRE(ifstmt.then_block.size() == 1);
  const Expr& hole = *ifstmt.then_block[0]->expr;
  CHECK(hole.kind == ExprKind::Hole);
  CHECK(hole.hole_name.empty());
  CHECK(hole.hole_has_type);
  CHECK(hole.hole_type.name == "Int");
}

TEST_CASE("api declaration with env, permissions and event precondition") {
  auto m = parse_or_fail(read_file(sample_path("payments.bsq")));
  REQUIRE(m.apis.size() == 1);
  const auto& api = m.apis[0];
  CHECK(api.name == "transfer");
  CHECK(!api.has_body);
  REQUIRE(api.env.size() == 2);
  CHECK(api.env[0].name == "PAYMENT_AUTHORIZATION");
  CHECK(api.env[1].name == "PAYMENT_LIMIT");
  REQUIRE(api.permissions.size() == 1);
  CHECK(api.permissions[0].raw == "account:${payer.routing}/${payer.account}");
  REQUIRE(api.permissions[0].pieces.size() == 4);
  CHECK(api.permissions[0].pieces[1].is_slot);
  CHECK(api.permissions[0].pieces[1].param == "payer");
  CHECK(api.permissions[0].pieces[1].field == "routing");
  REQUIRE(api.requires_clauses.size() == 2);
  CHECK(api.requires_clauses[0].text == "0.0<USD> < amt");
  CHECK(api.requires_clauses[1].expr->kind == ExprKind::Binary);

  REQUIRE(m.functions.size() == 1);
  const auto& act = m.functions[0];
  CHECK(act.kind == FunctionDecl::Kind::Action);
  CHECK(act.doc.find("compute the amount to pay") != std::string::npos);
  REQUIRE(act.body.size() == 4);
  CHECK(act.body[0]->expr->kind == ExprKind::AgentCall);
  CHECK(act.body[0]->expr->name == "Chat::compute");
  CHECK(act.body[2]->expr->kind == ExprKind::ApiCall);
}

TEST_CASE("syntax errors carry span and expectation") {
  auto r = parse_module("function f(x Int): Int { return x; }");
  REQUIRE(!r.ok());
  const auto& d = r.diags.items()[0];
  CHECK(d.message.find("expected") != std::string::npos);
  CHECK(d.span.valid_in(std::string("function f(x Int): Int { return x; }").size()));
}

TEST_CASE("print/parse round trip on all samples") {
  for (auto name : {"sign.bsq", "forecast.bsq", "order.bsq", "payments.bsq", "holes.bsq",
                    "collections.bsq"}) {
    CAPTURE(name);
    auto m1 = parse_or_fail(read_file(sample_path(name)));
    std::string p1 = print_module(m1);
    auto m2 = parse_or_fail(p1);
    std::string p2 = print_module(m2);
    CHECK(p1 == p2);
  }
}

TEST_CASE("expression forms round trip") {
  std::string src =
      "function f(x: Int, l: List<Int>, o: Option<Int>): Int {\n"
      "  let a = if (x < 0i) then -x else x + 1i;\n"
      "  let b = l.map<Int>(fn(y) => y * 2i).filter(pred(y) => y >= 0i).sum();\n"
      "  let c = List<Int>{1i, 2i, 3i}.allOf(pred(y) => y != a);\n"
      "  let d = (x + 1i) * (x - 1i);\n"
      "  return a + b + d;\n"
      "}\n";
  auto m1 = parse_or_fail(src);
  std::string p1 = print_module(m1);
  auto m2 = parse_or_fail(p1);
  CHECK(print_module(m2) == p1);
}

TEST_SUITE_END();
