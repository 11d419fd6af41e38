#include "doctest.h"

#include "aisette/typecheck.hpp"
#include "support.hpp"

using namespace aisette;

TEST_SUITE_BEGIN("typecheck");

static DiagnosticList diags_of(const std::string& src) {
  auto r = compile_module(src);
  REQUIRE(!r.ok());
  return r.diags;
}

static bool has_code(const DiagnosticList& d, const std::string& code) {
  for (const auto& item : d.items()) {
    if (item.code == code) return true;
  }
  return false;
}

TEST_CASE("all samples typecheck") {
  for (auto name : {"sign.bsq", "forecast.bsq", "order.bsq", "payments.bsq", "holes.bsq",
                    "collections.bsq"}) {
    CAPTURE(name);
    compile_sample(name);
  }
}

TEST_CASE("sign return type resolves to Int") {
  auto m = compile_sample("sign.bsq");
  const FunctionDecl* f = m.find_callable("sign");
  REQUIRE(f);
  TypePtr ret = m.resolve(f->ret, nullptr);
  REQUIRE(ret);
  CHECK(ret->kind == Type::K::Int);
  // every expression annotated
  CHECK(f->body[2]->expr->rtype);
  CHECK(f->body[2]->expr->rtype->kind == Type::K::Int);
}

TEST_CASE("alias does not coerce to its base") {
  auto d = diags_of(
      "type MilliSeconds = Int;\n"
      "function wait(duration: MilliSeconds): Bool { return true; }\n"
      "function go(n: Int): Bool { return wait(n); }\n");
  CHECK(has_code(d, "type-mismatch"));
}

TEST_CASE("alias does not coerce to a different alias") {
  auto d = diags_of(
      "type Fahrenheit = Int;\n"
      "type Celsius = Int;\n"
      "function f(a: Fahrenheit): Bool { return true; }\n"
      "function g(c: Celsius): Bool { return f(c); }\n");
  CHECK(has_code(d, "type-mismatch"));
}

TEST_CASE("literals adopt the expected alias type") {
  compile_or_fail(
      "type Fahrenheit = Int;\n"
      "entity TempRange { field low: Fahrenheit; field high: Fahrenheit; invariant $low <= $high; }\n"
      "function mk(): TempRange { return TempRange{low=10i, high=20i}; }\n");
}

TEST_CASE("let reassignment is rejected") {
  auto d = diags_of("function f(x: Int): Int { let y = x; y = 1i; return y; }");
  CHECK(has_code(d, "immutable-binding"));
  for (const auto& item : d.items()) {
    if (item.code == "immutable-binding") {
      CHECK(item.message.find("immutable binding") != std::string::npos);
    }
  }
}

TEST_CASE("var reassignment is fine") {
  compile_or_fail("function f(x: Int): Int { var y = x; y = 1i; return y; }");
}

TEST_CASE("invariant must be boolean") {
  auto d = diags_of("entity E { field a: Int; invariant $a + 1i; }");
  CHECK(has_code(d, "invariant-type"));
}

TEST_CASE("events outside api requires is rejected") {
  auto d = diags_of(
      "entity Ping { field n: Int; }\n"
      "function f(x: Int): Bool { return $events.contains(Ping{|n=x|}); }\n");
  CHECK(has_code(d, "events-context"));
}

TEST_CASE("unknown identifier carries a span") {
  auto d = diags_of("function f(x: Int): Int { return y; }");
  REQUIRE(has_code(d, "unknown-name"));
  for (const auto& item : d.items()) {
    CHECK(item.span.valid_in(std::string("function f(x: Int): Int { return y; }").size()));
  }
}

TEST_CASE("recursion is rejected") {
  auto d = diags_of("function f(x: Int): Int { return f(x); }");
  CHECK(has_code(d, "recursion"));
}

TEST_CASE("api calls are forbidden in pure functions") {
  auto d = diags_of(
      "api ping(n: Int);\n"
      "function f(x: Int): Bool { return api ping(env{}, x); }\n");
  CHECK(has_code(d, "purity"));
}

TEST_CASE("constraint violations in literals are caught early") {
  auto d = diags_of(
      "type ZipCode = CString of /[0-9]{5}/c;\n"
      "function f(): ZipCode { return '4050'<ZipCode>; }\n");
  CHECK(has_code(d, "constraint"));
}

TEST_CASE("option narrowing after none guard") {
  auto m = compile_or_fail(
      "function f(o: Option<Int>): Int {\n"
      "  if (o === none) {\n"
      "    return 0i;\n"
      "  }\n"
      "  return o + 1i;\n"
      "}\n");
  const FunctionDecl* f = m.find_callable("f");
  CHECK(f->body[0]->narrow_after);
  CHECK(f->body[0]->narrow_var == "o");
}

TEST_CASE("no narrowing without a terminating guard") {
  auto d = diags_of(
      "function f(o: Option<Int>): Int {\n"
      "  if (o === none) {\n"
      "    let unused = 1i;\n"
      "  }\n"
      "  return o + 1i;\n"
      "}\n");
  CHECK(has_code(d, "type-mismatch"));
}

TEST_CASE("env reads require a declaration") {
  auto d = diags_of(
      "action a(x: Int) env={ LIMIT: Int } { let v = env.OTHER; return true; }");
  CHECK(has_code(d, "env-missing"));
}

TEST_CASE("env spread must cover the callee") {
  auto d = diags_of(
      "type T = CString;\n"
      "api needy(x: Int) env={ SECRET: T };\n"
      "action a(x: Int) { api needy(env{}, x); return true; }\n");
  CHECK(has_code(d, "env-missing"));
}

TEST_CASE("missing return is reported") {
  auto d = diags_of("function f(x: Int): Int { var y = x; }");
  CHECK(has_code(d, "missing-return"));
}

TEST_CASE("sensitivity propagates transitively") {
  auto m = compile_sample("order.bsq");
  CHECK(m.is_sensitive(*t_alias("TIN")));
  CHECK(!m.is_sensitive(*t_alias("OrderId")));
  CHECK(m.is_sensitive(*t_entity("Order")));
  CHECK(m.is_sensitive(*t_list(t_entity("Order"))));
  CHECK(m.is_sensitive(*t_option(t_alias("TIN"))));
}

TEST_SUITE_END();
