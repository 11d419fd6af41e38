#include "doctest.h"

#include "aisette/lexer.hpp"

using namespace aisette;

TEST_SUITE_BEGIN("lexer");

TEST_CASE("var declaration tokens") {
  auto r = tokenize("var y = 1i;");
  REQUIRE(r.ok());
  REQUIRE(r.tokens.size() == 6);  // incl. eof
  CHECK(r.tokens[0].kind == Tok::KwVar);
  CHECK(r.tokens[1].kind == Tok::Ident);
  CHECK(r.tokens[1].text == "y");
  CHECK(r.tokens[2].kind == Tok::Assign);
  CHECK(r.tokens[3].kind == Tok::Number);
  CHECK(r.tokens[3].suffix == 'i');
  CHECK(r.tokens[4].kind == Tok::Semi);
  CHECK(r.tokens[5].kind == Tok::Eof);
}

TEST_CASE("bare numeric literal is a lex error") {
  auto r = tokenize("1");
  CHECK(!r.ok());
  REQUIRE(r.diags.size() == 1);
  CHECK(r.diags.items()[0].code == "lex-missing-suffix");
  CHECK(r.diags.items()[0].message.find("missing type suffix") != std::string::npos);
}

TEST_CASE("empty input yields only eof") {
  auto r = tokenize("");
  REQUIRE(r.ok());
  REQUIRE(r.tokens.size() == 1);
  CHECK(r.tokens[0].kind == Tok::Eof);
}

TEST_CASE("suffixless literal with annotation is accepted") {
  auto r = tokenize("0.0<USD>");
  REQUIRE(r.ok());
  CHECK(r.tokens[0].kind == Tok::Number);
  CHECK(r.tokens[0].suffix == 0);
  CHECK(r.tokens[1].kind == Tok::Lt);
  CHECK(r.tokens[2].text == "USD");
}

TEST_CASE("every token carries a valid span") {
  std::string src = "function sign(x: Int): Int {\n  var y = 1i;\n  return y;\n}\n";
  auto r = tokenize(src);
  REQUIRE(r.ok());
  uint32_t prev_end = 0;
  for (const auto& t : r.tokens) {
    CHECK(t.span.valid_in(src.size()));
    CHECK(t.span.begin >= prev_end);
    prev_end = t.span.end;
  }
  // spot-check a line/col: 'var' starts line 2 col 3
  CHECK(r.tokens[10].text == "var");
  CHECK(r.tokens[10].span.line == 2);
  CHECK(r.tokens[10].span.col == 3);
}

TEST_CASE("diagnostics carry spans inside the input") {
  for (auto bad : {"'unterminated", "\"also bad", "var x = 3i; @"}) {
    auto r = tokenize(bad);
    REQUIRE(!r.ok());
    for (const auto& d : r.diags.items()) {
      CHECK(d.span.valid_in(std::string_view(bad).size()));
    }
  }
}

TEST_CASE("regex literal only after of") {
  auto r = tokenize("type Z = CString of /[0-9]{5}/c;");
  REQUIRE(r.ok());
  bool found = false;
  for (const auto& t : r.tokens) {
    if (t.kind == Tok::RegexLit) {
      found = true;
      CHECK(t.suffix == 'c');
      CHECK(t.text == "/[0-9]{5}/c");
    }
  }
  CHECK(found);
  // division is still division
  auto d = tokenize("x / y");
  REQUIRE(d.ok());
  CHECK(d.tokens[1].kind == Tok::Slash);
}

TEST_CASE("comments and doc comments") {
  auto r = tokenize("%% line comment\n%** doc text **% type");
  REQUIRE(r.ok());
  REQUIRE(r.tokens.size() == 3);
  CHECK(r.tokens[0].kind == Tok::DocComment);
  CHECK(r.tokens[1].kind == Tok::KwType);
}

TEST_CASE("permission glob literal") {
  auto r = tokenize("\\account:${payer.routing}/${payer.account}\\");
  REQUIRE(r.ok());
  CHECK(r.tokens[0].kind == Tok::GlobLit);
}

TEST_CASE("three-char operators") {
  auto r = tokenize("a === b !== c ... {| |}");
  REQUIRE(r.ok());
  CHECK(r.tokens[1].kind == Tok::EqEqEq);
  CHECK(r.tokens[3].kind == Tok::BangEqEq);
  CHECK(r.tokens[5].kind == Tok::Ellipsis);
  CHECK(r.tokens[6].kind == Tok::LBracePipe);
  CHECK(r.tokens[7].kind == Tok::RBracePipe);
}

TEST_SUITE_END();
