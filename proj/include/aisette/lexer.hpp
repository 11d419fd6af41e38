#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aisette/diagnostics.hpp"

namespace aisette {

enum class Tok {
  // literals
  Number,      // digits[.digits]; suffix in Token::suffix ('i', 'd', or none)
  CStringLit,  // '...'
  StringLit,   // "..."
  RegexLit,    // /.../ with optional c flag (flag in Token::suffix)
  GlobLit,     // \...\ permission glob template
  DocComment,  // %** ... **%
  Ident,
  DollarIdent,  // $name, $result, $events

  // keywords
  KwType, KwSensitive, KwEntity, KwField, KwInvariant, KwFunction, KwAction,
  KwApi, KwAgent, KwChktest, KwLet, KwVar, KwIf, KwElse, KwThen, KwReturn,
  KwAssert, KwRequires, KwEnsures, KwEnv, KwPermissions, KwFail, KwNone,
  KwSome, KwTrue, KwFalse, KwPred, KwFn, KwOf,

  // punctuation / operators
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  LBracePipe, RBracePipe,  // {| |}
  Comma, Semi, Colon, ColonColon, Dot, Ellipsis, Question,
  Assign,                        // =
  EqEq, EqEqEq, BangEq, BangEqEq,
  Lt, LtEq, Gt, GtEq,
  Plus, Minus, Star, Slash, Bang,
  AmpAmp, PipePipe,
  Arrow,     // ->
  FatArrow,  // =>

  Eof,
};

struct Token {
  Tok kind = Tok::Eof;
  std::string_view text;  // slice of the source buffer
  Span span;
  char suffix = 0;  // numeric type suffix or regex flag
};

const char* token_name(Tok t);

struct LexResult {
  std::vector<Token> tokens;  // always ends with Eof on success
  DiagnosticList diags;
  bool ok() const { return !diags.has_errors(); }
};

// Tokenizes a whole source buffer. The buffer must outlive the tokens
// (token text is a view into it). Stops at the first lexical error.
LexResult tokenize(std::string_view source);

}  // namespace aisette
