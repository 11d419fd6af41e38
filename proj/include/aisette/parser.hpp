#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "aisette/ast.hpp"
#include "aisette/diagnostics.hpp"

namespace aisette {

struct ParseResult {
  std::optional<SourceModule> module;
  DiagnosticList diags;
  bool ok() const { return module.has_value() && !diags.has_errors(); }
};

ParseResult parse_module(std::string_view source);

// Canonical source rendering; parse(print(parse(m))) is structurally
// equal to parse(m).
std::string print_module(const SourceModule& m);
std::string print_expr(const Expr& e);
std::string print_stmt(const Stmt& s, int indent);
std::string print_type_ref(const TypeRef& t);

}  // namespace aisette
