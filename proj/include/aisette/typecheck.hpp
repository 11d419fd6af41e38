#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aisette/ast.hpp"
#include "aisette/diagnostics.hpp"
#include "aisette/regex.hpp"
#include "aisette/types.hpp"

namespace aisette {

struct AliasInfo {
  const TypeAliasDecl* decl = nullptr;
  Type::K base = Type::K::Int;
  std::optional<SafeRegex> constraint;
  bool sensitive = false;
};

struct EntityInfo {
  const EntityDecl* decl = nullptr;
  std::vector<TypePtr> field_types;  // declaration order

  int field_index(const std::string& name) const {
    for (size_t i = 0; i < decl->fields.size(); i++) {
      if (decl->fields[i].name == name) return static_cast<int>(i);
    }
    return -1;
  }
};

// A parsed module with resolved declarations; expressions carry their
// resolved type in Expr::rtype. Immutable after construction and safe to
// share read-only across threads.
class TypedModule {
 public:
  SourceModule src;
  std::map<std::string, AliasInfo> aliases;
  std::map<std::string, EntityInfo> entities;
  std::map<std::string, const FunctionDecl*> functions;  // functions and actions
  std::map<std::string, const ApiDecl*> apis;
  std::map<std::string, const AgentDecl*> agents;
  std::map<std::string, const FunctionDecl*> chktests;

  const FunctionDecl* find_callable(const std::string& name) const {
    auto it = functions.find(name);
    return it == functions.end() ? nullptr : it->second;
  }
  const ApiDecl* find_api(const std::string& name) const {
    auto it = apis.find(name);
    return it == apis.end() ? nullptr : it->second;
  }

  // Resolves a syntactic type reference; null with a diagnostic on failure.
  TypePtr resolve(const TypeRef& ref, DiagnosticList* diags) const;

  // The primitive kind underlying a type (aliases unwrap; others map to
  // their own kind).
  Type::K base_kind(const Type& t) const;

  // True if the type transitively contains a sensitive alias.
  bool is_sensitive(const Type& t) const;

  const SafeRegex* constraint_of(const std::string& alias) const {
    auto it = aliases.find(alias);
    return it != aliases.end() && it->second.constraint ? &*it->second.constraint : nullptr;
  }
};

struct TypecheckResult {
  std::optional<TypedModule> module;
  DiagnosticList diags;
  bool ok() const { return module.has_value() && !diags.has_errors(); }
};

TypecheckResult typecheck(SourceModule m);

// Convenience: parse + typecheck.
TypecheckResult compile_module(std::string_view source);

}  // namespace aisette
