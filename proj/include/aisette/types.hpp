#pragma once

#include <memory>
#include <string>

#include "aisette/ast.hpp"

namespace aisette {

// Resolved semantic type. Aliases stay opaque: an alias never compares
// equal to its base or to another alias.
struct Type {
  enum class K { Bool, Int, Decimal, CString, String, Alias, Entity, List, Option };
  K kind;
  std::string name;  // Alias / Entity
  TypePtr elem;      // List / Option

  bool is_primitive() const {
    return kind == K::Bool || kind == K::Int || kind == K::Decimal || kind == K::CString ||
           kind == K::String;
  }
  bool is_string() const { return kind == K::CString || kind == K::String; }
};

TypePtr t_bool();
TypePtr t_int();
TypePtr t_decimal();
TypePtr t_cstring();
TypePtr t_string();
TypePtr t_alias(std::string name);
TypePtr t_entity(std::string name);
TypePtr t_list(TypePtr elem);
TypePtr t_option(TypePtr elem);

bool type_equal(const Type& a, const Type& b);
std::string type_name(const Type& t);

}  // namespace aisette
