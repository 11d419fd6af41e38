#include "aisette/value.hpp"

#include <cstdlib>

namespace aisette {

const char* fault_kind_name(Fault::Kind k) {
  switch (k) {
    case Fault::Kind::Precondition: return "precondition";
    case Fault::Kind::Postcondition: return "postcondition";
    case Fault::Kind::Invariant: return "invariant";
    case Fault::Kind::Constraint: return "constraint";
    case Fault::Kind::Overflow: return "arith-overflow";
    case Fault::Kind::DivideByZero: return "divide-by-zero";
    case Fault::Kind::Assertion: return "assertion";
    case Fault::Kind::UnfilledHole: return "unfilled-hole";
    case Fault::Kind::Type: return "type";
    case Fault::Kind::EnvMissing: return "env-missing";
    case Fault::Kind::PermissionDenied: return "permission-denied";
    case Fault::Kind::User: return "user";
    case Fault::Kind::Transport: return "transport";
    case Fault::Kind::Internal: return "internal";
  }
  return "?";
}

Value Value::boolean(bool b) {
  Value v;
  v.rep_ = b;
  return v;
}

Value Value::integer(int64_t x) {
  if (x == INT64_MIN) {
    throw FaultError({Fault::Kind::Overflow, "integer value below the symmetric range", "", {}});
  }
  Value v;
  v.rep_ = IntRep{x};
  return v;
}

Value Value::decimal(int64_t scaled) {
  if (scaled == INT64_MIN) {
    throw FaultError({Fault::Kind::Overflow, "decimal value below the symmetric range", "", {}});
  }
  Value v;
  v.rep_ = DecRep{scaled};
  return v;
}

Value Value::string(std::string text, bool cstring) {
  Value v;
  v.rep_ = std::make_shared<const StrBox>(StrBox{std::move(text), cstring});
  return v;
}

Value Value::alias(std::string name, Value inner, bool sensitive) {
  Value v;
  v.rep_ = std::make_shared<const AliasBox>(AliasBox{std::move(name), sensitive, std::move(inner)});
  return v;
}

Value Value::entity(std::string type, std::vector<Value> fields) {
  Value v;
  v.rep_ = std::make_shared<const EntityBox>(EntityBox{std::move(type), std::move(fields)});
  return v;
}

Value Value::list(std::vector<Value> elems) {
  Value v;
  v.rep_ = std::make_shared<const ListBox>(ListBox{std::move(elems)});
  return v;
}

Value Value::none() {
  Value v;
  v.rep_ = std::make_shared<const OptionBox>(OptionBox{std::nullopt});
  return v;
}

Value Value::some(Value inner) {
  Value v;
  v.rep_ = std::make_shared<const OptionBox>(OptionBox{std::move(inner)});
  return v;
}

Value::K Value::kind() const {
  struct Visitor {
    K operator()(bool) const { return K::Bool; }
    K operator()(const IntRep&) const { return K::Int; }
    K operator()(const DecRep&) const { return K::Decimal; }
    K operator()(const std::shared_ptr<const StrBox>&) const { return K::String; }
    K operator()(const std::shared_ptr<const AliasBox>&) const { return K::Alias; }
    K operator()(const std::shared_ptr<const EntityBox>&) const { return K::Entity; }
    K operator()(const std::shared_ptr<const ListBox>&) const { return K::List; }
    K operator()(const std::shared_ptr<const OptionBox>&) const { return K::Option; }
  };
  return std::visit(Visitor{}, rep_);
}

bool Value::as_bool() const { return std::get<bool>(rep_); }
int64_t Value::as_int() const { return std::get<IntRep>(rep_).v; }
int64_t Value::as_decimal() const { return std::get<DecRep>(rep_).scaled; }
const std::string& Value::str() const { return std::get<std::shared_ptr<const StrBox>>(rep_)->text; }
bool Value::str_is_cstring() const {
  return std::get<std::shared_ptr<const StrBox>>(rep_)->cstring;
}
const std::string& Value::alias_name() const {
  return std::get<std::shared_ptr<const AliasBox>>(rep_)->name;
}
const Value& Value::alias_inner() const {
  return std::get<std::shared_ptr<const AliasBox>>(rep_)->inner;
}
bool Value::alias_sensitive() const {
  return std::get<std::shared_ptr<const AliasBox>>(rep_)->sensitive;
}
const std::string& Value::entity_type() const {
  return std::get<std::shared_ptr<const EntityBox>>(rep_)->type;
}
const std::vector<Value>& Value::fields() const {
  return std::get<std::shared_ptr<const EntityBox>>(rep_)->fields;
}
const std::vector<Value>& Value::elems() const {
  return std::get<std::shared_ptr<const ListBox>>(rep_)->elems;
}
bool Value::is_some() const {
  return std::get<std::shared_ptr<const OptionBox>>(rep_)->value.has_value();
}
const Value& Value::some_value() const {
  return *std::get<std::shared_ptr<const OptionBox>>(rep_)->value;
}

const Value& Value::unwrap_alias() const {
  const Value* v = this;
  while (v->kind() == K::Alias) v = &v->alias_inner();
  return *v;
}

bool Value::equals(const Value& other) const {
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case K::Bool: return as_bool() == other.as_bool();
    case K::Int: return as_int() == other.as_int();
    case K::Decimal: return as_decimal() == other.as_decimal();
    case K::String:
      return str() == other.str() && str_is_cstring() == other.str_is_cstring();
    case K::Alias:
      return alias_name() == other.alias_name() && alias_inner().equals(other.alias_inner());
    case K::Entity: {
      if (entity_type() != other.entity_type()) return false;
      const auto& a = fields();
      const auto& b = other.fields();
      if (a.size() != b.size()) return false;
      for (size_t i = 0; i < a.size(); i++) {
        if (!a[i].equals(b[i])) return false;
      }
      return true;
    }
    case K::List: {
      const auto& a = elems();
      const auto& b = other.elems();
      if (a.size() != b.size()) return false;
      for (size_t i = 0; i < a.size(); i++) {
        if (!a[i].equals(b[i])) return false;
      }
      return true;
    }
    case K::Option:
      if (is_some() != other.is_some()) return false;
      return !is_some() || some_value().equals(other.some_value());
  }
  return false;
}

std::string decimal_to_string(int64_t scaled) {
  bool neg = scaled < 0;
  uint64_t mag = neg ? -static_cast<uint64_t>(scaled) : static_cast<uint64_t>(scaled);
  uint64_t whole = mag / 10000;
  uint64_t frac = mag % 10000;
  char fbuf[8];
  std::snprintf(fbuf, sizeof(fbuf), "%04llu", static_cast<unsigned long long>(frac));
  std::string f(fbuf);
  while (f.size() > 2 && f.back() == '0') f.pop_back();
  return (neg ? "-" : "") + std::to_string(whole) + "." + f;
}

std::optional<int64_t> decimal_from_string(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool neg = false;
  size_t i = 0;
  if (text[0] == '-' || text[0] == '+') {
    neg = text[0] == '-';
    i = 1;
  }
  if (i >= text.size() || !isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
  unsigned long long whole = 0;
  while (i < text.size() && isdigit(static_cast<unsigned char>(text[i]))) {
    whole = whole * 10 + static_cast<unsigned long long>(text[i] - '0');
    if (whole > static_cast<unsigned long long>(INT64_MAX) / 10000) return std::nullopt;
    i++;
  }
  unsigned long long frac = 0;
  size_t frac_digits = 0;
  if (i < text.size() && text[i] == '.') {
    i++;
    if (i >= text.size()) return std::nullopt;
    while (i < text.size() && isdigit(static_cast<unsigned char>(text[i]))) {
      if (++frac_digits > 4) return std::nullopt;
      frac = frac * 10 + static_cast<unsigned long long>(text[i] - '0');
      i++;
    }
  }
  if (i != text.size()) return std::nullopt;
  for (size_t k = frac_digits; k < 4; k++) frac *= 10;
  unsigned long long scaled = whole * 10000ULL + frac;
  if (scaled > static_cast<unsigned long long>(INT64_MAX)) return std::nullopt;
  int64_t v = static_cast<int64_t>(scaled);
  return neg ? -v : v;
}

}  // namespace aisette
