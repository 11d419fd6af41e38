#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "aisette/diagnostics.hpp"

namespace aisette {

// Runtime fault record. Carries the failing clause's source text and span
// where one exists.
struct Fault {
  enum class Kind {
    Precondition,
    Postcondition,
    Invariant,
    Constraint,
    Overflow,
    DivideByZero,
    Assertion,
    UnfilledHole,
    Type,
    EnvMissing,
    PermissionDenied,
    User,
    Transport,
    Internal,
  };
  Kind kind = Kind::Internal;
  std::string message;
  std::string clause;  // verbatim source text of the violated clause, "" if none
  Span span;
};

const char* fault_kind_name(Fault::Kind k);

// Exception used for fault propagation inside the interpreter; callers of
// the public entry points receive a RunResult instead.
class FaultError {
 public:
  explicit FaultError(Fault f) : fault_(std::move(f)) {}
  const Fault& fault() const { return fault_; }

 private:
  Fault fault_;
};

// Immutable runtime value. Copies share structure.
class Value {
 public:
  enum class K { Bool, Int, Decimal, String, Alias, Entity, List, Option };

  struct StrBox {
    std::string text;
    bool cstring = false;
  };
  struct AliasBox;
  struct EntityBox;
  struct ListBox;
  struct OptionBox;

  Value() : rep_(false) {}

  static Value boolean(bool b);
  static Value integer(int64_t v);        // throws FaultError(Overflow) on INT64_MIN
  static Value decimal(int64_t scaled);   // scaled by 10^4
  static Value string(std::string text, bool cstring);
  static Value alias(std::string name, Value inner, bool sensitive);
  static Value entity(std::string type, std::vector<Value> fields);
  static Value list(std::vector<Value> elems);
  static Value none();
  static Value some(Value v);

  K kind() const;

  bool as_bool() const;
  int64_t as_int() const;
  int64_t as_decimal() const;  // scaled
  const std::string& str() const;
  bool str_is_cstring() const;

  const std::string& alias_name() const;
  const Value& alias_inner() const;
  bool alias_sensitive() const;

  const std::string& entity_type() const;
  const std::vector<Value>& fields() const;

  const std::vector<Value>& elems() const;

  bool is_some() const;
  const Value& some_value() const;

  bool equals(const Value& other) const;

  // Strips alias wrappers (for raw access to the underlying primitive).
  const Value& unwrap_alias() const;

 private:
  struct IntRep { int64_t v; };
  struct DecRep { int64_t scaled; };
  using Rep = std::variant<bool, IntRep, DecRep, std::shared_ptr<const StrBox>,
                           std::shared_ptr<const AliasBox>, std::shared_ptr<const EntityBox>,
                           std::shared_ptr<const ListBox>, std::shared_ptr<const OptionBox>>;
  Rep rep_;
};

struct Value::AliasBox {
  std::string name;
  bool sensitive = false;
  Value inner;
};
struct Value::EntityBox {
  std::string type;
  std::vector<Value> fields;
};
struct Value::ListBox {
  std::vector<Value> elems;
};
struct Value::OptionBox {
  std::optional<Value> value;
};

// Canonical decimal rendering: trailing fractional zeros trimmed, at least
// two fractional digits kept (45.5000 -> "45.50").
std::string decimal_to_string(int64_t scaled);

// Parses "123.45" (optional sign, <= 4 fractional digits) into a scaled
// int64; nullopt on malformed/overflow.
std::optional<int64_t> decimal_from_string(std::string_view text);

struct RunResult {
  std::optional<Value> value;
  std::optional<Fault> fault;
  bool ok() const { return value.has_value(); }
};

// Append-only event log; entries are entity values. Language code has no
// operation that can touch it: appends happen only through this host-side
// interface.
class EventLog {
 public:
  const std::vector<Value>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  void system_append(Value v) { entries_.push_back(std::move(v)); }

 private:
  std::vector<Value> entries_;
};

struct EnvRecord {
  std::vector<std::pair<std::string, Value>> bindings;

  const Value* find(const std::string& name) const {
    for (const auto& [n, v] : bindings) {
      if (n == name) return &v;
    }
    return nullptr;
  }
  void set(std::string name, Value v) { bindings.emplace_back(std::move(name), std::move(v)); }
};

}  // namespace aisette
