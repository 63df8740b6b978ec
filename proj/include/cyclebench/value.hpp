#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "cyclebench/model.hpp"

namespace cyclebench {

struct ObjectSet {
  std::vector<ObjectId> ids;  // sorted, unique
  friend bool operator==(const ObjectSet&, const ObjectSet&) = default;
};

struct Attr {
  std::string text;
  friend bool operator==(const Attr&, const Attr&) = default;
};

struct Invalid {
  friend bool operator==(const Invalid&, const Invalid&) = default;
};

enum class ValueKind : std::uint8_t { object_set, object, attribute, integer, boolean, invalid };

// Runtime value of the question DSL. Invalid absorbs under every operator.
class Value {
 public:
  Value() : v_(Invalid{}) {}
  Value(ObjectSet s) : v_(std::move(s)) {}
  Value(ObjectId o) : v_(o) {}
  Value(Attr a) : v_(std::move(a)) {}
  Value(std::int64_t i) : v_(i) {}
  Value(int i) : v_(static_cast<std::int64_t>(i)) {}
  Value(bool b) : v_(b) {}
  Value(Invalid i) : v_(i) {}

  static Value attr(std::string_view text) { return Value(Attr{std::string(text)}); }
  static Value invalid() { return Value(Invalid{}); }

  ValueKind kind() const { return static_cast<ValueKind>(v_.index()); }
  bool is_invalid() const { return kind() == ValueKind::invalid; }

  const ObjectSet& as_set() const { return std::get<ObjectSet>(v_); }
  ObjectId as_object() const { return std::get<ObjectId>(v_); }
  const std::string& as_attr() const { return std::get<Attr>(v_).text; }
  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  bool as_bool() const { return std::get<bool>(v_); }

  // Human readable form used in question files: "yes"/"no", integers, words.
  std::string to_string() const;

  friend bool operator==(const Value&, const Value&) = default;

 private:
  std::variant<ObjectSet, ObjectId, Attr, std::int64_t, bool, Invalid> v_;
};

std::string_view name_of(ValueKind k);

}  // namespace cyclebench
