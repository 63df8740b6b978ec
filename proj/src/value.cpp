#include "cyclebench/value.hpp"

#include <array>

namespace cyclebench {

std::string Value::to_string() const {
  switch (kind()) {
    case ValueKind::object_set: {
      std::string out = "[";
      for (std::size_t i = 0; i < as_set().ids.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(as_set().ids[i].value);
      }
      return out + "]";
    }
    case ValueKind::object:
      return "object " + std::to_string(as_object().value);
    case ValueKind::attribute:
      return as_attr();
    case ValueKind::integer:
      return std::to_string(as_int());
    case ValueKind::boolean:
      return as_bool() ? "yes" : "no";
    case ValueKind::invalid:
      break;
  }
  return "invalid";
}

std::string_view name_of(ValueKind k) {
  static constexpr std::array<std::string_view, 6> names{"object_set", "object", "attribute",
                                                         "integer",    "boolean", "invalid"};
  return names.at(static_cast<std::size_t>(k));
}

}  // namespace cyclebench
