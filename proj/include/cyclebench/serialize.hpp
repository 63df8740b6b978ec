#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cyclebench/model.hpp"

namespace cyclebench {

using json = nlohmann::json;

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json to_json(Vec3 v);
Vec3 vec3_from_json(const json& j);

json to_json(const CycleSpec& cycle, int frame_count);
CycleSpec cycle_from_json(const json& j);

json to_json(const ObjectSpec& obj, int frame_count);
ObjectSpec object_from_json(const json& j);

// Scene metadata document. With `dense`, per-frame states and relation
// tracks of `temporal` are embedded as well.
json scene_to_json(const SceneGraph& graph);
json scene_to_json(const TemporalScene& temporal, bool dense);
SceneGraph scene_from_json(const json& j);

json to_json(const ObjectState& s);

// Stable text form: two-space indent, trailing newline.
std::string dump_document(const json& j);

json read_json_file(const std::filesystem::path& path);
// Writes to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

template <typename E>
E enum_from_json(const json& j, const char* what) {
  if (!j.is_string()) throw SchemaError(std::string(what) + ": expected a string");
  const auto v = parse_enum<E>(j.get<std::string>());
  if (!v) throw SchemaError(std::string(what) + ": unknown value '" + j.get<std::string>() + "'");
  return *v;
}

}  // namespace cyclebench
