#include "cyclebench/serialize.hpp"

#include <fstream>
#include <sstream>

namespace cyclebench {

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return require(j, key).get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("field '") + key + "': " + e.what());
  }
}

std::string str(std::string_view v) { return std::string(v); }

}  // namespace

json to_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw SchemaError("vector must be [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json to_json(const CycleSpec& cycle, int frame_count) {
  json params = json::object();
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, LinearMotion>) {
          params["switch_point"] = to_json(c.switch_point);
        } else if constexpr (std::is_same_v<T, Orbit>) {
          params["center_id"] = c.center.value;
          params["radius"] = c.radius;
          params["initial_angle"] = c.initial_angle;
          params["direction"] = str(name_of(c.direction));
        } else if constexpr (std::is_same_v<T, SizeChange>) {
          params["target"] = str(name_of(c.target));
        } else if constexpr (std::is_same_v<T, ColorChange>) {
          params["target"] = str(name_of(c.target));
        } else {
          params["turns"] = c.turns;
        }
      },
      cycle.variant);
  return {{"type", str(name_of(cycle.type()))},
          {"params", params},
          {"passes", cycle.passes},
          {"period_frames", cycle.period_frames(frame_count)}};
}

CycleSpec cycle_from_json(const json& j) {
  const auto type = enum_from_json<CycleType>(require(j, "type"), "cycle type");
  const json& p = require(j, "params");
  CycleSpec c;
  c.passes = get_as<int>(j, "passes");
  switch (type) {
    case CycleType::linear:
      c.variant = LinearMotion{vec3_from_json(require(p, "switch_point"))};
      break;
    case CycleType::orbit:
      c.variant = Orbit{ObjectId{get_as<std::uint32_t>(p, "center_id")}, get_as<double>(p, "radius"),
                        get_as<double>(p, "initial_angle"),
                        enum_from_json<Direction>(require(p, "direction"), "orbit direction")};
      break;
    case CycleType::size:
      c.variant = SizeChange{enum_from_json<SizeClass>(require(p, "target"), "size target")};
      break;
    case CycleType::color:
      c.variant = ColorChange{enum_from_json<Color>(require(p, "target"), "color target")};
      break;
    case CycleType::orientation:
      c.variant = OrientationChange{get_as<int>(p, "turns")};
      break;
  }
  return c;
}

json to_json(const ObjectSpec& obj, int frame_count) {
  json cycles = json::array();
  for (const auto& c : obj.cycles) cycles.push_back(to_json(c, frame_count));
  return {{"id", obj.id.value},
          {"shape", str(name_of(obj.shape))},
          {"material", str(name_of(obj.material))},
          {"size0", str(name_of(obj.size0))},
          {"color0", str(name_of(obj.color0))},
          {"position0", to_json(obj.position0)},
          {"orientation0", obj.orientation0},
          {"mesh_ref", obj.mesh_ref},
          {"cycles", cycles}};
}

ObjectSpec object_from_json(const json& j) {
  ObjectSpec o;
  o.id = ObjectId{get_as<std::uint32_t>(j, "id")};
  o.shape = enum_from_json<Shape>(require(j, "shape"), "shape");
  o.material = enum_from_json<Material>(require(j, "material"), "material");
  o.size0 = enum_from_json<SizeClass>(require(j, "size0"), "size0");
  o.color0 = enum_from_json<Color>(require(j, "color0"), "color0");
  o.position0 = vec3_from_json(require(j, "position0"));
  o.orientation0 = get_as<double>(j, "orientation0");
  o.mesh_ref = j.contains("mesh_ref") ? j.at("mesh_ref").get<std::string>() : default_mesh_ref(o.shape);
  for (const auto& c : require(j, "cycles")) o.cycles.push_back(cycle_from_json(c));
  return o;
}

json to_json(const ObjectState& s) {
  return {{"position", to_json(s.position)},
          {"orientation", s.orientation},
          {"scale", s.scale},
          {"color_hue", s.color_hue},
          {"nominal_size", str(name_of(s.nominal_size))},
          {"nominal_color", str(name_of(s.nominal_color))}};
}

json scene_to_json(const SceneGraph& g) {
  json lights = json::array();
  for (const auto& l : g.light.sources) {
    json entry = {{"name", l.name}, {"position", to_json(l.position)}, {"intensity", l.intensity}};
    if (g.light.modulation) {
      entry["modulation"] = {{"floor", g.light.modulation->floor},
                             {"period_frames", g.light.modulation->period_frames}};
    }
    lights.push_back(std::move(entry));
  }
  json objects = json::array();
  for (const auto& o : g.objects) objects.push_back(to_json(o, g.frame_count));
  return {{"scene_id", g.scene_id},
          {"tier", str(name_of(g.tier))},
          {"seed", g.seed},
          {"frame_count", g.frame_count},
          {"fps", g.fps},
          {"bounds", {{"x", {g.bounds.x_min, g.bounds.x_max}}, {"y", {g.bounds.y_min, g.bounds.y_max}}}},
          {"camera", {{"eye", to_json(g.camera.eye)}, {"look_at", to_json(g.camera.look_at)}}},
          {"lights", lights},
          {"objects", objects}};
}

json scene_to_json(const TemporalScene& t, bool dense) {
  json j = scene_to_json(t.graph);
  if (!dense) return j;
  json frames = json::array();
  for (int f = 0; f < t.frame_count(); ++f) {
    json row = json::array();
    for (std::uint32_t i = 0; i < t.object_count(); ++i) row.push_back(to_json(t.at(f, {i})));
    frames.push_back(std::move(row));
  }
  j["frames"] = std::move(frames);
  json relations = json::array();
  for (const auto& tr : t.tracks) {
    std::string bits;
    bits.reserve(tr.frames.size());
    for (const auto b : tr.frames) bits.push_back(b ? '1' : '0');
    relations.push_back({{"relation", str(name_of(tr.relation))},
                         {"subject", tr.subject.value},
                         {"object", tr.object.value},
                         {"frames", bits},
                         {"always", tr.always},
                         {"ever", tr.ever}});
  }
  j["relations"] = std::move(relations);
  return j;
}

SceneGraph scene_from_json(const json& j) {
  SceneGraph g;
  g.scene_id = get_as<std::string>(j, "scene_id");
  g.tier = enum_from_json<Tier>(require(j, "tier"), "tier");
  g.seed = get_as<std::uint64_t>(j, "seed");
  g.frame_count = get_as<int>(j, "frame_count");
  g.fps = get_as<int>(j, "fps");
  const json& b = require(j, "bounds");
  const json& bx = require(b, "x");
  const json& by = require(b, "y");
  g.bounds = {bx.at(0).get<double>(), bx.at(1).get<double>(), by.at(0).get<double>(),
              by.at(1).get<double>()};
  const json& cam = require(j, "camera");
  g.camera.eye = vec3_from_json(require(cam, "eye"));
  g.camera.look_at = vec3_from_json(require(cam, "look_at"));
  for (const auto& l : require(j, "lights")) {
    g.light.sources.push_back(
        {get_as<std::string>(l, "name"), vec3_from_json(require(l, "position")), get_as<double>(l, "intensity")});
    if (l.contains("modulation")) {
      const json& m = l.at("modulation");
      g.light.modulation = LightModulation{get_as<double>(m, "floor"), get_as<int>(m, "period_frames")};
    }
  }
  for (const auto& o : require(j, "objects")) g.objects.push_back(object_from_json(o));
  return g;
}

std::string dump_document(const json& j) { return j.dump(2) + "\n"; }

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace cyclebench
