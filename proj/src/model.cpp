#include "cyclebench/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cyclebench {

double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
double ground_distance(Vec3 a, Vec3 b) { return std::hypot(a.x - b.x, a.y - b.y); }
bool is_finite(Vec3 v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

namespace {

template <typename E, std::size_t N>
std::string_view lookup(const std::array<std::string_view, N>& names, E v) {
  const auto i = static_cast<std::size_t>(v);
  if (i >= N) throw std::out_of_range("enum value out of range");
  return names[i];
}

constexpr std::array<std::string_view, 4> kShapeNames{"cube", "sphere", "cylinder", "cone"};
constexpr std::array<std::string_view, 2> kMaterialNames{"metal", "rubber"};
constexpr std::array<std::string_view, 2> kSizeNames{"small", "large"};
constexpr std::array<std::string_view, 3> kNominalSizeNames{"small", "large", "transitional"};
constexpr std::array<std::string_view, 8> kColorNames{"gray",  "red",    "blue", "green",
                                                      "brown", "purple", "cyan", "yellow"};
constexpr std::array<std::string_view, 2> kDirectionNames{"clockwise", "counterclockwise"};
constexpr std::array<std::string_view, 5> kCycleNames{"linear", "orbit", "size", "color",
                                                      "orientation"};
constexpr std::array<std::string_view, 4> kPropertyNames{"position", "orientation", "color",
                                                         "size"};
constexpr std::array<std::string_view, 4> kRelationNames{"left", "right", "front", "behind"};
constexpr std::array<std::string_view, 5> kTierNames{"L1", "L2", "L3", "L4", "L5"};

constexpr std::array<double, 8> kPaletteHues{325.0, 0.0, 225.0, 120.0, 30.0, 275.0, 180.0, 55.0};

template <typename E, std::size_t N>
std::optional<E> find_name(const std::array<std::string_view, N>& names, std::string_view text) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == text) return static_cast<E>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view name_of(Shape v) { return lookup(kShapeNames, v); }
std::string_view name_of(Material v) { return lookup(kMaterialNames, v); }
std::string_view name_of(SizeClass v) { return lookup(kSizeNames, v); }
std::string_view name_of(NominalSize v) { return lookup(kNominalSizeNames, v); }
std::string_view name_of(Color v) { return lookup(kColorNames, v); }
std::string_view name_of(Direction v) { return lookup(kDirectionNames, v); }
std::string_view name_of(CycleType v) { return lookup(kCycleNames, v); }
std::string_view name_of(DynamicProperty v) { return lookup(kPropertyNames, v); }
std::string_view name_of(Relation v) { return lookup(kRelationNames, v); }
std::string_view name_of(Tier v) { return lookup(kTierNames, v); }

template <>
std::optional<Shape> parse_enum<Shape>(std::string_view t) { return find_name<Shape>(kShapeNames, t); }
template <>
std::optional<Material> parse_enum<Material>(std::string_view t) {
  return find_name<Material>(kMaterialNames, t);
}
template <>
std::optional<SizeClass> parse_enum<SizeClass>(std::string_view t) {
  return find_name<SizeClass>(kSizeNames, t);
}
template <>
std::optional<NominalSize> parse_enum<NominalSize>(std::string_view t) {
  return find_name<NominalSize>(kNominalSizeNames, t);
}
template <>
std::optional<Color> parse_enum<Color>(std::string_view t) { return find_name<Color>(kColorNames, t); }
template <>
std::optional<Direction> parse_enum<Direction>(std::string_view t) {
  return find_name<Direction>(kDirectionNames, t);
}
template <>
std::optional<CycleType> parse_enum<CycleType>(std::string_view t) {
  return find_name<CycleType>(kCycleNames, t);
}
template <>
std::optional<Relation> parse_enum<Relation>(std::string_view t) {
  return find_name<Relation>(kRelationNames, t);
}
template <>
std::optional<Tier> parse_enum<Tier>(std::string_view t) { return find_name<Tier>(kTierNames, t); }

DynamicProperty property_of(CycleType type) {
  switch (type) {
    case CycleType::linear:
    case CycleType::orbit:
      return DynamicProperty::position;
    case CycleType::size:
      return DynamicProperty::size;
    case CycleType::color:
      return DynamicProperty::color;
    case CycleType::orientation:
      return DynamicProperty::orientation;
  }
  throw std::logic_error("unknown cycle type");
}

double palette_hue(Color c) { return kPaletteHues.at(static_cast<std::size_t>(c)); }

double circular_hue_distance(double a, double b) {
  const double d = std::fmod(std::fabs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

Color nearest_palette_color(double hue) {
  Color best = kColors[0];
  double best_d = circular_hue_distance(hue, palette_hue(best));
  for (std::size_t i = 1; i < kColors.size(); ++i) {
    const double d = circular_hue_distance(hue, palette_hue(kColors[i]));
    if (d < best_d) {
      best = kColors[i];
      best_d = d;
    }
  }
  return best;
}

double size_scale(SizeClass s) { return s == SizeClass::small ? kSmallScale : kLargeScale; }

double shape_radius_factor(Shape s) { return s == Shape::cube ? std::sqrt(2.0) : 1.0; }

double bounding_radius(Shape s, double scale) { return scale * shape_radius_factor(s); }

bool supports_orientation_cycle(Shape s) { return s == Shape::cube || s == Shape::cone; }

CycleType CycleSpec::type() const { return static_cast<CycleType>(variant.index()); }

double CycleSpec::frequency(int frame_count, int fps) const {
  return static_cast<double>(passes) * fps / frame_count;
}

const CycleSpec* ObjectSpec::find(CycleType type) const {
  for (const auto& c : cycles) {
    if (c.type() == type) return &c;
  }
  return nullptr;
}

std::string default_mesh_ref(Shape s) { return "mesh/" + std::string(name_of(s)); }

std::vector<std::string> validate_spec(const ObjectSpec& spec) {
  std::vector<std::string> out;
  if (!(spec.orientation0 >= 0.0 && spec.orientation0 < 360.0)) {
    out.push_back("orientation0 outside [0, 360)");
  }
  if (!is_finite(spec.position0)) out.push_back("position0 not finite");
  if (spec.position0.z != 0.0) out.push_back("position0.z must be 0");

  std::set<DynamicProperty> targeted;
  for (const auto& cycle : spec.cycles) {
    const auto prop = cycle.property();
    if (!targeted.insert(prop).second) {
      out.push_back(std::string(name_of(prop)) + " targeted twice");
    }
    if (std::find(kPassesChoices.begin(), kPassesChoices.end(), cycle.passes) ==
        kPassesChoices.end()) {
      out.push_back("passes must be one of {1, 2, 5}");
    }
    if (const auto* orbit = std::get_if<Orbit>(&cycle.variant)) {
      if (!(orbit->radius >= kOrbitRadiusMin && orbit->radius <= kOrbitRadiusMax)) {
        out.push_back("orbit radius outside [r_min, r_max]");
      }
      if (!(orbit->initial_angle >= 0.0 && orbit->initial_angle < 360.0)) {
        out.push_back("orbit initial_angle outside [0, 360)");
      }
      if (orbit->center == spec.id) out.push_back("object orbits itself");
    } else if (const auto* color = std::get_if<ColorChange>(&cycle.variant)) {
      if (color->target == spec.color0) out.push_back("color target equals color0");
    } else if (const auto* size = std::get_if<SizeChange>(&cycle.variant)) {
      if (size->target == spec.size0) out.push_back("size target equals size0");
    } else if (const auto* rot = std::get_if<OrientationChange>(&cycle.variant)) {
      if (rot->turns < 1) out.push_back("orientation turns must be >= 1");
      if (!supports_orientation_cycle(spec.shape)) {
        out.push_back("orientation cycle on rotation-invariant shape");
      }
    } else if (const auto* lin = std::get_if<LinearMotion>(&cycle.variant)) {
      if (!is_finite(lin->switch_point) || lin->switch_point.z != 0.0) {
        out.push_back("linear switch point must be finite with z = 0");
      }
    }
  }
  return out;
}

std::size_t SceneGraph::cyclic_count() const {
  return static_cast<std::size_t>(
      std::count_if(objects.begin(), objects.end(), [](const auto& o) { return o.is_cyclic(); }));
}

Vec3 CameraConfig::forward() const {
  Vec3 f = look_at - eye;
  f.z = 0.0;
  const double n = norm(f);
  if (n == 0.0) return {0.0, 1.0, 0.0};
  return (1.0 / n) * f;
}

Vec3 CameraConfig::right() const {
  const Vec3 f = forward();
  return {f.y, -f.x, 0.0};
}

std::optional<std::vector<std::uint32_t>> orbit_topological_order(const SceneGraph& graph) {
  const auto k = graph.objects.size();
  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<int> mark(k, 0);
  std::vector<std::uint32_t> order;
  order.reserve(k);
  for (std::uint32_t root = 0; root < k; ++root) {
    if (mark[root] != 0) continue;
    // Each object has at most one orbit center, so the dependency chain is a path.
    std::vector<std::uint32_t> chain;
    std::uint32_t cur = root;
    while (true) {
      if (mark[cur] == 2) break;
      if (mark[cur] == 1) return std::nullopt;
      mark[cur] = 1;
      chain.push_back(cur);
      const auto* orbit = graph.objects[cur].find_variant<Orbit>();
      if (orbit == nullptr) break;
      if (orbit->center.value >= k) return std::nullopt;
      cur = orbit->center.value;
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      mark[*it] = 2;
      order.push_back(*it);
    }
  }
  return order;
}

std::vector<std::string> validate_graph(const SceneGraph& graph) {
  std::vector<std::string> out;
  if (graph.frame_count <= 0) out.push_back("frame_count must be positive");
  if (graph.fps <= 0) out.push_back("fps must be positive");
  const auto k = graph.objects.size();
  bool refs_ok = true;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& obj = graph.objects[i];
    const std::string prefix = "object " + std::to_string(i) + ": ";
    if (obj.id.value != i) out.push_back(prefix + "id does not match its index");
    for (const auto& v : validate_spec(obj)) out.push_back(prefix + v);
    for (const auto& cycle : obj.cycles) {
      if (graph.frame_count > 0 && cycle.passes > 0 && graph.frame_count % cycle.passes != 0) {
        out.push_back(prefix + "passes does not divide frame_count");
      }
    }
    if (const auto* orbit = obj.find_variant<Orbit>()) {
      if (orbit->center.value >= k) {
        out.push_back(prefix + "orbit center does not resolve");
        refs_ok = false;
        continue;
      }
      if (orbit->center.value == i) {
        refs_ok = false;
        continue;
      }
      const auto& c = graph.objects[orbit->center.value].position0;
      const double a = orbit->initial_angle * std::numbers::pi / 180.0;
      const Vec3 expect{c.x + orbit->radius * std::cos(a), c.y + orbit->radius * std::sin(a), 0.0};
      if (ground_distance(expect, obj.position0) > 1e-9) {
        out.push_back(prefix + "position0 not on its orbit path");
      }
    }
  }
  if (refs_ok && !orbit_topological_order(graph)) out.push_back("orbit references form a cycle");
  if (graph.light.modulation) {
    const auto& m = *graph.light.modulation;
    if (!(m.floor > 0.0 && m.floor < 1.0)) out.push_back("light floor outside (0, 1)");
    if (m.period_frames <= 0 || graph.frame_count % m.period_frames != 0) {
      out.push_back("light period does not divide frame_count");
    }
  }
  return out;
}

std::size_t TemporalScene::track_index(Relation r, ObjectId subject, ObjectId object,
                                       std::size_t k) {
  const std::size_t b = object.value < subject.value ? object.value : object.value - 1;
  return (static_cast<std::size_t>(r) * k + subject.value) * (k - 1) + b;
}

const RelationTrack& TemporalScene::track(Relation r, ObjectId subject, ObjectId object) const {
  if (subject == object) throw std::invalid_argument("relation track needs distinct objects");
  return tracks.at(track_index(r, subject, object, object_count()));
}

}  // namespace cyclebench
