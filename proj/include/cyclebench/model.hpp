#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cyclebench {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

double dot(Vec3 a, Vec3 b);
double norm(Vec3 v);
// Distance in the ground plane, ignoring z.
double ground_distance(Vec3 a, Vec3 b);
bool is_finite(Vec3 v);

enum class Shape : std::uint8_t { cube, sphere, cylinder, cone };
enum class Material : std::uint8_t { metal, rubber };
enum class SizeClass : std::uint8_t { small, large };
enum class NominalSize : std::uint8_t { small, large, transitional };
enum class Color : std::uint8_t { gray, red, blue, green, brown, purple, cyan, yellow };
enum class Direction : std::uint8_t { clockwise, counterclockwise };
enum class CycleType : std::uint8_t { linear, orbit, size, color, orientation };
enum class DynamicProperty : std::uint8_t { position, orientation, color, size };
enum class Relation : std::uint8_t { left, right, front, behind };
enum class Tier : std::uint8_t { L1, L2, L3, L4, L5 };

inline constexpr std::array kShapes{Shape::cube, Shape::sphere, Shape::cylinder, Shape::cone};
inline constexpr std::array kMaterials{Material::metal, Material::rubber};
inline constexpr std::array kSizes{SizeClass::small, SizeClass::large};
inline constexpr std::array kColors{Color::gray,   Color::red,    Color::blue, Color::green,
                                    Color::brown,  Color::purple, Color::cyan, Color::yellow};
inline constexpr std::array kCycleTypes{CycleType::linear, CycleType::orbit, CycleType::size,
                                        CycleType::color, CycleType::orientation};
inline constexpr std::array kRelations{Relation::left, Relation::right, Relation::front,
                                       Relation::behind};
inline constexpr std::array kTiers{Tier::L1, Tier::L2, Tier::L3, Tier::L4, Tier::L5};
inline constexpr std::array kPassesChoices{1, 2, 5};

// Normative spellings used in every JSON document.
std::string_view name_of(Shape v);
std::string_view name_of(Material v);
std::string_view name_of(SizeClass v);
std::string_view name_of(NominalSize v);
std::string_view name_of(Color v);
std::string_view name_of(Direction v);
std::string_view name_of(CycleType v);
std::string_view name_of(DynamicProperty v);
std::string_view name_of(Relation v);
std::string_view name_of(Tier v);

template <typename E>
std::optional<E> parse_enum(std::string_view text);
template <> std::optional<Shape> parse_enum<Shape>(std::string_view);
template <> std::optional<Material> parse_enum<Material>(std::string_view);
template <> std::optional<SizeClass> parse_enum<SizeClass>(std::string_view);
template <> std::optional<NominalSize> parse_enum<NominalSize>(std::string_view);
template <> std::optional<Color> parse_enum<Color>(std::string_view);
template <> std::optional<Direction> parse_enum<Direction>(std::string_view);
template <> std::optional<CycleType> parse_enum<CycleType>(std::string_view);
template <> std::optional<Relation> parse_enum<Relation>(std::string_view);
template <> std::optional<Tier> parse_enum<Tier>(std::string_view);

DynamicProperty property_of(CycleType type);

// Palette hues are reference values on the hue circle; gray has no natural
// hue and is parked in the otherwise unused magenta band.
double palette_hue(Color c);
// Minimises circular hue distance; ties go to the lower palette index.
Color nearest_palette_color(double hue);
double circular_hue_distance(double a, double b);

inline constexpr double kSmallScale = 0.35;
inline constexpr double kLargeScale = 0.70;
inline constexpr double kOrbitRadiusMin = 1.5;
inline constexpr double kOrbitRadiusMax = 3.0;

double size_scale(SizeClass s);
// Ground-plane bounding radius factor: cube half-diagonal, others the scale.
double shape_radius_factor(Shape s);
double bounding_radius(Shape s, double scale);
bool supports_orientation_cycle(Shape s);

struct ObjectId {
  std::uint32_t value = 0;
  friend auto operator<=>(const ObjectId&, const ObjectId&) = default;
};

struct LinearMotion {
  Vec3 switch_point;
  friend bool operator==(const LinearMotion&, const LinearMotion&) = default;
};

struct Orbit {
  ObjectId center;
  double radius = kOrbitRadiusMin;
  double initial_angle = 0.0;  // degrees
  Direction direction = Direction::counterclockwise;
  friend bool operator==(const Orbit&, const Orbit&) = default;
};

struct SizeChange {
  SizeClass target = SizeClass::large;
  friend bool operator==(const SizeChange&, const SizeChange&) = default;
};

struct ColorChange {
  Color target = Color::red;
  friend bool operator==(const ColorChange&, const ColorChange&) = default;
};

struct OrientationChange {
  int turns = 1;
  friend bool operator==(const OrientationChange&, const OrientationChange&) = default;
};

using CycleVariant = std::variant<LinearMotion, Orbit, SizeChange, ColorChange, OrientationChange>;

struct CycleSpec {
  CycleVariant variant;
  int passes = 1;

  CycleType type() const;
  DynamicProperty property() const { return property_of(type()); }
  int period_frames(int frame_count) const { return frame_count / passes; }
  // Hz, given the scene's time grid.
  double frequency(int frame_count, int fps) const;

  friend bool operator==(const CycleSpec&, const CycleSpec&) = default;
};

struct ObjectSpec {
  ObjectId id;
  Shape shape = Shape::cube;
  Material material = Material::rubber;
  SizeClass size0 = SizeClass::small;
  Color color0 = Color::gray;
  Vec3 position0;
  double orientation0 = 0.0;  // degrees
  std::string mesh_ref;
  std::vector<CycleSpec> cycles;

  bool is_cyclic() const { return !cycles.empty(); }
  const CycleSpec* find(CycleType type) const;
  template <typename T>
  const T* find_variant() const {
    for (const auto& c : cycles) {
      if (const auto* v = std::get_if<T>(&c.variant)) return v;
    }
    return nullptr;
  }

  friend bool operator==(const ObjectSpec&, const ObjectSpec&) = default;
};

std::string default_mesh_ref(Shape s);

// Every violated invariant of a single object; empty iff valid.
std::vector<std::string> validate_spec(const ObjectSpec& spec);

struct Bounds {
  double x_min = -4.0;
  double x_max = 4.0;
  double y_min = -4.0;
  double y_max = 4.0;
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct LightSource {
  std::string name;
  Vec3 position;
  double intensity = 1.0;
  friend bool operator==(const LightSource&, const LightSource&) = default;
};

struct LightModulation {
  double floor = 0.2;
  int period_frames = 160;
  friend bool operator==(const LightModulation&, const LightModulation&) = default;
};

struct LightConfig {
  std::vector<LightSource> sources;
  std::optional<LightModulation> modulation;
  friend bool operator==(const LightConfig&, const LightConfig&) = default;
};

struct CameraConfig {
  Vec3 eye{11.0, -10.4, 7.4};
  Vec3 look_at{0.0, 0.0, 0.0};

  // Unit ground-plane vectors; right is forward turned clockwise.
  Vec3 forward() const;
  Vec3 right() const;
  friend bool operator==(const CameraConfig&, const CameraConfig&) = default;
};

inline constexpr int kDefaultFrameCount = 160;
inline constexpr int kDefaultFps = 32;

struct SceneGraph {
  std::string scene_id;
  Tier tier = Tier::L1;
  std::uint64_t seed = 0;
  int frame_count = kDefaultFrameCount;
  int fps = kDefaultFps;
  Bounds bounds;
  CameraConfig camera;
  LightConfig light;
  std::vector<ObjectSpec> objects;

  const ObjectSpec& object(ObjectId id) const { return objects.at(id.value); }
  std::size_t cyclic_count() const;
  std::size_t clutter_count() const { return objects.size() - cyclic_count(); }

  friend bool operator==(const SceneGraph&, const SceneGraph&) = default;
};

// Graph-level invariants on top of validate_spec: id layout, orbit
// references and their acyclicity, time grid, light period.
std::vector<std::string> validate_graph(const SceneGraph& graph);

// Object indices ordered so every orbit center precedes its orbiters.
// Returns nullopt when the orbit reference graph has a cycle.
std::optional<std::vector<std::uint32_t>> orbit_topological_order(const SceneGraph& graph);

struct ObjectState {
  Vec3 position;  // object center; base rests at position.z - scale
  double orientation = 0.0;
  double scale = kSmallScale;
  double color_hue = 0.0;
  NominalSize nominal_size = NominalSize::small;
  Color nominal_color = Color::gray;
  friend bool operator==(const ObjectState&, const ObjectState&) = default;
};

struct RelationTrack {
  Relation relation = Relation::left;
  ObjectId subject;
  ObjectId object;
  std::vector<std::uint8_t> frames;
  bool always = false;
  bool ever = false;
  friend bool operator==(const RelationTrack&, const RelationTrack&) = default;
};

struct TemporalScene {
  SceneGraph graph;
  std::vector<ObjectState> states;  // frame-major, frame_count x object_count
  std::vector<RelationTrack> tracks;

  int frame_count() const { return graph.frame_count; }
  std::size_t object_count() const { return graph.objects.size(); }
  const ObjectState& at(int frame, ObjectId id) const {
    return states[static_cast<std::size_t>(frame) * object_count() + id.value];
  }
  bool has_relations() const { return !tracks.empty() || object_count() < 2; }
  // Track for relation(subject, object); subject != object.
  const RelationTrack& track(Relation r, ObjectId subject, ObjectId object) const;
  static std::size_t track_index(Relation r, ObjectId subject, ObjectId object, std::size_t k);
};

}  // namespace cyclebench
