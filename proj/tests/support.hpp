#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "cyclebench/builder.hpp"
#include "cyclebench/cycles.hpp"
#include "cyclebench/dataset.hpp"
#include "cyclebench/model.hpp"
#include "cyclebench/relations.hpp"

namespace cbtest {

using namespace cyclebench;

inline ObjectSpec object(std::uint32_t id, Shape shape, Color color, SizeClass size, Material material,
                         Vec3 pos) {
  ObjectSpec o;
  o.id = ObjectId{id};
  o.shape = shape;
  o.color0 = color;
  o.size0 = size;
  o.material = material;
  o.position0 = pos;
  o.mesh_ref = default_mesh_ref(shape);
  return o;
}

inline CycleSpec cycle(CycleVariant v, int passes) { return CycleSpec{std::move(v), passes}; }

// Puts `orbiter` on its orbit around `center` at the declared initial angle.
inline void place_on_orbit(ObjectSpec& orbiter, const ObjectSpec& center, double radius, double angle_deg,
                           Direction dir, int passes) {
  const double a = angle_deg * std::numbers::pi / 180.0;
  orbiter.position0 = {center.position0.x + radius * std::cos(a), center.position0.y + radius * std::sin(a), 0.0};
  orbiter.cycles.push_back(cycle(Orbit{center.id, radius, angle_deg, dir}, passes));
}

inline SceneGraph scene(std::vector<ObjectSpec> objects, std::string id = "T_00000") {
  SceneGraph g;
  g.scene_id = std::move(id);
  g.seed = 1;
  g.light.sources = {{"key", {6.0, -3.0, 6.0}, 1.0}, {"fill", {-4.0, -1.0, 3.5}, 0.5}};
  g.objects = std::move(objects);
  return g;
}

// Camera looking along +y: right = +x, front = smaller y.
inline CameraConfig axis_camera() { return CameraConfig{{0.0, -10.0, 5.0}, {0.0, 0.0, 0.0}}; }

inline bool near(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }
inline bool near(Vec3 a, Vec3 b, double tol = 1e-9) {
  return near(a.x, b.x, tol) && near(a.y, b.y, tol) && near(a.z, b.z, tol);
}

// A few small scenes exercising every cycle type, used by several suites.
inline std::vector<SceneGraph> built_scenes(Tier tier, int n, std::uint64_t base_seed) {
  const BuildConfig config = tier_config(tier);
  std::vector<SceneGraph> out;
  for (std::uint64_t s = base_seed; static_cast<int>(out.size()) < n; ++s) {
    try {
      out.push_back(build_scene(s, config));
    } catch (const GenerationFailed&) {
    }
  }
  return out;
}

}  // namespace cbtest
