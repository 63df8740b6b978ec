// Independent re-derivation of question answers. Nothing here goes through
// the program evaluator or the precomputed relation tracks: referents are
// resolved by scanning objects, colors are re-quantized from raw hues and
// relations are recomputed from positions and the camera.
#include <cmath>
#include <numbers>

#include "cyclebench/questions.hpp"
#include "cyclebench/relations.hpp"

namespace cyclebench {

namespace {

constexpr double kEps = 1e-9;

Color hue_to_color(double hue) {
  int best = 0;
  double best_d = 1e9;
  for (int i = 0; i < static_cast<int>(kColors.size()); ++i) {
    double d = std::fmod(std::abs(hue - palette_hue(kColors[i])), 360.0);
    if (360.0 - d < d) d = 360.0 - d;
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return kColors[static_cast<std::size_t>(best)];
}

// small / large only at the exact class scales, otherwise mid-transition.
std::optional<SizeClass> scale_to_size(double scale) {
  if (std::abs(scale - size_scale(SizeClass::small)) <= kEps) return SizeClass::small;
  if (std::abs(scale - size_scale(SizeClass::large)) <= kEps) return SizeClass::large;
  return std::nullopt;
}

struct View {
  Vec3 right;
  Vec3 forward;
};

View camera_view(const CameraConfig& cam) {
  const double fx = cam.look_at.x - cam.eye.x;
  const double fy = cam.look_at.y - cam.eye.y;
  const double len = std::hypot(fx, fy);
  return {{fy / len, -fx / len, 0.0}, {fx / len, fy / len, 0.0}};
}

bool relation_in_frame(const TemporalScene& t, const View& v, ObjectId a, ObjectId b, Relation r,
                       int frame) {
  const Vec3 pa = t.at(frame, a).position;
  const Vec3 pb = t.at(frame, b).position;
  const double dx = pa.x - pb.x;
  const double dy = pa.y - pb.y;
  const double side = dx * v.right.x + dy * v.right.y;
  const double depth = dx * v.forward.x + dy * v.forward.y;
  switch (r) {
    case Relation::left: return side < -kRelationDeadZone;
    case Relation::right: return side > kRelationDeadZone;
    case Relation::front: return depth < -kRelationDeadZone;
    case Relation::behind: return depth > kRelationDeadZone;
  }
  return false;
}

class Oracle {
 public:
  Oracle(const QARecord& r, const TemporalScene& t) : r_(r), t_(t), b_(r.bindings) {}

  Value answer() {
    const auto& id = r_.template_id;
    const bool universal = r_.quantifier == Quantifier::universal;
    if (id.ends_with("_attributes")) return attributes(universal);
    if (id.ends_with("_compare")) return compare(universal);
    if (id.ends_with("_relate")) return relate(universal);
    if (id == "cycle_representative_orbit") return orbit_center_attribute();
    if (id == "cycle_representative_clockwise") return orbit_direction();
    if (id == "cycle_representative_transition") return transition();
    if (id == "numeric_counting") return counting();
    if (id == "numeric_periodicity") return period_or_passes(true);
    if (id == "numeric_occurrence") return period_or_passes(false);
    return Value::invalid();
  }

 private:
  int frames() const { return t_.frame_count(); }
  Color color_at(int f, ObjectId o) const { return hue_to_color(t_.at(f, o).color_hue); }
  std::optional<SizeClass> size_at(int f, ObjectId o) const { return scale_to_size(t_.at(f, o).scale); }

  template <typename Pred>
  bool over_frames(bool universal, Pred pred) const {
    int hits = 0;
    for (int f = 0; f < frames(); ++f) hits += pred(f) ? 1 : 0;
    return universal ? hits == frames() : hits > 0;
  }

  // Unique object matching every stated attribute in all frames.
  std::optional<ObjectId> resolve(const char* key) const {
    if (!b_.contains(key)) return std::nullopt;
    const auto ref = Referent::from_json(b_.at(key));
    std::vector<ObjectId> hits;
    for (const auto& o : t_.graph.objects) {
      bool ok = true;
      if (ref.shape && o.shape != *ref.shape) ok = false;
      if (ref.material && o.material != *ref.material) ok = false;
      for (int f = 0; ok && f < frames(); ++f) {
        if (ref.color && color_at(f, o.id) != *ref.color) ok = false;
        if (ref.size && size_at(f, o.id) != ref.size) ok = false;
      }
      if (ok) hits.push_back(o.id);
    }
    if (hits.size() != 1) return std::nullopt;
    return hits.front();
  }

  std::string text(const char* key) const { return b_.at(key).get<std::string>(); }

  Value attributes(bool universal) const {
    const auto o = resolve("target");
    if (!o) return Value::invalid();
    const auto attr = text("attribute");
    const auto value = text("value");
    const auto& spec = t_.graph.object(*o);
    if (attr == "shape") return name_of(spec.shape) == value;
    if (attr == "material") return name_of(spec.material) == value;
    if (attr == "color") {
      const auto c = parse_enum<Color>(value);
      return over_frames(universal, [&](int f) { return color_at(f, *o) == c; });
    }
    const auto sz = parse_enum<SizeClass>(value);
    return over_frames(universal, [&](int f) { return size_at(f, *o) == sz; });
  }

  Value compare(bool universal) const {
    const auto a = resolve("target");
    const auto b = resolve("other");
    if (!a || !b) return Value::invalid();
    const auto attr = text("attribute");
    if (attr == "shape") return t_.graph.object(*a).shape == t_.graph.object(*b).shape;
    if (attr == "material") return t_.graph.object(*a).material == t_.graph.object(*b).material;
    if (attr == "color") {
      return over_frames(universal, [&](int f) { return color_at(f, *a) == color_at(f, *b); });
    }
    return over_frames(universal,
                       [&](int f) { return std::abs(t_.at(f, *a).scale - t_.at(f, *b).scale) <= kEps; });
  }

  Value relate(bool universal) const {
    const auto a = resolve("target");
    const auto b = resolve("other");
    if (!a || !b) return Value::invalid();
    if (*a == *b) return false;
    const auto rel = *parse_enum<Relation>(text("relation"));
    const View v = camera_view(t_.graph.camera);
    return over_frames(universal, [&](int f) { return relation_in_frame(t_, v, *a, *b, rel, f); });
  }

  std::optional<ObjectId> center_of(ObjectId o) const {
    const auto* orbit = t_.graph.object(o).find_variant<Orbit>();
    if (!orbit) return std::nullopt;
    return orbit->center;
  }

  // The attribute's value if it never changes over the video.
  Value constant_attribute(ObjectId o, const std::string& attr) const {
    const auto& spec = t_.graph.object(o);
    if (attr == "shape") return Value::attr(name_of(spec.shape));
    if (attr == "material") return Value::attr(name_of(spec.material));
    if (attr == "color") {
      const Color c0 = color_at(0, o);
      for (int f = 1; f < frames(); ++f) {
        if (color_at(f, o) != c0) return Value::invalid();
      }
      return Value::attr(name_of(c0));
    }
    const auto s0 = size_at(0, o);
    for (int f = 1; f < frames(); ++f) {
      if (size_at(f, o) != s0) return Value::invalid();
    }
    return s0 ? Value::attr(name_of(*s0)) : Value::invalid();
  }

  Value orbit_center_attribute() const {
    const auto o = resolve("target");
    if (!o) return Value::invalid();
    const auto c = center_of(*o);
    if (!c) return Value::invalid();
    return constant_attribute(*c, text("attribute"));
  }

  // Ground plane only; z follows each object's own scale.
  Vec3 relative_to_center(ObjectId o, ObjectId c, int f) const {
    Vec3 d = t_.at(f, o).position - t_.at(f, c).position;
    d.z = 0.0;
    return d;
  }

  // Sense of rotation from the first two frames of the relative position.
  Value orbit_direction() const {
    const auto o = resolve("target");
    if (!o) return Value::invalid();
    const auto c = center_of(*o);
    if (!c) return Value::invalid();
    const Vec3 a = relative_to_center(*o, *c, 0);
    const Vec3 b = relative_to_center(*o, *c, 1);
    const double cross = a.x * b.y - a.y * b.x;
    if (std::abs(cross) <= kEps) return Value::invalid();
    return Value::attr(name_of(cross > 0 ? Direction::counterclockwise : Direction::clockwise));
  }

  // Frames at which the property governed by `cycle` is back at its frame-0
  // value.
  std::vector<int> recurrences(ObjectId o, CycleType cycle) const {
    const auto same = [&](int f) {
      switch (cycle) {
        case CycleType::linear: return ground_distance(t_.at(f, o).position, t_.at(0, o).position) <= kEps;
        case CycleType::orbit: {
          const auto c = *center_of(o);
          return norm(relative_to_center(o, c, f) - relative_to_center(o, c, 0)) <= kEps;
        }
        case CycleType::size: return std::abs(t_.at(f, o).scale - t_.at(0, o).scale) <= kEps;
        case CycleType::color: return circular_hue_distance(t_.at(f, o).color_hue, t_.at(0, o).color_hue) <= kEps;
        case CycleType::orientation: {
          const double d = std::fmod(std::abs(t_.at(f, o).orientation - t_.at(0, o).orientation), 360.0);
          return std::min(d, 360.0 - d) <= kEps;
        }
      }
      return false;
    };
    std::vector<int> out;
    for (int f = 0; f < frames(); ++f) {
      if (same(f)) out.push_back(f);
    }
    return out;
  }

  // First return to the start state; the video's end counts when nothing
  // returns earlier.
  int period_of(ObjectId o, CycleType cycle) const {
    const auto rec = recurrences(o, cycle);
    return rec.size() > 1 ? rec[1] : frames();
  }

  Value transition() const {
    const auto o = resolve("target");
    if (!o) return Value::invalid();
    const auto attr = text("attribute");
    const auto cycle = attr == "color" ? CycleType::color : CycleType::size;
    int frame = 0;
    if (text("phase") == "final") {
      if (!t_.graph.object(*o).find(cycle)) return Value::invalid();
      frame = period_of(*o, cycle) / 2;
    }
    if (attr == "color") return Value::attr(name_of(color_at(frame, *o)));
    const auto sz = size_at(frame, *o);
    return sz ? Value::attr(name_of(*sz)) : Value::invalid();
  }

  Value counting() const {
    const auto which = text("cycle");
    std::int64_t n = 0;
    for (const auto& o : t_.graph.objects) {
      if (which == "any") {
        n += o.cycles.empty() ? 0 : 1;
        continue;
      }
      for (const auto& c : o.cycles) {
        if (name_of(c.type()) == which) {
          ++n;
          break;
        }
      }
    }
    return n;
  }

  Value period_or_passes(bool period) const {
    const auto o = resolve("target");
    if (!o) return Value::invalid();
    const auto cycle = *parse_enum<CycleType>(text("cycle"));
    const auto* spec = t_.graph.object(*o).find(cycle);
    if (!spec) return Value::invalid();
    if (period) return Value(static_cast<std::int64_t>(period_of(*o, cycle)));
    auto count = static_cast<std::int64_t>(recurrences(*o, cycle).size());
    if (const auto* rot = std::get_if<OrientationChange>(&spec->variant)) count /= rot->turns;
    return count;
  }

  const QARecord& r_;
  const TemporalScene& t_;
  const nlohmann::json& b_;
};

}  // namespace

Value brute_force_answer(const QARecord& record, const TemporalScene& scene) {
  try {
    return Oracle(record, scene).answer();
  } catch (const std::exception&) {
    return Value::invalid();
  }
}

}  // namespace cyclebench
