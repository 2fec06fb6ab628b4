#include "bimoplan/coordination.hpp"

#include <algorithm>
#include <cmath>

#include "bimoplan/errors.hpp"

namespace bimoplan {
namespace {

bool contains(const std::vector<std::string>& set, const std::string& value) {
  return std::find(set.begin(), set.end(), value) != set.end();
}

bool intersects(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  for (const auto& x : a)
    if (contains(b, x)) return true;
  return false;
}

// One hand's background object is (part of) the other's manipulated node.
bool background_feeds(const SceneGraph& from, const SceneGraph& into) {
  const auto bkg = from.background();
  return bkg && contains(into.manipulated(), *bkg);
}

}  // namespace

namespace {
DominantAssignment resolve_dominant_unchecked(const BimanualGraph& g, const RunConfig& config);
}  // namespace

std::string coordination_label(const std::optional<CoordinationMode>& mode) {
  if (!mode) return "idle";
  switch (mode->kind) {
    case CoordinationMode::Kind::OneArm:
      return mode->active == HandSide::Right ? "one_arm_right" : "one_arm_left";
    case CoordinationMode::Kind::Uncoordinated: return "uncoordinated";
    case CoordinationMode::Kind::Synchronous: return "synchronous";
    case CoordinationMode::Kind::Sequential: return "sequential";
  }
  return "idle";
}

BimanualGraph merge(const SceneGraph& right, const SceneGraph& left) {
  if (right.frame_t != left.frame_t) {
    raise(ErrorCode::FrameMismatch,
          "right graph at t=" + std::to_string(right.frame_t) + ", left at t=" +
              std::to_string(left.frame_t));
  }
  if (right.hand != HandSide::Right || left.hand != HandSide::Left) {
    raise(ErrorCode::InvalidArgument, "merge expects (right, left) graphs");
  }
  BimanualGraph g;
  g.right = right;
  g.left = left;
  g.frame_t = right.frame_t;
  return g;
}

std::string bimanual_topology_label(const BimanualGraph& g) {
  if (g.empty()) return "idle";
  if (g.right.empty() || g.left.empty()) return "one_hand";
  const auto mr = g.right.manipulated();
  const auto ml = g.left.manipulated();
  if (intersects(mr, ml)) return "gamma";
  if (background_feeds(g.right, g.left) || background_feeds(g.left, g.right)) {
    return "delta_eta";
  }
  const auto br = g.right.background();
  const auto bl = g.left.background();
  if (br && bl && *br == *bl) return "beta";
  return "alpha";
}

std::optional<CoordinationMode> classify(const BimanualGraph& g, const RunConfig& config) {
  if (g.empty()) return std::nullopt;

  CoordinationMode mode;
  if (g.right.empty() || g.left.empty()) {
    mode.kind = CoordinationMode::Kind::OneArm;
    mode.active = g.right.empty() ? HandSide::Left : HandSide::Right;
    return mode;
  }

  // Both active: validate structure before classification.
  topology(g.right);
  topology(g.left);

  const auto mr = g.right.manipulated();
  const auto ml = g.left.manipulated();
  if (mr.empty() || ml.empty()) {
    raise(ErrorCode::UnclassifiableTopology, "active graph without a manipulated node");
  }

  if (intersects(mr, ml)) {
    mode.kind = CoordinationMode::Kind::Synchronous;
    return mode;
  }
  if (background_feeds(g.right, g.left) || background_feeds(g.left, g.right)) {
    mode.kind = CoordinationMode::Kind::Sequential;
    const auto dom = resolve_dominant_unchecked(g, config);
    mode.dominant_hand = dom.dominant_hand;
    mode.dominant_object = dom.dominant_object;
    mode.reference_object = dom.reference_object;
    return mode;
  }
  mode.kind = CoordinationMode::Kind::Uncoordinated;
  return mode;
}

namespace {

DominantAssignment resolve_dominant_unchecked(const BimanualGraph& g, const RunConfig& config) {
  const Edge* ro = g.right.ho_edge();
  const Edge* lo = g.left.ho_edge();
  if (!ro || !lo) raise(ErrorCode::NotSequential, "sequential graph needs both HO edges");

  const double delta = ro->mi_bits - lo->mi_bits;
  HandSide dominant;
  if (std::abs(delta) >= config.mi_tie_eps) {
    dominant = delta > 0.0 ? HandSide::Right : HandSide::Left;
  } else {
    // Structural tie-break: the hand whose OO edge points into the other's
    // manipulated node moves the dominant object; its tip becomes o_ref.
    const bool right_points = background_feeds(g.right, g.left);
    const bool left_points = background_feeds(g.left, g.right);
    if (right_points && !left_points) {
      dominant = HandSide::Right;
    } else if (left_points && !right_points) {
      dominant = HandSide::Left;
    } else {
      dominant = HandSide::Right;  // symmetric double case
    }
  }

  DominantAssignment out;
  out.dominant_hand = dominant;
  const SceneGraph& dom_graph = dominant == HandSide::Right ? g.right : g.left;
  const SceneGraph& ref_graph = dominant == HandSide::Right ? g.left : g.right;
  out.dominant_object = dom_graph.ho_edge()->tip.anchor();
  out.reference_object = ref_graph.ho_edge()->tip.anchor();
  return out;
}

}  // namespace

DominantAssignment resolve_dominant(const BimanualGraph& g, const RunConfig& config) {
  const auto mode = classify(g, config);
  if (!mode || mode->kind != CoordinationMode::Kind::Sequential) {
    raise(ErrorCode::NotSequential, "coordination mode is " + coordination_label(mode));
  }
  return DominantAssignment{mode->dominant_hand, mode->dominant_object,
                            mode->reference_object};
}

}  // namespace bimoplan
