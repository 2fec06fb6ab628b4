#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "bimoplan/coordination.hpp"

namespace bimoplan {

struct EdgeKey {
  std::string tail;
  std::string tip;
  Relation relation = Relation::HO;

  auto operator<=>(const EdgeKey&) const = default;
  std::string str() const;
};

/// Maximal time interval with constant interaction structure and coordination
/// mode. Units tile the active (non-idle) frames without overlap.
struct InteractionUnit {
  std::size_t index = 0;
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;  // inclusive
  double t_start = 0.0;
  double t_end = 0.0;
  CoordinationMode mode;
  std::vector<EdgeKey> signature;  // sorted
  BimanualGraph representative;
};

/// Signed difference between two representative graphs: edges present only in
/// the effect graph (added) and only in the precondition graph (removed).
/// Edges whose manipulated member sets overlap the same hand (HO) or the same
/// background (OO) count as continuations, so object-to-unity transitions do
/// not report phantom releases and grasps.
struct GraphDiff {
  std::vector<Edge> added;
  std::vector<Edge> removed;
};

enum class ActionKind { Move, Grasp, Release, KeepGrasp, MotionPrimitivePlaceholder };
enum class Actor { Right, Left, Both };

const char* action_kind_name(ActionKind kind);
const char* actor_name(Actor actor);

/// One robot-level instruction: coordination mode, action, parameters, and
/// the hand(s) that performed it.
///
/// Moves come in two flavors. An approach move has subject empty, target =
/// manipulated node anchor, transform = hand pose in the target frame. A
/// placement move has target = background object, subject = manipulated
/// anchor, transform = subject pose in the target frame.
struct Primitive {
  ActionKind action = ActionKind::Move;
  Actor actor = Actor::Right;
  CoordinationMode mode;
  std::size_t unit_index = 0;
  std::string target;
  std::vector<std::string> target_members;
  std::string subject;
  std::vector<std::string> subject_members;
  RigidTransform transform;
};

std::vector<EdgeKey> graph_signature(const BimanualGraph& g);

std::vector<InteractionUnit> segment(const std::vector<BimanualGraph>& series,
                                     const RunConfig& config);

/// Fills each unit's representative graph: HO poses frozen at the unit's
/// first frame (grasp initiation), OO poses at its final frame (final
/// configuration), MI attributes averaged over the unit; then resolves the
/// unit's coordination mode on that graph.
void assign_representatives(std::vector<InteractionUnit>& units,
                            const std::vector<BimanualGraph>& series, const RunConfig& config);

GraphDiff diff(const BimanualGraph* next, const BimanualGraph* prev);

struct SegmentationResult {
  std::vector<InteractionUnit> units;
  std::vector<Primitive> primitives;
  std::vector<std::string> unfinished_grasps;  // diagnostics: held at trace end
};

/// High-level primitive extraction over the unit sequence, including the
/// virtual empty graphs before the first and after the last unit.
SegmentationResult extract_primitives(const std::vector<InteractionUnit>& units,
                                      const std::vector<BimanualGraph>& series,
                                      const RunConfig& config);

SegmentationResult segment_and_extract(const std::vector<BimanualGraph>& series,
                                       const RunConfig& config);

}  // namespace bimoplan
