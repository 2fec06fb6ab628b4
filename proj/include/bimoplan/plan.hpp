#pragma once

#include <map>
#include <string>
#include <vector>

#include "bimoplan/segmentation.hpp"

namespace bimoplan {

enum class BtKind { Sequence, Fallback, Parallel, Decorator, Action, Condition };

/// Behavior-tree node. Control nodes carry children; Action/Condition leaves
/// carry a name from the closed vocabulary plus string parameters (transforms
/// as 7-tuples "tx ty tz qw qx qy qz", fixed 9-decimal formatting).
///
/// Action names: AcquirePose, ExecuteTrajectoryTo, ExecCoordinatedTrajectoryTo,
/// Grasp, Release, KeepGrasp, MotionPrimitive. Condition names: AtTarget.
struct BtNode {
  BtKind kind = BtKind::Sequence;
  std::string name;                          // leaves only
  std::map<std::string, std::string> params;
  std::vector<BtNode> children;

  bool operator==(const BtNode&) const = default;
};

struct Plan {
  BtNode root;  // Sequence of coordination subtrees
  std::string trace_id;
  std::string config_hash;

  bool operator==(const Plan&) const = default;
};

std::string format_transform(const RigidTransform& t);
RigidTransform parse_transform(const std::string& text);

const char* arm_name(Actor actor);  // ArmX / ArmY / Both (role map: right->ArmX)

/// Reach-and-verify template: Sequence[AcquirePose(target),
/// Fallback[AtTarget, ExecuteTrajectoryTo(target, rel)]]. subject empty means
/// the gripper itself moves; otherwise the named held object is placed.
BtNode build_move_subtree(const std::string& target, const RigidTransform& rel,
                          const std::string& subject, Actor arm, const RunConfig& config);

/// Sequence of one hand's primitives (reach+grasp, placements, motion
/// placeholders, keep-grasp, release). held_in lists objects the arm already
/// holds when the slice starts; releasing anything else is MalformedP.
BtNode build_one_arm(const std::vector<Primitive>& slice,
                     const std::vector<std::string>& held_in, const RunConfig& config);

BtNode build_uncoordinated(const std::vector<Primitive>& right_slice,
                           const std::vector<Primitive>& left_slice,
                           const std::vector<std::string>& held_right,
                           const std::vector<std::string>& held_left, const RunConfig& config);

/// Synchronous template: per-arm reach+grasp, one coordinated move of the
/// shared object (projected onto both arms through the demonstrated grasp
/// offsets), then the releases.
BtNode build_synchronous(const std::vector<Primitive>& slice,
                         const std::map<Actor, RigidTransform>& grasp_offsets,
                         const RunConfig& config);

/// Sequential template: parallel of the dominant arm's move toward the
/// reference object and the reference arm's keep-grasp loop; both branches
/// share one AtTarget condition. ref_moves switches to the variant where the
/// dominant arm re-detects and adjusts in a loop.
BtNode build_sequential(const std::vector<Primitive>& dom_slice,
                        const std::vector<Primitive>& ref_slice, const std::string& dom_object,
                        const std::string& ref_object, bool ref_moves, const RunConfig& config);

/// Compiles the primitive list into the full plan: one coordination subtree
/// per maximal run of constant coordination mode, annotated for tooling.
Plan compile(const SegmentationResult& segmentation, const RunConfig& config,
             const std::string& trace_id);

/// Structural certifications run on every compiled plan. Violations are
/// returned as human-readable findings; an empty list certifies the plan.
std::vector<std::string> lint(const Plan& plan);

/// Deterministic XML rendering; parse(serialize(p)) == p and re-serialization
/// is byte-identical.
std::string serialize(const Plan& plan);
Plan parse_plan(const std::string& xml);

}  // namespace bimoplan
