#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bimoplan/plan.hpp"

namespace bimoplan {

enum class TickStatus { Success, Failure, Running };

struct Gripper {
  RigidTransform pose;
  std::optional<std::string> holding;
  RigidTransform grip_offset;  // held object expressed in the gripper frame
};

/// Kinematic mock of the scene: object poses in the camera frame plus two
/// grippers with attachment state. Held objects move rigidly with their
/// holder; no dynamics, no collisions.
struct MockWorld {
  std::map<std::string, RigidTransform> objects;
  Gripper arm_x;
  Gripper arm_y;

  static MockWorld from_scene_json(const std::string& json_text);
  std::string to_json() const;

  const RigidTransform& object_pose(const std::string& name) const;
};

struct RunResult {
  TickStatus status = TickStatus::Running;
  long ticks = 0;
  std::vector<std::string> errors;  // e.g. GraspOutOfReach, TickBudgetExhausted
};

/// Tick-based interpreter. Sequence and Fallback resume at their running
/// child; Parallel ticks every unfinished child each tick and succeeds once
/// all succeeded; the KeepRunningUntilSuccess decorator re-ticks its child
/// until it succeeds. Conditions never return Running.
class PlanRunner {
 public:
  PlanRunner(const Plan& plan, const RunConfig& config);
  ~PlanRunner();
  PlanRunner(PlanRunner&&) noexcept;
  PlanRunner& operator=(PlanRunner&&) noexcept;

  TickStatus tick(MockWorld& world);
  const std::vector<std::string>& errors() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

RunResult run_to_completion(const Plan& plan, MockWorld& world, const RunConfig& config,
                            long max_ticks);

/// Expected final relative poses encoded in the plan's placement actions
/// (subject expressed in the target frame); later actions override earlier
/// ones for the same pair.
struct PlacementExpectation {
  std::string subject;
  std::string target;
  RigidTransform rel;
};
std::vector<PlacementExpectation> placement_expectations(const Plan& plan);

struct DryRunCheck {
  PlacementExpectation expected;
  RigidTransform actual;
  double pos_err_m = 0.0;
  double rot_err_rad = 0.0;
  bool pass = false;
};

struct DryRunReport {
  RunResult run;
  std::vector<DryRunCheck> checks;
  bool pass = false;
  std::string final_world_json;
};

DryRunReport dry_run(const Plan& plan, MockWorld world, const RunConfig& config,
                     double tol_m, double tol_rad);
std::string report_json(const DryRunReport& report);

}  // namespace bimoplan
