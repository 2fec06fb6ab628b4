#include "bimoplan/dry_run.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <nlohmann/json.hpp>

#include "bimoplan/errors.hpp"
#include "bimoplan/trace.hpp"

namespace bimoplan {
namespace {

using nlohmann::json;

json pose_to_json(const RigidTransform& t) {
  return json{{"position", {t.translation.x(), t.translation.y(), t.translation.z()}},
              {"orientation",
               {t.rotation.w(), t.rotation.x(), t.rotation.y(), t.rotation.z()}}};
}

RigidTransform pose_from_json(const json& obj, const std::string& where) {
  if (!obj.contains("position") || !obj.contains("orientation")) {
    raise(ErrorCode::SchemaError, where + ": pose needs position and orientation");
  }
  const auto& p = obj["position"];
  const auto& q = obj["orientation"];
  if (p.size() != 3 || q.size() != 4) {
    raise(ErrorCode::SchemaError, where + ": pose arity");
  }
  return make_transform(
      Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                         q[3].get<double>()),
      Eigen::Vector3d(p[0].get<double>(), p[1].get<double>(), p[2].get<double>()));
}

}  // namespace

const RigidTransform& MockWorld::object_pose(const std::string& name) const {
  auto it = objects.find(name);
  if (it == objects.end()) raise(ErrorCode::UnknownElement, name);
  return it->second;
}

MockWorld MockWorld::from_scene_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    raise(ErrorCode::ParseError, std::string("scene: ") + e.what());
  }
  MockWorld world;
  if (!doc.contains("elements")) raise(ErrorCode::SchemaError, "scene: missing 'elements'");
  for (const auto& elem : doc["elements"]) {
    if (!elem.contains("name")) raise(ErrorCode::SchemaError, "scene: element without name");
    const std::string name = elem["name"].get<std::string>();
    const std::string kind = elem.value("kind", "object");
    if (kind != "object") continue;  // hand tracks are not part of the mock scene
    world.objects[name] = pose_from_json(elem, "element '" + name + "'");
  }
  if (doc.contains("grippers")) {
    const auto& grippers = doc["grippers"];
    if (grippers.contains("arm_x")) {
      world.arm_x.pose = pose_from_json(grippers["arm_x"], "gripper arm_x");
    }
    if (grippers.contains("arm_y")) {
      world.arm_y.pose = pose_from_json(grippers["arm_y"], "gripper arm_y");
    }
  }
  return world;
}

std::string MockWorld::to_json() const {
  json doc;
  doc["elements"] = json::array();
  for (const auto& [name, pose] : objects) {
    json e = pose_to_json(pose);
    e["name"] = name;
    e["kind"] = "object";
    doc["elements"].push_back(e);
  }
  auto gripper_json = [](const Gripper& g) {
    json j = pose_to_json(g.pose);
    j["holding"] = g.holding ? json(*g.holding) : json(nullptr);
    return j;
  };
  doc["grippers"] = {{"arm_x", gripper_json(arm_x)}, {"arm_y", gripper_json(arm_y)}};
  return doc.dump(2);
}

namespace {

struct Runtime;

struct Node {
  const BtNode* spec = nullptr;
  std::vector<Node> children;
  // control state
  std::size_t cursor = 0;            // Sequence/Fallback resume point
  std::vector<char> finished;        // Parallel bookkeeping
  // action state
  bool in_motion = false;
  int progress = 0;
  RigidTransform start_a, goal_a;    // gripper or object start/goal
  RigidTransform start_b, goal_b;

  void reset() {
    cursor = 0;
    finished.assign(children.size(), 0);
    in_motion = false;
    progress = 0;
    for (auto& c : children) c.reset();
  }
};

Node instantiate(const BtNode& spec) {
  Node n;
  n.spec = &spec;
  for (const auto& c : spec.children) n.children.push_back(instantiate(c));
  n.finished.assign(n.children.size(), 0);
  return n;
}

struct Runtime {
  const RunConfig& config;
  MockWorld& world;
  std::map<std::string, RigidTransform>& blackboard;
  std::vector<std::string>* errors;

  Gripper& gripper(const std::string& arm) {
    if (arm == "ArmX") return world.arm_x;
    if (arm == "ArmY") return world.arm_y;
    raise(ErrorCode::InvalidArgument, "unknown arm '" + arm + "'");
  }

  void move_gripper(Gripper& g, const RigidTransform& pose) {
    g.pose = pose;
    if (g.holding) world.objects[*g.holding] = pose * g.grip_offset;
  }

  std::string param(const BtNode& spec, const char* key) const {
    auto it = spec.params.find(key);
    return it == spec.params.end() ? std::string() : it->second;
  }

  void note_error(const std::string& message) { errors->push_back(message); }
};

TickStatus tick_node(Node& node, Runtime& rt);

TickStatus tick_sequence(Node& node, Runtime& rt) {
  while (node.cursor < node.children.size()) {
    const TickStatus s = tick_node(node.children[node.cursor], rt);
    if (s == TickStatus::Running) return TickStatus::Running;
    if (s == TickStatus::Failure) {
      node.reset();
      return TickStatus::Failure;
    }
    ++node.cursor;
  }
  node.reset();
  return TickStatus::Success;
}

TickStatus tick_fallback(Node& node, Runtime& rt) {
  while (node.cursor < node.children.size()) {
    const TickStatus s = tick_node(node.children[node.cursor], rt);
    if (s == TickStatus::Running) return TickStatus::Running;
    if (s == TickStatus::Success) {
      node.reset();
      return TickStatus::Success;
    }
    ++node.cursor;
  }
  node.reset();
  return TickStatus::Failure;
}

TickStatus tick_parallel(Node& node, Runtime& rt) {
  bool any_running = false;
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    if (node.finished[i]) continue;
    const TickStatus s = tick_node(node.children[i], rt);
    if (s == TickStatus::Failure) {
      node.reset();
      return TickStatus::Failure;
    }
    if (s == TickStatus::Success) {
      node.finished[i] = 1;
    } else {
      any_running = true;
    }
  }
  if (any_running) return TickStatus::Running;
  node.reset();
  return TickStatus::Success;
}

TickStatus tick_decorator(Node& node, Runtime& rt) {
  const TickStatus s = tick_node(node.children.front(), rt);
  if (s == TickStatus::Success) {
    node.reset();
    return TickStatus::Success;
  }
  return TickStatus::Running;  // re-tick until the child succeeds
}

TickStatus tick_condition(Node& node, Runtime& rt) {
  const BtNode& spec = *node.spec;
  if (spec.name != "AtTarget") raise(ErrorCode::UnknownActionName, spec.name);
  const std::string frame = rt.param(spec, "frame");
  const std::string subject = rt.param(spec, "subject");
  const RigidTransform rel = parse_transform(rt.param(spec, "rel"));
  const double tol_m = std::stod(rt.param(spec, "tol_m"));
  const double tol_rad = std::stod(rt.param(spec, "tol_rad"));

  auto frame_it = rt.world.objects.find(frame);
  if (frame_it == rt.world.objects.end()) return TickStatus::Failure;
  RigidTransform subject_pose;
  if (subject == "self" || subject.empty()) {
    const std::string arm = rt.param(spec, "arm");
    if (arm != "ArmX" && arm != "ArmY") return TickStatus::Failure;
    subject_pose = rt.gripper(arm).pose;
  } else {
    auto it = rt.world.objects.find(subject);
    if (it == rt.world.objects.end()) return TickStatus::Failure;
    subject_pose = it->second;
  }
  const RigidTransform actual = relative_pose(subject_pose, frame_it->second);
  return approx_equal(actual, rel, tol_m, tol_rad) ? TickStatus::Success
                                                   : TickStatus::Failure;
}

TickStatus tick_action(Node& node, Runtime& rt) {
  const BtNode& spec = *node.spec;
  const std::string& name = spec.name;

  if (name == "AcquirePose") {
    const std::string target = rt.param(spec, "target");
    auto it = rt.world.objects.find(target);
    if (it == rt.world.objects.end()) {
      rt.note_error("AcquirePose: unknown element '" + target + "'");
      return TickStatus::Failure;
    }
    rt.blackboard[target] = it->second;
    return TickStatus::Success;
  }

  if (name == "Grasp") {
    const std::string arm = rt.param(spec, "arm");
    Gripper& g = rt.gripper(arm);
    std::string nearest;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [obj, pose] : rt.world.objects) {
      const double d = (pose.translation - g.pose.translation).norm();
      if (d < best) {
        best = d;
        nearest = obj;
      }
    }
    if (nearest.empty() || best > rt.config.grasp_radius_m) {
      rt.note_error("GraspOutOfReach: no object within " +
                    std::to_string(rt.config.grasp_radius_m) + " m of " + arm);
      return TickStatus::Failure;
    }
    g.holding = nearest;
    g.grip_offset = relative_pose(rt.world.objects[nearest], g.pose);
    return TickStatus::Success;
  }

  if (name == "Release") {
    const std::string arm = rt.param(spec, "arm");
    Gripper& g = rt.gripper(arm);
    if (!g.holding) {
      rt.note_error("Release: " + arm + " is not holding anything");
      return TickStatus::Failure;
    }
    g.holding.reset();
    g.grip_offset = RigidTransform::identity();
    return TickStatus::Success;
  }

  if (name == "KeepGrasp") {
    const std::string arm = rt.param(spec, "arm");
    return rt.gripper(arm).holding ? TickStatus::Success : TickStatus::Failure;
  }

  if (name == "MotionPrimitive") {
    return TickStatus::Success;  // learned motions are out of scope
  }

  if (name == "ExecuteTrajectoryTo") {
    const std::string arm = rt.param(spec, "arm");
    Gripper& g = rt.gripper(arm);
    if (!node.in_motion) {
      const std::string target = rt.param(spec, "target");
      const std::string subject = rt.param(spec, "subject");
      auto stored = rt.blackboard.find(target);
      if (stored == rt.blackboard.end()) {
        rt.note_error("ExecuteTrajectoryTo: pose of '" + target + "' was never acquired");
        return TickStatus::Failure;
      }
      const RigidTransform rel = parse_transform(rt.param(spec, "rel"));
      RigidTransform gripper_goal;
      if (subject == "self" || subject.empty()) {
        gripper_goal = stored->second * rel;
      } else {
        if (!g.holding || *g.holding != subject) {
          rt.note_error("ExecuteTrajectoryTo: " + arm + " does not hold '" + subject + "'");
          return TickStatus::Failure;
        }
        const RigidTransform object_goal = stored->second * rel;
        gripper_goal = object_goal * g.grip_offset.inverse();
      }
      node.in_motion = true;
      node.progress = 0;
      node.start_a = g.pose;
      node.goal_a = gripper_goal;
    }
    ++node.progress;
    const double s = std::min(1.0, static_cast<double>(node.progress) /
                                       static_cast<double>(rt.config.move_ticks));
    rt.move_gripper(g, s >= 1.0 ? node.goal_a : interpolate_pose(node.start_a, node.goal_a, s));
    if (node.progress >= rt.config.move_ticks) {
      node.in_motion = false;
      node.progress = 0;
      return TickStatus::Success;
    }
    return TickStatus::Running;
  }

  if (name == "ExecCoordinatedTrajectoryTo") {
    if (!node.in_motion) {
      const std::string target = rt.param(spec, "target");
      const std::string subject = rt.param(spec, "subject");
      auto stored = rt.blackboard.find(target);
      if (stored == rt.blackboard.end()) {
        rt.note_error("ExecCoordinatedTrajectoryTo: pose of '" + target + "' was never acquired");
        return TickStatus::Failure;
      }
      auto it = rt.world.objects.find(subject);
      if (it == rt.world.objects.end()) {
        rt.note_error("ExecCoordinatedTrajectoryTo: unknown subject '" + subject + "'");
        return TickStatus::Failure;
      }
      node.in_motion = true;
      node.progress = 0;
      node.start_a = it->second;                 // shared object path
      node.goal_a = stored->second * parse_transform(rt.param(spec, "rel"));
    }
    ++node.progress;
    const double s = std::min(1.0, static_cast<double>(node.progress) /
                                       static_cast<double>(rt.config.move_ticks));
    const RigidTransform object_pose =
        s >= 1.0 ? node.goal_a : interpolate_pose(node.start_a, node.goal_a, s);
    // Both gripper paths derive from the stored grasp offsets, keeping the
    // end-effector distance rigidly constant.
    const RigidTransform grasp_x = parse_transform(rt.param(spec, "grasp_x"));
    const RigidTransform grasp_y = parse_transform(rt.param(spec, "grasp_y"));
    rt.move_gripper(rt.world.arm_x, object_pose * grasp_x);
    rt.move_gripper(rt.world.arm_y, object_pose * grasp_y);
    rt.world.objects[rt.param(spec, "subject")] = object_pose;
    if (node.progress >= rt.config.move_ticks) {
      node.in_motion = false;
      node.progress = 0;
      return TickStatus::Success;
    }
    return TickStatus::Running;
  }

  raise(ErrorCode::UnknownActionName, name);
}

TickStatus tick_node(Node& node, Runtime& rt) {
  switch (node.spec->kind) {
    case BtKind::Sequence: return tick_sequence(node, rt);
    case BtKind::Fallback: return tick_fallback(node, rt);
    case BtKind::Parallel: return tick_parallel(node, rt);
    case BtKind::Decorator: return tick_decorator(node, rt);
    case BtKind::Condition: return tick_condition(node, rt);
    case BtKind::Action: return tick_action(node, rt);
  }
  return TickStatus::Failure;
}

}  // namespace

struct PlanRunner::Impl {
  Plan plan;  // owned copy; runtime nodes point into it
  RunConfig config;
  Node root;
  std::map<std::string, RigidTransform> blackboard;
  std::vector<std::string> errors;

  Impl(const Plan& p, const RunConfig& c) : plan(p), config(c) {
    root = instantiate(plan.root);
  }
};

PlanRunner::PlanRunner(const Plan& plan, const RunConfig& config)
    : impl_(std::make_unique<Impl>(plan, config)) {}
PlanRunner::~PlanRunner() = default;
PlanRunner::PlanRunner(PlanRunner&&) noexcept = default;
PlanRunner& PlanRunner::operator=(PlanRunner&&) noexcept = default;

TickStatus PlanRunner::tick(MockWorld& world) {
  Runtime rt{impl_->config, world, impl_->blackboard, &impl_->errors};
  return tick_node(impl_->root, rt);
}

const std::vector<std::string>& PlanRunner::errors() const { return impl_->errors; }

RunResult run_to_completion(const Plan& plan, MockWorld& world, const RunConfig& config,
                            long max_ticks) {
  if (max_ticks < 1) raise(ErrorCode::InvalidArgument, "max_ticks must be positive");
  PlanRunner runner(plan, config);
  RunResult result;
  for (long i = 0; i < max_ticks; ++i) {
    ++result.ticks;
    const TickStatus s = runner.tick(world);
    if (s != TickStatus::Running) {
      result.status = s;
      result.errors = runner.errors();
      return result;
    }
  }
  result.status = TickStatus::Running;
  result.errors = runner.errors();
  result.errors.push_back("TickBudgetExhausted: plan still running after " +
                          std::to_string(max_ticks) + " ticks");
  return result;
}

std::vector<PlacementExpectation> placement_expectations(const Plan& plan) {
  struct Entry {
    PlacementExpectation expectation;
    std::size_t order;
  };
  std::vector<Entry> entries;
  std::size_t order = 0;
  std::vector<std::pair<std::size_t, std::string>> moved;  // (order, subject)

  std::function<void(const BtNode&)> visit = [&](const BtNode& node) {
    if (node.kind == BtKind::Action &&
        (node.name == "ExecuteTrajectoryTo" || node.name == "ExecCoordinatedTrajectoryTo")) {
      const auto subject = node.params.count("subject") ? node.params.at("subject") : "self";
      ++order;
      if (subject != "self") {
        moved.emplace_back(order, subject);
        PlacementExpectation e;
        e.subject = subject;
        e.target = node.params.at("target");
        e.rel = parse_transform(node.params.at("rel"));
        auto it = std::find_if(entries.begin(), entries.end(), [&](const Entry& x) {
          return x.expectation.subject == e.subject && x.expectation.target == e.target;
        });
        if (it != entries.end()) {
          it->expectation = e;
          it->order = order;
        } else {
          entries.push_back({e, order});
        }
      }
    }
    for (const auto& c : node.children) visit(c);
  };
  visit(plan.root);

  // Only configurations that persist to the end of the plan are checkable:
  // drop pairs whose subject or frame object is moved by a later action.
  std::vector<PlacementExpectation> out;
  for (const auto& entry : entries) {
    bool stale = false;
    for (const auto& [at, subject] : moved) {
      if (at > entry.order &&
          (subject == entry.expectation.subject || subject == entry.expectation.target)) {
        stale = true;
      }
    }
    if (!stale) out.push_back(entry.expectation);
  }
  return out;
}

DryRunReport dry_run(const Plan& plan, MockWorld world, const RunConfig& config,
                     double tol_m, double tol_rad) {
  DryRunReport report;
  report.run = run_to_completion(plan, world, config, config.max_ticks);
  report.pass = report.run.status == TickStatus::Success;
  for (const auto& expectation : placement_expectations(plan)) {
    DryRunCheck check;
    check.expected = expectation;
    if (!world.objects.count(expectation.subject) || !world.objects.count(expectation.target)) {
      check.pass = false;
      report.pass = false;
      report.checks.push_back(check);
      continue;
    }
    check.actual = relative_pose(world.object_pose(expectation.subject),
                                 world.object_pose(expectation.target));
    check.pos_err_m = translation_distance(check.actual, expectation.rel);
    check.rot_err_rad = rotation_distance(check.actual, expectation.rel);
    check.pass = check.pos_err_m <= tol_m && check.rot_err_rad <= tol_rad;
    report.pass = report.pass && check.pass;
    report.checks.push_back(check);
  }
  report.final_world_json = world.to_json();
  return report;
}

std::string report_json(const DryRunReport& report) {
  json doc;
  doc["status"] = report.run.status == TickStatus::Success
                      ? "success"
                      : (report.run.status == TickStatus::Failure ? "failure" : "running");
  doc["ticks"] = report.run.ticks;
  doc["errors"] = report.run.errors;
  doc["pass"] = report.pass;
  doc["checks"] = json::array();
  for (const auto& check : report.checks) {
    doc["checks"].push_back({{"subject", check.expected.subject},
                             {"target", check.expected.target},
                             {"expected", format_transform(check.expected.rel)},
                             {"actual", format_transform(check.actual)},
                             {"pos_err_m", check.pos_err_m},
                             {"rot_err_rad", check.rot_err_rad},
                             {"pass", check.pass}});
  }
  doc["final_world"] = json::parse(report.final_world_json);
  return doc.dump(2);
}

}  // namespace bimoplan
