#include <doctest.h>

#include "bimoplan/errors.hpp"
#include "bimoplan/pipeline.hpp"

using namespace bimoplan;

namespace {

RunConfig config;

Primitive prim(ActionKind action, Actor actor, const std::string& target,
               const std::string& subject = "") {
  Primitive p;
  p.action = action;
  p.actor = actor;
  p.target = target;
  p.target_members = {target};
  p.subject = subject;
  if (!subject.empty()) p.subject_members = {subject};
  p.transform = RigidTransform::identity();
  return p;
}

Plan compiled_scenario(ScenarioKind kind, std::uint64_t seed = 7, double sigma = 0.0) {
  ScenarioSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  spec.sigma_pos = sigma;
  auto [trace, truth] = generate(spec);
  const auto analysis = analyze(trace, config);
  return compile_plan(analysis, config);
}

int count_actions(const BtNode& node, const std::string& name) {
  int n = node.kind == BtKind::Action && node.name == name ? 1 : 0;
  for (const auto& c : node.children) n += count_actions(c, name);
  return n;
}

int count_decorators(const BtNode& node) {
  int n = node.kind == BtKind::Decorator ? 1 : 0;
  for (const auto& c : node.children) n += count_decorators(c);
  return n;
}

}  // namespace

TEST_CASE("the move subtree matches the acquire/verify/execute template") {
  const BtNode tree = build_move_subtree("sponge", RigidTransform::identity(), "",
                                         Actor::Right, config);
  REQUIRE(tree.kind == BtKind::Sequence);
  REQUIRE(tree.children.size() == 2);
  CHECK(tree.children[0].name == "AcquirePose");
  const BtNode& fallback = tree.children[1];
  REQUIRE(fallback.kind == BtKind::Fallback);
  REQUIRE(fallback.children.size() == 2);
  CHECK(fallback.children[0].kind == BtKind::Condition);
  CHECK(fallback.children[0].name == "AtTarget");
  CHECK(fallback.children[1].name == "ExecuteTrajectoryTo");
  for (const BtNode* leaf : {&tree.children[0], &fallback.children[1]}) {
    CHECK(leaf->params.at("arm") == "ArmX");
  }
}

TEST_CASE("the transform is a parameter, not structure") {
  RigidTransform shifted;
  shifted.translation = Eigen::Vector3d(0.1, 0.2, 0.3);
  const BtNode a = build_move_subtree("x", RigidTransform::identity(), "", Actor::Left, config);
  const BtNode b = build_move_subtree("x", shifted, "", Actor::Left, config);
  CHECK(a.children.size() == b.children.size());
  CHECK(a.children[1].children[1].name == b.children[1].children[1].name);
  CHECK(a != b);  // parameters differ
}

TEST_CASE("a pick-and-place slice builds the five-stage one-arm sequence") {
  RigidTransform rel;
  const std::vector<Primitive> slice = {
      prim(ActionKind::Move, Actor::Right, "sponge"),
      prim(ActionKind::Grasp, Actor::Right, "sponge"),
      prim(ActionKind::Move, Actor::Right, "surface", "sponge"),
      prim(ActionKind::MotionPrimitivePlaceholder, Actor::Right, "sponge"),
      prim(ActionKind::Release, Actor::Right, "sponge")};
  const BtNode tree = build_one_arm(slice, {}, config);
  REQUIRE(tree.kind == BtKind::Sequence);
  REQUIRE(tree.children.size() == 5);
  CHECK(tree.children[0].kind == BtKind::Sequence);  // move to sponge
  CHECK(tree.children[1].name == "Grasp");
  CHECK(tree.children[2].kind == BtKind::Sequence);  // move to surface
  CHECK(tree.children[3].name == "MotionPrimitive");
  CHECK(tree.children[4].name == "Release");
}

TEST_CASE("a hold-only slice is a keep-grasp sequence") {
  const std::vector<Primitive> slice = {prim(ActionKind::KeepGrasp, Actor::Left, "pan")};
  const BtNode tree = build_one_arm(slice, {"pan"}, config);
  REQUIRE(tree.children.size() == 1);
  CHECK(tree.children[0].name == "KeepGrasp");
  CHECK(tree.children[0].params.at("arm") == "ArmY");
}

TEST_CASE("a release before any grasp is malformed") {
  const std::vector<Primitive> slice = {prim(ActionKind::Release, Actor::Right, "cup")};
  CHECK_THROWS_WITH_AS(build_one_arm(slice, {}, config), doctest::Contains("MalformedP"),
                       Error);
}

TEST_CASE("a release of an object held across subtrees is legitimate") {
  const std::vector<Primitive> slice = {prim(ActionKind::Release, Actor::Right, "cup")};
  const BtNode tree = build_one_arm(slice, {"cup"}, config);
  CHECK(tree.children.size() == 1);
}

TEST_CASE("uncoordinated activities run the two arms in parallel") {
  const std::vector<Primitive> right = {prim(ActionKind::Move, Actor::Right, "a"),
                                        prim(ActionKind::Grasp, Actor::Right, "a")};
  const std::vector<Primitive> left = {prim(ActionKind::KeepGrasp, Actor::Left, "b")};
  const BtNode tree = build_uncoordinated(right, left, {}, {"b"}, config);
  REQUIRE(tree.kind == BtKind::Parallel);
  REQUIRE(tree.children.size() == 2);
  CHECK(tree.children[1].children[0].name == "KeepGrasp");
}

TEST_CASE("an empty slice degenerates to the single-arm builder") {
  const std::vector<Primitive> right = {prim(ActionKind::Move, Actor::Right, "a"),
                                        prim(ActionKind::Grasp, Actor::Right, "a")};
  const BtNode tree = build_uncoordinated(right, {}, {}, {}, config);
  CHECK(tree.kind == BtKind::Sequence);
}

TEST_CASE("the synchronous template carries one coordinated trajectory") {
  std::map<Actor, RigidTransform> offsets;
  offsets[Actor::Right] = RigidTransform::identity();
  offsets[Actor::Left] = RigidTransform::identity();
  const std::vector<Primitive> slice = {
      prim(ActionKind::Move, Actor::Right, "pan"),
      prim(ActionKind::Grasp, Actor::Right, "pan"),
      prim(ActionKind::Move, Actor::Left, "pan"),
      prim(ActionKind::Grasp, Actor::Left, "pan"),
      prim(ActionKind::Move, Actor::Both, "cooker", "pan"),
      prim(ActionKind::Release, Actor::Right, "pan"),
      prim(ActionKind::Release, Actor::Left, "pan")};
  const BtNode tree = build_synchronous(slice, offsets, config);
  CHECK(count_actions(tree, "ExecCoordinatedTrajectoryTo") == 1);
  CHECK(count_actions(tree, "Grasp") == 2);
  CHECK(count_actions(tree, "Release") == 2);
  // The coordinated leaf carries both grasp offsets.
  bool found = false;
  std::function<void(const BtNode&)> walk = [&](const BtNode& n) {
    if (n.name == "ExecCoordinatedTrajectoryTo") {
      CHECK(n.params.count("grasp_x") == 1);
      CHECK(n.params.count("grasp_y") == 1);
      CHECK(n.params.at("arm") == "Both");
      found = true;
    }
    for (const auto& c : n.children) walk(c);
  };
  walk(tree);
  CHECK(found);
}

TEST_CASE("a synchronous slice without a coordinated move needs no offsets") {
  const std::vector<Primitive> slice = {
      prim(ActionKind::Move, Actor::Right, "pan"), prim(ActionKind::Grasp, Actor::Right, "pan"),
      prim(ActionKind::Move, Actor::Left, "pan"), prim(ActionKind::Grasp, Actor::Left, "pan"),
      prim(ActionKind::Release, Actor::Right, "pan"),
      prim(ActionKind::Release, Actor::Left, "pan")};
  const BtNode tree = build_synchronous(slice, {}, config);
  CHECK(count_actions(tree, "ExecCoordinatedTrajectoryTo") == 0);
  CHECK(count_actions(tree, "Grasp") == 2);
}

TEST_CASE("a coordinated move without both grasp offsets is an error") {
  const std::vector<Primitive> slice = {prim(ActionKind::Move, Actor::Both, "cooker", "pan")};
  CHECK_THROWS_WITH_AS(build_synchronous(slice, {}, config),
                       doctest::Contains("MissingGraspOffsets"), Error);
}

TEST_CASE("the sequential template shares one completion condition") {
  const std::vector<Primitive> dom = {prim(ActionKind::Move, Actor::Right, "cover"),
                                      prim(ActionKind::Grasp, Actor::Right, "cover"),
                                      prim(ActionKind::Move, Actor::Right, "pan", "cover")};
  const std::vector<Primitive> ref = {prim(ActionKind::KeepGrasp, Actor::Left, "pan")};
  const BtNode tree = build_sequential(dom, ref, "cover", "pan", false, config);
  REQUIRE(tree.kind == BtKind::Parallel);
  REQUIRE(tree.children.size() == 2);
  CHECK(count_decorators(tree) == 1);

  std::vector<BtNode> conditions[2];
  for (int b = 0; b < 2; ++b) {
    std::function<void(const BtNode&)> walk = [&](const BtNode& n) {
      if (n.kind == BtKind::Condition && n.params.at("subject") != "self") {
        conditions[b].push_back(n);
      }
      for (const auto& c : n.children) walk(c);
    };
    walk(tree.children[b]);
  }
  REQUIRE(conditions[0].size() == 1);
  REQUIRE(conditions[1].size() == 1);
  CHECK(conditions[0][0] == conditions[1][0]);  // same condition instance
  CHECK(conditions[0][0].params.at("subject") == "cover");
  CHECK(conditions[0][0].params.at("frame") == "pan");
}

TEST_CASE("a moving reference wraps the dominant branch in the retry loop") {
  const std::vector<Primitive> dom = {prim(ActionKind::Move, Actor::Right, "pan", "cover")};
  const std::vector<Primitive> ref = {prim(ActionKind::Move, Actor::Left, "cooker", "pan")};
  const BtNode tree = build_sequential(dom, ref, "cover", "pan", true, config);
  CHECK(count_decorators(tree) == 1);
  // The decorator sits on the dominant (right/first) branch now.
  CHECK(count_decorators(tree.children[0]) == 1);
  CHECK(count_decorators(tree.children[1]) == 0);
  CHECK(count_actions(tree.children[1], "ExecuteTrajectoryTo") == 1);
}

TEST_CASE("compiled pouring plan orders its coordination subtrees like the demo") {
  const Plan plan = compiled_scenario(ScenarioKind::PouringLike);
  std::vector<std::string> order;
  for (const auto& subtree : plan.root.children) {
    order.push_back(subtree.params.at("coordination"));
  }
  CHECK(order == std::vector<std::string>{"sequential", "uncoordinated", "one_arm"});
  CHECK(plan.root.children[0].params.at("dominant") == "bottle");
  CHECK(plan.root.children[0].params.at("reference") == "cup");
  CHECK(lint(plan).empty());
}

TEST_CASE("an empty primitive list compiles to a valid empty plan") {
  SegmentationResult segmentation;
  const Plan plan = compile(segmentation, config, "trace0");
  CHECK(plan.root.children.empty());
  const Plan back = parse_plan(serialize(plan));
  CHECK(back == plan);
}

TEST_CASE("compiled plans round-trip bit-exactly through XML") {
  for (ScenarioKind kind : all_scenarios()) {
    const Plan plan = compiled_scenario(kind);
    const std::string xml = serialize(plan);
    const Plan back = parse_plan(xml);
    CHECK(back == plan);
    CHECK(serialize(back) == xml);  // byte-identical re-serialization
  }
}

TEST_CASE("recompiling the same demonstration is byte-identical") {
  const Plan a = compiled_scenario(ScenarioKind::CoTransportSync);
  const Plan b = compiled_scenario(ScenarioKind::CoTransportSync);
  CHECK(serialize(a) == serialize(b));
}

TEST_CASE("a parallel node with one child violates the schema") {
  const std::string xml = R"(<?xml version="1.0"?>
<Plan version="1" trace_id="t" config_hash="c">
  <Sequence>
    <Parallel policy="require_all">
      <Sequence/>
    </Parallel>
  </Sequence>
</Plan>
)";
  CHECK_THROWS_WITH_AS(parse_plan(xml), doctest::Contains("SchemaViolation"), Error);
}

TEST_CASE("unknown actions and stray attributes violate the schema") {
  const std::string bad_action = R"(<?xml version="1.0"?>
<Plan version="1" trace_id="t" config_hash="c">
  <Sequence>
    <Action name="Teleport" arm="ArmX"/>
  </Sequence>
</Plan>
)";
  CHECK_THROWS_AS(parse_plan(bad_action), Error);
  const std::string bad_attr = R"(<?xml version="1.0"?>
<Plan version="1" trace_id="t" config_hash="c">
  <Sequence>
    <Action name="KeepGrasp" arm="ArmX" speed="9"/>
  </Sequence>
</Plan>
)";
  CHECK_THROWS_AS(parse_plan(bad_attr), Error);
  const std::string bad_transform = R"(<?xml version="1.0"?>
<Plan version="1" trace_id="t" config_hash="c">
  <Sequence>
    <Action name="ExecuteTrajectoryTo" target="a" subject="self" arm="ArmX" rel="1 2 3"/>
  </Sequence>
</Plan>
)";
  CHECK_THROWS_AS(parse_plan(bad_transform), Error);
}

TEST_CASE("structural lints certify every compiled scenario plan") {
  for (ScenarioKind kind : all_scenarios()) {
    const Plan plan = compiled_scenario(kind);
    const auto findings = lint(plan);
    for (const auto& finding : findings) {
      FAIL_CHECK(scenario_name(kind), ": ", finding);
    }
    CHECK(findings.empty());
  }
}

TEST_CASE("lints catch a sequential subtree without its hold loop") {
  Plan plan = compiled_scenario(ScenarioKind::HoldAndPlaceSequential);
  for (auto& subtree : plan.root.children) {
    if (subtree.params.at("coordination") != "sequential") continue;
    std::function<void(BtNode&)> strip = [&](BtNode& n) {
      for (auto& c : n.children) strip(c);
      std::erase_if(n.children, [](const BtNode& c) { return c.kind == BtKind::Decorator; });
    };
    strip(subtree);
  }
  CHECK_FALSE(lint(plan).empty());
}

TEST_CASE("the hold-and-place plan keeps exactly one retry decorator") {
  const Plan plan = compiled_scenario(ScenarioKind::HoldAndPlaceSequential);
  CHECK(count_decorators(plan.root) == 1);
  CHECK(count_actions(plan.root, "ExecCoordinatedTrajectoryTo") == 0);
}

TEST_CASE("the co-transport plan matches the synchronous template") {
  const Plan plan = compiled_scenario(ScenarioKind::CoTransportSync);
  REQUIRE(plan.root.children.size() == 1);
  const BtNode& sync = plan.root.children[0];
  CHECK(sync.params.at("coordination") == "synchronous");
  CHECK(count_actions(sync, "ExecCoordinatedTrajectoryTo") == 1);
  CHECK(count_actions(sync, "Grasp") == 2);
  CHECK(count_actions(sync, "Release") == 2);
  CHECK(count_decorators(sync) == 0);
}
