#include <doctest.h>

#include "bimoplan/errors.hpp"
#include "bimoplan/scene_graph.hpp"
#include "bimoplan/synth.hpp"

using namespace bimoplan;

namespace {

NodeRef hand_node(const std::string& name) { return {NodeRole::Hand, {name}}; }
NodeRef object_node(const std::string& name) { return {NodeRole::ManipulatedObject, {name}}; }
NodeRef unity_node(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  return {NodeRole::Unity, std::move(names)};
}
NodeRef background_node(const std::string& name) {
  return {NodeRole::BackgroundObject, {name}};
}

Edge ho(const NodeRef& hand, const NodeRef& tip, double mi = 1.0) {
  Edge e;
  e.tail = hand;
  e.tip = tip;
  e.relation = Relation::HO;
  e.mi_bits = mi;
  return e;
}

Edge oo(const NodeRef& tail, const NodeRef& tip) {
  Edge e;
  e.tail = tail;
  e.tip = tip;
  e.relation = Relation::OO;
  return e;
}

Trace normalized_scenario(ScenarioKind kind) {
  ScenarioSpec spec;
  spec.kind = kind;
  auto [trace, truth] = generate(spec);
  return normalize(trace, 30.0);
}

}  // namespace

TEST_CASE("single-hand topologies classify as the four shapes") {
  SceneGraph g;
  g.hand = HandSide::Right;
  CHECK(topology(g) == Topology::Empty);

  g.edges = {ho(hand_node("h"), object_node("cup"))};
  CHECK(topology(g) == Topology::A);

  g.edges = {ho(hand_node("h"), unity_node({"a", "b", "c"}))};
  CHECK(topology(g) == Topology::B);

  g.edges = {ho(hand_node("h"), object_node("cup")),
             oo(object_node("cup"), background_node("plate"))};
  CHECK(topology(g) == Topology::C);

  g.edges = {ho(hand_node("h"), unity_node({"a", "b", "c"})),
             oo(unity_node({"a", "b", "c"}), background_node("table"))};
  CHECK(topology(g) == Topology::D);
}

TEST_CASE("two object-object edges are malformed") {
  SceneGraph g;
  g.edges = {ho(hand_node("h"), object_node("cup")),
             oo(object_node("cup"), background_node("plate")),
             oo(object_node("cup"), background_node("table"))};
  CHECK_THROWS_WITH_AS(topology(g), doctest::Contains("MalformedGraph"), Error);
}

TEST_CASE("an object-object edge must start at the manipulated node") {
  SceneGraph g;
  g.edges = {ho(hand_node("h"), object_node("cup")),
             oo(object_node("other"), background_node("plate"))};
  CHECK_THROWS_AS(topology(g), Error);
}

TEST_CASE("a rigidly carried object is a hand-object interaction") {
  RunConfig config;
  const Trace trace = normalized_scenario(ScenarioKind::PickPlaceOneArm);
  const auto decision = detect_ho(trace, "hand_right", "cup1", 3.0, config);
  CHECK(decision.interacting);
  CHECK(decision.mi_bits > config.theta_mi);
}

TEST_CASE("proximity without shared information is not an interaction") {
  // The carrying hand passes within the distance gate of the plate while the
  // plate stays still: the information gate has to reject it.
  RunConfig config;
  const Trace trace = normalized_scenario(ScenarioKind::PickPlaceOneArm);
  const auto decision = detect_ho(trace, "hand_right", "plate1", 3.9, config);
  CHECK_FALSE(decision.interacting);
}

TEST_CASE("stationary hand and object do not interact") {
  RunConfig config;
  const Trace trace = normalized_scenario(ScenarioKind::PickPlaceOneArm);
  const auto decision = detect_ho(trace, "hand_left", "plate1", 3.0, config);
  CHECK_FALSE(decision.interacting);
}

TEST_CASE("objects moving rigidly together form a unity") {
  RunConfig config;
  const Trace trace = normalized_scenario(ScenarioKind::AssembleThenCoTransport);
  // During the co-transport both parts move as one.
  CHECK(detect_unity(trace, {"joint", "profile_a"}, 14.5, config));
  // The scale stays still, so the triple shares nothing.
  CHECK_FALSE(detect_unity(trace, {"joint", "profile_a", "scale"}, 14.5, config));
  // Before the assembly the parts are independent.
  CHECK_FALSE(detect_unity(trace, {"joint", "profile_a"}, 5.0, config));
}

TEST_CASE("a settled placement is an object-object interaction") {
  RunConfig config;
  const Trace trace = normalized_scenario(ScenarioKind::PickPlaceOneArm);
  CHECK(detect_oo(trace, "cup1", "plate1", 6.0, config));
  CHECK_FALSE(detect_oo(trace, "cup1", "plate1", 2.5, config));
}

TEST_CASE("distance alone does not make an object-object interaction") {
  // Manipulated object circling a background object at varying radius keeps
  // the distance entropy high.
  Trace trace;
  trace.rate_hz = 30.0;
  trace.elements = {{"hand_right", ElementKind::HandRight},
                    {"om", ElementKind::Object},
                    {"bkg", ElementKind::Object}};
  for (int k = 0; k < 300; ++k) {
    const double t = k / 30.0;
    const double radius = 0.02 + 0.015 * std::sin(2.0 * t);
    const Eigen::Vector3d om(radius * std::cos(3.0 * t), radius * std::sin(3.0 * t), 0.0);
    trace.streams["om"].push_back(
        {t, make_transform(Eigen::Quaterniond::Identity(), om)});
    trace.streams["hand_right"].push_back(
        {t, make_transform(Eigen::Quaterniond::Identity(),
                           om + Eigen::Vector3d(0.0, 0.0, 0.03))});
    trace.streams["bkg"].push_back(
        {t, make_transform(Eigen::Quaterniond::Identity(), Eigen::Vector3d::Zero())});
  }
  RunConfig config;
  CHECK_FALSE(detect_oo(trace, "om", "bkg", 5.0, config));
  // The stirring grip itself is detected.
  CHECK(detect_ho(trace, "hand_right", "om", 5.0, config).interacting);
}

TEST_CASE("graph construction reproduces the carry and place topologies") {
  RunConfig config;
  const Trace trace = normalized_scenario(ScenarioKind::PickPlaceOneArm);
  const SceneGraph carry = build_graph(trace, HandSide::Right, 3.0, config);
  CHECK(topology(carry) == Topology::A);
  const SceneGraph place = build_graph(trace, HandSide::Right, 6.5, config);
  CHECK(topology(place) == Topology::C);
  const SceneGraph idle = build_graph(trace, HandSide::Left, 3.0, config);
  CHECK(topology(idle) == Topology::Empty);
}

TEST_CASE("edge relative poses reconstruct the recorded pair poses") {
  RunConfig config;
  const Trace trace = normalized_scenario(ScenarioKind::PickPlaceOneArm);
  const GraphSeries series = build_graph_series(trace, config);
  std::size_t checked = 0;
  for (std::size_t k = 0; k < series.right.size(); ++k) {
    const SceneGraph& g = series.right[k];
    if (g.empty()) continue;
    const Edge* e = g.ho_edge();
    const RigidTransform recon = trace.pose_at(e->tip.anchor(), k) * e->rel_pose;
    CHECK(translation_distance(recon, trace.pose_at("hand_right", k)) < 1e-9);
    if (const Edge* o = g.oo_edge()) {
      const RigidTransform r2 = trace.pose_at(o->tip.anchor(), k) * o->rel_pose;
      CHECK(translation_distance(r2, trace.pose_at(o->tail.anchor(), k)) < 1e-9);
    }
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("debounce suppresses single-frame flicker") {
  // Square-wave contamination shorter than the debounce must not flip state.
  RunConfig config;
  ScenarioSpec spec;
  spec.kind = ScenarioKind::PickPlaceOneArm;
  spec.sigma_pos = 0.004;
  spec.seed = 99;
  auto [raw, truth] = generate(spec);
  const Trace trace = normalize(raw, 30.0);
  const GraphSeries series = build_graph_series(trace, config);
  // Measure run lengths of the right hand's active/inactive state.
  int run = 1;
  std::vector<int> runs;
  for (std::size_t k = 1; k < series.right.size(); ++k) {
    if (series.right[k].empty() == series.right[k - 1].empty()) {
      ++run;
    } else {
      runs.push_back(run);
      run = 1;
    }
  }
  runs.push_back(run);
  for (std::size_t i = 1; i + 1 < runs.size(); ++i) {
    CHECK(runs[i] >= config.debounce_frames);
  }
}

TEST_CASE("out-of-grid queries raise WindowOutOfRange") {
  RunConfig config;
  const Trace trace = normalized_scenario(ScenarioKind::PickPlaceOneArm);
  CHECK_THROWS_WITH_AS(detect_ho(trace, "hand_right", "cup1", -5.0, config),
                       doctest::Contains("WindowOutOfRange"), Error);
}
