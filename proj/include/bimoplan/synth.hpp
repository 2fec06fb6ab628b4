#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bimoplan/segmentation.hpp"

namespace bimoplan {

enum class ScenarioKind {
  PickPlaceOneArm,
  DualUncoordinated,
  CoTransportSync,
  HoldAndPlaceSequential,
  PouringLike,
  AssembleThenCoTransport,
};

const char* scenario_name(ScenarioKind kind);
ScenarioKind scenario_from_name(const std::string& name);
std::vector<ScenarioKind> all_scenarios();

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::PickPlaceOneArm;
  std::uint64_t seed = 7;
  double sigma_pos = 0.0;  // meters, per-axis Gaussian per sample
  double sigma_rot = 0.0;  // radians, per-axis rotation-vector noise
  double rate_hz = 30.0;
  double time_scale = 1.0;  // stretches phase timing, not the wobble rhythm
};

struct ExpectedPrimitive {
  ActionKind action = ActionKind::Move;
  Actor actor = Actor::Right;
  std::string target;   // manipulated node anchor, or background for placements
  std::string subject;  // placement moves only
};

struct CheckedPair {
  std::string subject;
  std::string background;
};

struct LabelSpan {
  double t_start = 0.0;
  double t_end = 0.0;
  std::string label;
};

/// Design-intent ground truth emitted with every synthetic demonstration.
struct GroundTruth {
  std::vector<std::string> unit_labels;  // per interaction unit, in order
  std::vector<std::string> run_labels;   // unit labels collapsed per constant run
  std::vector<ExpectedPrimitive> primitives;
  std::vector<CheckedPair> checked_pairs;
  std::map<std::string, RigidTransform> final_rel;  // "subject|background" at demo end
  std::vector<LabelSpan> label_spans;               // nominal per-frame coordination labels
  std::string scene_json;                           // initial poses for the dry run
  std::string dominant_object;                      // sequential scenarios
  std::string to_json() const;
};

std::pair<Trace, GroundTruth> generate(const ScenarioSpec& spec);

/// Nominal label at time t from the truth's label spans ("idle" outside).
std::string truth_label_at(const GroundTruth& truth, double t);

}  // namespace bimoplan
