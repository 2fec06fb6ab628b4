#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bimoplan/config.hpp"
#include "bimoplan/trace.hpp"

namespace bimoplan {

enum class NodeRole { Hand, ManipulatedObject, Unity, BackgroundObject };
enum class Relation { HO, OO };
enum class HandSide { Right, Left };
enum class Topology { Empty, A, B, C, D };

const char* hand_side_name(HandSide side);
const char* topology_name(Topology topology);

struct NodeRef {
  NodeRole role = NodeRole::ManipulatedObject;
  std::vector<std::string> members;  // sorted; exactly 1 unless Unity (>= 2)

  /// Stable node identity used in edge keys and signatures.
  std::string id() const;
  /// Representative member whose pose stands in for the node (smallest name).
  const std::string& anchor() const;
  bool is_unity() const { return role == NodeRole::Unity; }

  bool operator==(const NodeRef&) const = default;
};

struct Edge {
  NodeRef tail;
  NodeRef tip;
  Relation relation = Relation::HO;
  RigidTransform rel_pose;  // tail pose expressed in the tip frame
  double mi_bits = 0.0;     // HO edges only
};

/// Per-frame graph of one hand's interactions. Either empty (inactive hand)
/// or a Hand->manipulated HO edge plus at most one OO edge to a background
/// object (topologies A-D).
struct SceneGraph {
  HandSide hand = HandSide::Right;
  double frame_t = 0.0;
  std::vector<Edge> edges;
  RigidTransform manipulated_pose;  // camera-frame anchor pose; valid when active

  bool empty() const { return edges.empty(); }
  const Edge* ho_edge() const;
  const Edge* oo_edge() const;
  /// Manipulated member set (empty when inactive).
  std::vector<std::string> manipulated() const;
  std::optional<std::string> background() const;
};

/// Pure structural classification; raises MalformedGraph if the graph
/// violates the SceneGraph invariants.
Topology topology(const SceneGraph& graph);

/// Precomputes every windowed metric and debounced interaction state over a
/// normalized trace. All queries are per grid frame; frames whose analysis
/// window does not fit report no interaction.
///
/// Hysteresis: a hand-object interaction turns on after debounce_frames
/// consecutive frames of (adjusted MI > theta_mi and mean distance < d_ho)
/// and turns off after debounce_frames consecutive frames of the distance
/// gate failing. Object-object interaction state similarly turns on from the
/// entropy-drop condition and persists on the distance gate alone.
class InteractionDetector {
 public:
  InteractionDetector(const Trace& trace, const RunConfig& config);

  std::size_t frame_count() const { return frames_; }
  const RunConfig& config() const { return config_; }

  bool ho_state(const std::string& hand, const std::string& object, std::size_t frame) const;
  /// Bias-adjusted MI for the pair at the frame's window (0 when out of range).
  double ho_mi(const std::string& hand, const std::string& object, std::size_t frame) const;
  bool unity_state(const std::vector<std::string>& objects, std::size_t frame) const;
  bool oo_condition(const std::string& a, const std::string& b, std::size_t frame) const;
  bool oo_distance_ok(const std::string& a, const std::string& b, std::size_t frame) const;
  double mean_distance(const std::string& a, const std::string& b, std::size_t frame) const;

 private:
  struct PairData {
    std::vector<double> mi;        // adjusted, frame-indexed
    std::vector<double> dist;      // window-mean distance
    std::vector<double> dist_ent;  // entropy of the smoothed distance signal
    std::vector<char> ho;          // debounced HO state (hand-object pairs)
    std::vector<char> mi_link;     // debounced MI > theta_ci (object pairs)
    std::vector<char> oo;          // debounced OO state (object pairs)
    std::vector<char> dist_oo_ok;  // debounced dist < d_oo
  };

  const PairData& pair(const std::string& a, const std::string& b) const;
  static std::string pair_key(const std::string& a, const std::string& b);

  RunConfig config_;
  std::size_t frames_ = 0;
  std::map<std::string, PairData> pairs_;
  mutable std::map<std::string, std::vector<char>> coinfo_cache_;
  std::map<std::string, std::vector<Eigen::Vector3d>> positions_;
  std::map<std::string, std::vector<char>> activity_;
  double rate_hz_ = 0.0;
};

/// Both hands' graph series, built in one deterministic sequential pass.
struct GraphSeries {
  std::vector<SceneGraph> right;
  std::vector<SceneGraph> left;
  std::vector<double> timestamps;
};

GraphSeries build_graph_series(const Trace& trace, const RunConfig& config);

/// Spec-level single-shot queries. Each builds the detector state for the
/// whole trace and reports the debounced decision at time t; t outside the
/// analyzable grid raises WindowOutOfRange.
struct HoDecision {
  bool interacting = false;
  double mi_bits = 0.0;
};
HoDecision detect_ho(const Trace& trace, const std::string& hand, const std::string& object,
                     double t, const RunConfig& config);
bool detect_unity(const Trace& trace, const std::vector<std::string>& objects, double t,
                  const RunConfig& config);
bool detect_oo(const Trace& trace, const std::string& manipulated, const std::string& background,
               double t, const RunConfig& config);
SceneGraph build_graph(const Trace& trace, HandSide hand, double t, const RunConfig& config);

std::size_t frame_for_time(const Trace& trace, double t);

}  // namespace bimoplan
