#pragma once

#include <optional>
#include <string>

#include "bimoplan/scene_graph.hpp"

namespace bimoplan {

struct CoordinationMode {
  enum class Kind { OneArm, Uncoordinated, Synchronous, Sequential };
  Kind kind = Kind::OneArm;
  HandSide active = HandSide::Right;          // OneArm
  HandSide dominant_hand = HandSide::Right;   // Sequential
  std::string dominant_object;                // o_dom
  std::string reference_object;               // o_ref

  bool operator==(const CoordinationMode&) const = default;
};

std::string coordination_label(const std::optional<CoordinationMode>& mode);

/// Bimanual graph: the union of the two per-hand graphs at one frame, plus
/// the coordination mode once classified.
struct BimanualGraph {
  SceneGraph right;
  SceneGraph left;
  double frame_t = 0.0;
  std::optional<CoordinationMode> mode;

  bool empty() const { return right.empty() && left.empty(); }
};

/// Diagnostic label of the bimanual topology row (alpha/beta/gamma/delta_eta,
/// plus one_hand and idle for the degenerate cases).
std::string bimanual_topology_label(const BimanualGraph& g);

BimanualGraph merge(const SceneGraph& right, const SceneGraph& left);

/// Coordination mode per the bimanual topology table:
///   one hand graph empty                         -> OneArm
///   no shared nodes / only a shared background   -> Uncoordinated
///   shared manipulated object or unity overlap   -> Synchronous
///   one hand's manipulated is the other's o_bkg  -> Sequential
/// Sequential dominance is resolved with resolve_dominant. Returns nullopt
/// for a fully idle frame.
std::optional<CoordinationMode> classify(const BimanualGraph& g, const RunConfig& config);

struct DominantAssignment {
  HandSide dominant_hand = HandSide::Right;
  std::string dominant_object;
  std::string reference_object;
};

/// Compares the MI stored on the two HO edges; the higher-MI hand manipulates
/// the dominant object. Ties (|delta| < mi_tie_eps) break structurally: the
/// object serving as the other graph's background becomes the reference.
DominantAssignment resolve_dominant(const BimanualGraph& g, const RunConfig& config);

}  // namespace bimoplan
