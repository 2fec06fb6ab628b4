#include "bimoplan/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "bimoplan/errors.hpp"
#include "bimoplan/infotheory.hpp"

namespace bimoplan {
namespace {

std::vector<const Edge*> union_edges(const BimanualGraph& g) {
  std::vector<const Edge*> out;
  std::set<EdgeKey> seen;
  for (const SceneGraph* side : {&g.right, &g.left}) {
    for (const auto& e : side->edges) {
      EdgeKey key{e.tail.id(), e.tip.id(), e.relation};
      if (seen.insert(key).second) out.push_back(&e);
    }
  }
  return out;
}

bool intersects(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  for (const auto& x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) return true;
  return false;
}

// Continuation-aware match: HO edges continue while the same hand holds an
// overlapping member set; OO edges while an overlapping set rests on the same
// background object.
bool edges_match(const Edge& a, const Edge& b) {
  if (a.relation != b.relation) return false;
  if (a.relation == Relation::HO) {
    return a.tail.id() == b.tail.id() && intersects(a.tip.members, b.tip.members);
  }
  return a.tip.id() == b.tip.id() && intersects(a.tail.members, b.tail.members);
}

// Coarse key used for unit splitting; dominance is resolved per unit later.
std::string coarse_mode_key(const CoordinationMode& mode) {
  switch (mode.kind) {
    case CoordinationMode::Kind::OneArm:
      return mode.active == HandSide::Right ? "one_arm_r" : "one_arm_l";
    case CoordinationMode::Kind::Uncoordinated: return "uncoordinated";
    case CoordinationMode::Kind::Synchronous: return "synchronous";
    case CoordinationMode::Kind::Sequential: return "sequential";
  }
  return "";
}

std::optional<HandSide> ho_edge_side(const BimanualGraph& g, const Edge& e) {
  if (const Edge* r = g.right.ho_edge(); r && r->tail.id() == e.tail.id()) return HandSide::Right;
  if (const Edge* l = g.left.ho_edge(); l && l->tail.id() == e.tail.id()) return HandSide::Left;
  return std::nullopt;
}

int actor_rank(Actor a) { return a == Actor::Left ? 1 : 0; }

}  // namespace

const char* action_kind_name(ActionKind kind) {
  switch (kind) {
    case ActionKind::Move: return "move";
    case ActionKind::Grasp: return "grasp";
    case ActionKind::Release: return "release";
    case ActionKind::KeepGrasp: return "keep_grasp";
    case ActionKind::MotionPrimitivePlaceholder: return "motion_primitive";
  }
  return "move";
}

const char* actor_name(Actor actor) {
  switch (actor) {
    case Actor::Right: return "right";
    case Actor::Left: return "left";
    case Actor::Both: return "both";
  }
  return "right";
}

std::string EdgeKey::str() const {
  return tail + (relation == Relation::HO ? " -HO-> " : " -OO-> ") + tip;
}

std::vector<EdgeKey> graph_signature(const BimanualGraph& g) {
  std::vector<EdgeKey> keys;
  for (const Edge* e : union_edges(g)) keys.push_back({e->tail.id(), e->tip.id(), e->relation});
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::vector<InteractionUnit> segment(const std::vector<BimanualGraph>& series,
                                     const RunConfig& config) {
  std::vector<InteractionUnit> units;
  std::optional<std::size_t> open;  // index of the unit being extended

  for (std::size_t k = 0; k < series.size(); ++k) {
    const BimanualGraph& g = series[k];
    const auto mode = g.mode ? g.mode : classify(g, config);
    if (!mode) {
      open.reset();  // idle frames delimit units
      continue;
    }
    auto signature = graph_signature(g);
    const std::string key = coarse_mode_key(*mode);
    if (open && units[*open].signature == signature &&
        coarse_mode_key(units[*open].mode) == key) {
      units[*open].end_frame = k;
      units[*open].t_end = g.frame_t;
      continue;
    }
    InteractionUnit unit;
    unit.index = units.size();
    unit.start_frame = unit.end_frame = k;
    unit.t_start = unit.t_end = g.frame_t;
    unit.mode = *mode;
    unit.signature = std::move(signature);
    units.push_back(std::move(unit));
    open = units.size() - 1;
  }
  return units;
}

void assign_representatives(std::vector<InteractionUnit>& units,
                            const std::vector<BimanualGraph>& series, const RunConfig& config) {
  for (auto& unit : units) {
    BimanualGraph repr = series[unit.start_frame];
    const BimanualGraph& last = series[unit.end_frame];

    for (SceneGraph BimanualGraph::* side : {&BimanualGraph::right, &BimanualGraph::left}) {
      SceneGraph& graph = repr.*side;
      const SceneGraph& final_graph = last.*side;
      for (auto& e : graph.edges) {
        if (e.relation == Relation::OO) {
          // Final configuration of the unit.
          for (const auto& fe : final_graph.edges) {
            if (fe.relation == Relation::OO && fe.tail.id() == e.tail.id() &&
                fe.tip.id() == e.tip.id()) {
              e.rel_pose = fe.rel_pose;
            }
          }
        } else {
          double sum = 0.0;
          std::size_t n = 0;
          for (std::size_t k = unit.start_frame; k <= unit.end_frame; ++k) {
            const SceneGraph& frame_graph = series[k].*side;
            for (const auto& fe : frame_graph.edges) {
              if (fe.relation == Relation::HO && fe.tail.id() == e.tail.id() &&
                  fe.tip.id() == e.tip.id()) {
                sum += fe.mi_bits;
                ++n;
              }
            }
          }
          if (n > 0) e.mi_bits = sum / static_cast<double>(n);
        }
      }
    }
    const auto mode = classify(repr, config);
    if (mode) unit.mode = *mode;
    repr.mode = mode;
    unit.representative = std::move(repr);
  }
}

GraphDiff diff(const BimanualGraph* next, const BimanualGraph* prev) {
  GraphDiff d;
  std::vector<const Edge*> next_edges, prev_edges;
  if (next) next_edges = union_edges(*next);
  if (prev) prev_edges = union_edges(*prev);

  for (const Edge* e : next_edges) {
    bool matched = false;
    for (const Edge* p : prev_edges) matched = matched || edges_match(*e, *p);
    if (!matched) d.added.push_back(*e);
  }
  for (const Edge* p : prev_edges) {
    bool matched = false;
    for (const Edge* e : next_edges) matched = matched || edges_match(*p, *e);
    if (!matched) d.removed.push_back(*p);
  }
  return d;
}

SegmentationResult extract_primitives(const std::vector<InteractionUnit>& units,
                                      const std::vector<BimanualGraph>& series,
                                      const RunConfig& config) {
  SegmentationResult result;
  result.units = units;

  auto side_actor = [](HandSide side) {
    return side == HandSide::Right ? Actor::Right : Actor::Left;
  };

  const std::size_t m = units.size();
  for (std::size_t step = 0; step <= m; ++step) {
    const InteractionUnit* prev = step > 0 ? &units[step - 1] : nullptr;
    const InteractionUnit* next = step < m ? &units[step] : nullptr;
    GraphDiff d = diff(next ? &next->representative : nullptr,
                       prev ? &prev->representative : nullptr);

    // Ended hand-object interactions: release, attributed to the exited unit.
    std::vector<Primitive> releases;
    for (const auto& e : d.removed) {
      if (e.relation != Relation::HO) continue;  // the end of OO is not treated
      const auto side = ho_edge_side(prev->representative, e);
      Primitive psi;
      psi.action = ActionKind::Release;
      psi.actor = side ? side_actor(*side) : Actor::Right;
      psi.mode = prev->mode;
      psi.unit_index = prev->index;
      psi.target = e.tip.anchor();
      psi.target_members = e.tip.members;
      releases.push_back(std::move(psi));
    }
    std::stable_sort(releases.begin(), releases.end(), [](const auto& a, const auto& b) {
      return actor_rank(a.actor) < actor_rank(b.actor);
    });
    for (auto& r : releases) result.primitives.push_back(std::move(r));

    if (!next) continue;
    std::vector<Actor> acted;  // actors with work in this unit

    // New hand-object interactions: approach move plus grasp.
    std::vector<const Edge*> new_ho;
    for (const auto& e : d.added)
      if (e.relation == Relation::HO) new_ho.push_back(&e);
    std::stable_sort(new_ho.begin(), new_ho.end(), [&](const Edge* a, const Edge* b) {
      const auto sa = ho_edge_side(next->representative, *a);
      const auto sb = ho_edge_side(next->representative, *b);
      return (sa == HandSide::Right ? 0 : 1) < (sb == HandSide::Right ? 0 : 1);
    });
    for (const Edge* e : new_ho) {
      const auto side = ho_edge_side(next->representative, *e);
      const Actor actor = side ? side_actor(*side) : Actor::Right;
      Primitive move;
      move.action = ActionKind::Move;
      move.actor = actor;
      move.mode = next->mode;
      move.unit_index = next->index;
      move.target = e->tip.anchor();
      move.target_members = e->tip.members;
      move.transform = e->rel_pose;
      result.primitives.push_back(move);

      Primitive grasp;
      grasp.action = ActionKind::Grasp;
      grasp.actor = actor;
      grasp.mode = next->mode;
      grasp.unit_index = next->index;
      grasp.target = e->tip.anchor();
      grasp.target_members = e->tip.members;
      result.primitives.push_back(grasp);
      acted.push_back(actor);
    }

    // New object-object interactions: placement move for the holding hand(s).
    std::vector<std::pair<int, Primitive>> oo_moves;
    for (const auto& e : d.added) {
      if (e.relation != Relation::OO) continue;
      const bool right_holds = intersects(next->representative.right.manipulated(), e.tail.members);
      const bool left_holds = intersects(next->representative.left.manipulated(), e.tail.members);
      if (!right_holds && !left_holds) {
        raise(ErrorCode::OrphanOO,
              "object-object interaction " + e.tail.id() + " -> " + e.tip.id() +
                  " appeared while no hand holds the manipulated node");
      }
      Primitive move;
      move.action = ActionKind::Move;
      move.mode = next->mode;
      move.unit_index = next->index;
      move.target = e.tip.anchor();
      move.target_members = e.tip.members;
      move.subject = e.tail.anchor();
      move.subject_members = e.tail.members;
      move.transform = e.rel_pose;
      if (right_holds && left_holds) {
        move.actor = Actor::Both;
      } else {
        move.actor = right_holds ? Actor::Right : Actor::Left;
      }
      oo_moves.emplace_back(actor_rank(move.actor), std::move(move));
    }
    std::stable_sort(oo_moves.begin(), oo_moves.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [rank, move] : oo_moves) {
      acted.push_back(move.actor);
      result.primitives.push_back(std::move(move));
    }

    // In-place manipulation heuristic: a sustained, information-rich grip
    // that forms no OO and barely displaces the object stands in for a motion
    // pattern that has to be learned separately.
    const double frame_dt =
        series.size() > 1 ? series[1].frame_t - series[0].frame_t : 0.0;
    const double duration = next->t_end - next->t_start + frame_dt;
    std::vector<Primitive> placeholders;
    for (HandSide side : {HandSide::Right, HandSide::Left}) {
      const SceneGraph& graph =
          side == HandSide::Right ? next->representative.right : next->representative.left;
      const Edge* ho = graph.ho_edge();
      if (!ho) continue;
      if (duration < config.window_s) continue;
      // Active manipulation check on the unit's tail: settled grips decay
      // toward zero MI, a motion pattern keeps it high to the end.
      const std::size_t tail_frames = frame_dt > 0.0
          ? static_cast<std::size_t>(std::lround(config.window_s / frame_dt))
          : 1;
      const std::size_t tail_begin = next->end_frame >= next->start_frame + tail_frames
          ? next->end_frame - tail_frames + 1
          : next->start_frame;
      double tail_mi = 0.0;
      std::size_t tail_n = 0;
      for (std::size_t k = tail_begin; k <= next->end_frame; ++k) {
        const SceneGraph& fg = side == HandSide::Right ? series[k].right : series[k].left;
        if (const Edge* fe = fg.ho_edge(); fe && fe->tail.id() == ho->tail.id()) {
          tail_mi += fe->mi_bits;
          ++tail_n;
        }
      }
      if (tail_n == 0 || tail_mi / static_cast<double>(tail_n) <= config.theta_mi) continue;
      bool has_oo = graph.oo_edge() != nullptr;
      const std::string manipulated_id = ho->tip.id();
      for (const auto& key : next->signature) {
        if (key.relation == Relation::OO && key.tail == manipulated_id) has_oo = true;
      }
      if (has_oo) continue;
      const SceneGraph& first_graph =
          side == HandSide::Right ? series[next->start_frame].right : series[next->start_frame].left;
      const SceneGraph& last_graph =
          side == HandSide::Right ? series[next->end_frame].right : series[next->end_frame].left;
      if (first_graph.empty() || last_graph.empty()) continue;
      const double net_displacement =
          translation_distance(first_graph.manipulated_pose, last_graph.manipulated_pose);
      if (net_displacement >= config.d_oo) continue;
      Primitive psi;
      psi.action = ActionKind::MotionPrimitivePlaceholder;
      psi.actor = side_actor(side);
      psi.mode = next->mode;
      psi.unit_index = next->index;
      psi.target = ho->tip.anchor();
      psi.target_members = ho->tip.members;
      placeholders.push_back(psi);
      acted.push_back(psi.actor);
    }
    for (auto& p : placeholders) result.primitives.push_back(std::move(p));

    // Hands that hold through the unit without contributing an action keep
    // their grip explicitly.
    std::vector<Primitive> fillers;
    for (HandSide side : {HandSide::Right, HandSide::Left}) {
      const SceneGraph& graph =
          side == HandSide::Right ? next->representative.right : next->representative.left;
      const Edge* ho = graph.ho_edge();
      if (!ho) continue;
      const Actor actor = side_actor(side);
      bool has_action = false;
      for (Actor a : acted) has_action = has_action || a == actor || a == Actor::Both;
      if (has_action) continue;
      Primitive keep;
      keep.action = ActionKind::KeepGrasp;
      keep.actor = actor;
      keep.mode = next->mode;
      keep.unit_index = next->index;
      keep.target = ho->tip.anchor();
      keep.target_members = ho->tip.members;
      fillers.push_back(std::move(keep));
    }
    for (auto& f : fillers) result.primitives.push_back(std::move(f));
  }

  // A trace that stops mid-hold leaves its final grips flagged.
  if (!units.empty() && units.back().end_frame + 1 >= series.size()) {
    const BimanualGraph& last = units.back().representative;
    for (const SceneGraph* side : {&last.right, &last.left}) {
      if (const Edge* ho = side->ho_edge()) result.unfinished_grasps.push_back(ho->tip.id());
    }
  }
  return result;
}

SegmentationResult segment_and_extract(const std::vector<BimanualGraph>& series,
                                       const RunConfig& config) {
  auto units = segment(series, config);
  assign_representatives(units, series, config);
  return extract_primitives(units, series, config);
}

}  // namespace bimoplan
