#include "bimoplan/scene_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bimoplan/errors.hpp"
#include "bimoplan/infotheory.hpp"

namespace bimoplan {
namespace {

// Applies hysteresis: flips only after `debounce` consecutive frames of the
// opposite decision. Separate on/off conditions (off defaults to !on).
std::vector<char> debounce_latch(const std::vector<char>& on_raw,
                                 const std::vector<char>& off_raw, int debounce) {
  std::vector<char> state(on_raw.size(), 0);
  bool current = false;
  int counter = 0;
  for (std::size_t k = 0; k < on_raw.size(); ++k) {
    if (!current) {
      counter = on_raw[k] ? counter + 1 : 0;
      if (counter >= debounce) {
        current = true;
        counter = 0;
      }
    } else {
      counter = off_raw[k] ? counter + 1 : 0;
      if (counter >= debounce) {
        current = false;
        counter = 0;
      }
    }
    state[k] = current ? 1 : 0;
  }
  return state;
}

// Onset via a saturating evidence counter (a dropped frame decays instead of
// resetting), turn-off with plain consecutive debounce. Identical to the
// plain latch on clean series; noisy-but-sustained evidence still fires.
std::vector<char> leaky_latch(const std::vector<char>& on_raw,
                              const std::vector<char>& off_raw, int on_sustain,
                              int off_debounce) {
  std::vector<char> state(on_raw.size(), 0);
  bool current = false;
  int evidence = 0;
  int off_counter = 0;
  for (std::size_t k = 0; k < on_raw.size(); ++k) {
    if (!current) {
      evidence = on_raw[k] ? std::min(evidence + 1, on_sustain) : std::max(evidence - 1, 0);
      if (evidence >= on_sustain) {
        current = true;
        evidence = 0;
        off_counter = 0;
      }
    } else {
      off_counter = off_raw[k] ? off_counter + 1 : 0;
      if (off_counter >= off_debounce) {
        current = false;
        off_counter = 0;
      }
    }
    state[k] = current ? 1 : 0;
  }
  return state;
}

std::string join_members(const std::vector<std::string>& members, char sep) {
  std::string out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) out += sep;
    out += members[i];
  }
  return out;
}

}  // namespace

const char* hand_side_name(HandSide side) {
  return side == HandSide::Right ? "right" : "left";
}

const char* topology_name(Topology topology) {
  switch (topology) {
    case Topology::Empty: return "empty";
    case Topology::A: return "A";
    case Topology::B: return "B";
    case Topology::C: return "C";
    case Topology::D: return "D";
  }
  return "empty";
}

std::string NodeRef::id() const {
  if (role == NodeRole::Unity) return "unity(" + join_members(members, '+') + ")";
  return members.empty() ? std::string() : members.front();
}

const std::string& NodeRef::anchor() const {
  if (members.empty()) raise(ErrorCode::MalformedGraph, "node without members");
  return members.front();
}

const Edge* SceneGraph::ho_edge() const {
  for (const auto& e : edges)
    if (e.relation == Relation::HO) return &e;
  return nullptr;
}

const Edge* SceneGraph::oo_edge() const {
  for (const auto& e : edges)
    if (e.relation == Relation::OO) return &e;
  return nullptr;
}

std::vector<std::string> SceneGraph::manipulated() const {
  const Edge* ho = ho_edge();
  return ho ? ho->tip.members : std::vector<std::string>{};
}

std::optional<std::string> SceneGraph::background() const {
  const Edge* oo = oo_edge();
  if (!oo) return std::nullopt;
  return oo->tip.anchor();
}

Topology topology(const SceneGraph& graph) {
  if (graph.edges.empty()) return Topology::Empty;
  int ho = 0, oo = 0;
  const Edge* ho_edge = nullptr;
  for (const auto& e : graph.edges) {
    if (e.relation == Relation::HO) {
      ++ho;
      ho_edge = &e;
      if (e.tail.role != NodeRole::Hand) {
        raise(ErrorCode::MalformedGraph, "HO edge must originate at the hand");
      }
      if (e.tip.role == NodeRole::Unity && e.tip.members.size() < 2) {
        raise(ErrorCode::MalformedGraph, "unity with fewer than 2 objects");
      }
    } else {
      ++oo;
    }
  }
  if (ho != 1) raise(ErrorCode::MalformedGraph, "expected exactly one HO edge");
  if (oo > 1) raise(ErrorCode::MalformedGraph, "more than one OO edge");
  if (oo == 1) {
    const Edge* oo_edge = graph.oo_edge();
    if (!(oo_edge->tail == ho_edge->tip)) {
      raise(ErrorCode::MalformedGraph, "OO edge must start at the manipulated node");
    }
  }
  const bool unity = ho_edge->tip.role == NodeRole::Unity;
  if (oo == 0) return unity ? Topology::B : Topology::A;
  return unity ? Topology::D : Topology::C;
}

std::string InteractionDetector::pair_key(const std::string& a, const std::string& b) {
  return a < b ? a + "\x1f" + b : b + "\x1f" + a;
}

const InteractionDetector::PairData& InteractionDetector::pair(const std::string& a,
                                                               const std::string& b) const {
  auto it = pairs_.find(pair_key(a, b));
  if (it == pairs_.end()) raise(ErrorCode::UnknownElement, a + "/" + b);
  return it->second;
}

InteractionDetector::InteractionDetector(const Trace& trace, const RunConfig& config)
    : config_(config) {
  if (!trace.normalized()) raise(ErrorCode::InvalidArgument, "trace must be normalized");
  frames_ = trace.frame_count();
  rate_hz_ = trace.rate_hz;
  const std::size_t nw = window_samples(config.window_s, trace.rate_hz);
  if (frames_ < 2 * nw) {
    raise(ErrorCode::WindowOutOfRange,
          "stream overlap shorter than the detector windows (" +
              std::to_string(frames_) + " frames, window " + std::to_string(nw) + ")");
  }
  const std::size_t center_off = (nw - 1) / 2;

  for (const auto& e : trace.elements) {
    std::vector<Eigen::Vector3d> p(frames_);
    for (std::size_t k = 0; k < frames_; ++k) p[k] = trace.position_at(e.name, k);
    positions_.emplace(e.name, std::move(p));
  }

  // Activity gate per element: displacement of the window-half means. Sensor
  // noise is rough but stays in place; manipulation displaces. Keeps static
  // pairs from accumulating spurious MI exceedances.
  for (const auto& e : trace.elements) {
    const auto& p = positions_.at(e.name);
    std::vector<char> active(frames_, 0);
    const std::size_t half = nw / 2;
    for (std::size_t begin = 0; begin + nw <= frames_; ++begin) {
      Eigen::Vector3d first = Eigen::Vector3d::Zero(), second = Eigen::Vector3d::Zero();
      for (std::size_t i = 0; i < half; ++i) first += p[begin + i];
      for (std::size_t i = half; i < nw; ++i) second += p[begin + i];
      first /= static_cast<double>(half);
      second /= static_cast<double>(nw - half);
      active[begin + center_off] = (second - first).norm() >= config.activity_eps;
    }
    activity_.emplace(e.name, std::move(active));
  }

  const auto params = config.series_params();
  std::vector<std::string> hands;
  for (auto kind : {ElementKind::HandRight, ElementKind::HandLeft}) {
    if (auto h = trace.hand(kind)) hands.push_back(*h);
  }
  const auto objects = trace.object_names();

  auto frame_aligned = [&](const MetricSeries& s, double fill) {
    std::vector<double> out(frames_, fill);
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const auto k = static_cast<std::size_t>(
          std::lround((s.timestamps[i] - trace.grid().front()) * trace.rate_hz));
      if (k < frames_) out[k] = s.values[i];
    }
    return out;
  };

  const auto& activity = activity_;
  auto both_active = [&](const std::string& a, const std::string& b, std::size_t k) {
    return activity.at(a)[k] && activity.at(b)[k];
  };
  const int unity_debounce =
      std::max<int>(config.debounce_frames, static_cast<int>(nw / 2));

  auto build_pair = [&](const std::string& a, const std::string& b, bool hand_object) {
    PairData data;
    data.dist = frame_aligned(metric_series(trace, {a, b}, MetricKind::Distance, params),
                              std::numeric_limits<double>::infinity());
    data.dist_ent = frame_aligned(
        metric_series(trace, {a, b}, MetricKind::DistanceEntropy, params),
        std::numeric_limits<double>::infinity());

    // Adjusted MI per frame over the same window alignment.
    data.mi.assign(frames_, 0.0);
    const auto& pa = positions_.at(a);
    const auto& pb = positions_.at(b);
    for (std::size_t begin = 0; begin + nw <= frames_; ++begin) {
      const std::size_t k = begin + center_off;
      data.mi[k] = pair_mi_3d_adjusted(
          std::span<const Eigen::Vector3d>(pa.data() + begin, nw),
          std::span<const Eigen::Vector3d>(pb.data() + begin, nw), params.bins,
          params.aggregate);
    }

    std::vector<char> mi_ok(frames_, 0), dist_ho_ok(frames_, 0), dist_oo_ok(frames_, 0),
        ent_ok(frames_, 0), ci_ok(frames_, 0);
    for (std::size_t k = 0; k < frames_; ++k) {
      mi_ok[k] = data.mi[k] > config.theta_mi && both_active(a, b, k);
      ci_ok[k] = data.mi[k] > config.theta_ci && both_active(a, b, k);
      dist_ho_ok[k] = data.dist[k] < config.d_ho;
      dist_oo_ok[k] = data.dist[k] < config.d_oo;
      ent_ok[k] = data.dist_ent[k] < config.theta_h;
    }

    if (hand_object) {
      std::vector<char> on(frames_), off(frames_);
      for (std::size_t k = 0; k < frames_; ++k) {
        on[k] = mi_ok[k] && dist_ho_ok[k];
        off[k] = !dist_ho_ok[k];  // established grips persist on proximity
      }
      data.ho = debounce_latch(on, off, config.debounce_frames);
    } else {
      std::vector<char> not_ci(frames_);
      for (std::size_t k = 0; k < frames_; ++k) not_ci[k] = !ci_ok[k];
      data.mi_link = leaky_latch(ci_ok, not_ci, unity_debounce, config.debounce_frames);

      std::vector<char> oo_on(frames_), oo_off(frames_);
      for (std::size_t k = 0; k < frames_; ++k) {
        oo_on[k] = ent_ok[k] && dist_oo_ok[k];
        oo_off[k] = !dist_oo_ok[k];  // settled contacts persist on proximity
      }
      data.oo = debounce_latch(oo_on, oo_off, config.debounce_frames);
      std::vector<char> not_dist(frames_);
      for (std::size_t k = 0; k < frames_; ++k) not_dist[k] = !dist_oo_ok[k];
      data.dist_oo_ok = debounce_latch(dist_oo_ok, not_dist, config.debounce_frames);
    }
    pairs_.emplace(pair_key(a, b), std::move(data));
  };

  for (const auto& h : hands) {
    for (const auto& o : objects) build_pair(h, o, true);
  }
  for (std::size_t i = 0; i < objects.size(); ++i) {
    for (std::size_t j = i + 1; j < objects.size(); ++j) {
      build_pair(objects[i], objects[j], false);
    }
  }
}

bool InteractionDetector::ho_state(const std::string& hand, const std::string& object,
                                   std::size_t frame) const {
  const auto& d = pair(hand, object);
  return frame < d.ho.size() && d.ho[frame];
}

double InteractionDetector::ho_mi(const std::string& hand, const std::string& object,
                                  std::size_t frame) const {
  const auto& d = pair(hand, object);
  return frame < d.mi.size() ? d.mi[frame] : 0.0;
}

bool InteractionDetector::oo_condition(const std::string& a, const std::string& b,
                                       std::size_t frame) const {
  const auto& d = pair(a, b);
  return frame < d.oo.size() && d.oo[frame];
}

bool InteractionDetector::oo_distance_ok(const std::string& a, const std::string& b,
                                         std::size_t frame) const {
  const auto& d = pair(a, b);
  return frame < d.dist_oo_ok.size() && d.dist_oo_ok[frame];
}

double InteractionDetector::mean_distance(const std::string& a, const std::string& b,
                                          std::size_t frame) const {
  const auto& d = pair(a, b);
  return frame < d.dist.size() ? d.dist[frame] : std::numeric_limits<double>::infinity();
}

bool InteractionDetector::unity_state(const std::vector<std::string>& objects,
                                      std::size_t frame) const {
  if (objects.size() < 2) raise(ErrorCode::InvalidArgument, "unity needs >= 2 objects");
  if (frame >= frames_) return false;
  std::vector<std::string> sorted = objects;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() == 2) {
    const auto& d = pair(sorted[0], sorted[1]);
    return d.mi_link[frame];
  }

  const std::string key = join_members(sorted, '\x1f');
  auto it = coinfo_cache_.find(key);
  if (it == coinfo_cache_.end()) {
    const std::size_t nw = window_samples(config_.window_s, rate_hz_);
    const std::size_t center_off = (nw - 1) / 2;
    const int unity_debounce =
        std::max<int>(config_.debounce_frames, static_cast<int>(nw / 2));
    std::vector<char> raw(frames_, 0), off(frames_, 0);
    std::vector<const std::vector<Eigen::Vector3d>*> tracks;
    for (const auto& name : sorted) {
      auto pit = positions_.find(name);
      if (pit == positions_.end()) raise(ErrorCode::UnknownElement, name);
      tracks.push_back(&pit->second);
    }
    for (std::size_t begin = 0; begin + nw <= frames_; ++begin) {
      const std::size_t k = begin + center_off;
      bool all_active = true;
      for (const auto& name : sorted) all_active = all_active && activity_.at(name)[k];
      if (!all_active) continue;
      std::vector<std::span<const Eigen::Vector3d>> windows;
      windows.reserve(tracks.size());
      for (const auto* t : tracks) {
        windows.emplace_back(t->data() + begin, nw);
      }
      const double ci =
          co_information_adjusted(windows, config_.bins, config_.aggregate);
      raw[k] = ci > config_.theta_ci;
    }
    for (std::size_t k = 0; k < frames_; ++k) off[k] = !raw[k];
    it = coinfo_cache_
             .emplace(key, leaky_latch(raw, off, unity_debounce, config_.debounce_frames))
             .first;
  }
  return it->second[frame];
}

namespace {

// Per-hand episode state for the sequential construction pass.
struct HandEpisode {
  bool active = false;
  std::vector<std::string> members;  // sorted
  std::optional<std::string> oo_target;
};

struct SeriesBuilder {
  const Trace& trace;
  const RunConfig& config;
  const InteractionDetector& detector;
  std::vector<std::string> objects;

  std::vector<std::string> candidates(const std::string& hand, std::size_t k,
                                      const std::vector<std::string>& exclude) const {
    std::vector<std::string> out;
    for (const auto& o : objects) {
      if (std::find(exclude.begin(), exclude.end(), o) != exclude.end()) continue;
      if (detector.ho_state(hand, o, k)) out.push_back(o);
    }
    return out;
  }

  void update_members(HandEpisode& ep, const std::string& hand, std::size_t k) const {
    if (!ep.active) {
      auto c = candidates(hand, k, {});
      if (c.empty()) return;
      if (c.size() == 1) {
        ep.members = c;
      } else if (detector.unity_state(c, k)) {
        ep.members = c;
      } else {
        // Not a unity: the highest-MI object wins.
        std::string best = c.front();
        for (const auto& o : c) {
          if (detector.ho_mi(hand, o, k) > detector.ho_mi(hand, best, k)) best = o;
        }
        ep.members = {best};
      }
      std::sort(ep.members.begin(), ep.members.end());
      ep.active = true;
      ep.oo_target.reset();
      return;
    }

    // Episode ends when every member lost its hand-object interaction.
    bool any = false;
    for (const auto& m : ep.members) any = any || detector.ho_state(hand, m, k);
    if (!any) {
      ep = HandEpisode{};
      return;
    }

    // Membership grows when new candidates form a unity with the held set.
    auto extra = candidates(hand, k, ep.members);
    if (!extra.empty()) {
      std::vector<std::string> grown = ep.members;
      grown.insert(grown.end(), extra.begin(), extra.end());
      std::sort(grown.begin(), grown.end());
      if (detector.unity_state(grown, k)) {
        ep.members = std::move(grown);
        if (ep.oo_target &&
            std::find(ep.members.begin(), ep.members.end(), *ep.oo_target) != ep.members.end()) {
          ep.oo_target.reset();  // the old background joined the unity
        }
      }
    }
  }

  void update_oo(HandEpisode& ep, const HandEpisode& other, std::size_t k) const {
    if (!ep.active) return;
    const std::string& anchor = ep.members.front();
    if (ep.oo_target) {
      const bool target_manipulated =
          std::find(ep.members.begin(), ep.members.end(), *ep.oo_target) != ep.members.end();
      if (target_manipulated || !detector.oo_distance_ok(anchor, *ep.oo_target, k)) {
        ep.oo_target.reset();
      } else {
        return;  // current target is sticky while the contact distance holds
      }
    }
    std::optional<std::string> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& o : objects) {
      if (std::find(ep.members.begin(), ep.members.end(), o) != ep.members.end()) continue;
      if (config.oo_candidates == OoCandidateScope::Unmanipulated && other.active &&
          std::find(other.members.begin(), other.members.end(), o) != other.members.end()) {
        continue;
      }
      if (!detector.oo_condition(anchor, o, k)) continue;
      const double d = detector.mean_distance(anchor, o, k);
      if (d < best_dist) {
        best_dist = d;
        best = o;
      }
    }
    ep.oo_target = best;
  }

  SceneGraph make_graph(const HandEpisode& ep, HandSide side, const std::string& hand,
                        std::size_t k) const {
    SceneGraph g;
    g.hand = side;
    g.frame_t = trace.grid()[k];
    if (!ep.active) return g;

    NodeRef hand_node{NodeRole::Hand, {hand}};
    NodeRef manipulated{ep.members.size() > 1 ? NodeRole::Unity : NodeRole::ManipulatedObject,
                        ep.members};
    g.manipulated_pose = trace.pose_at(manipulated.anchor(), k);
    double mi = 0.0;
    for (const auto& m : ep.members) mi = std::max(mi, detector.ho_mi(hand, m, k));

    Edge ho;
    ho.tail = hand_node;
    ho.tip = manipulated;
    ho.relation = Relation::HO;
    ho.mi_bits = mi;
    ho.rel_pose = relative_pose(trace.pose_at(hand, k), trace.pose_at(manipulated.anchor(), k));
    g.edges.push_back(std::move(ho));

    if (ep.oo_target) {
      Edge oo;
      oo.tail = manipulated;
      oo.tip = NodeRef{NodeRole::BackgroundObject, {*ep.oo_target}};
      oo.relation = Relation::OO;
      oo.rel_pose =
          relative_pose(trace.pose_at(manipulated.anchor(), k), trace.pose_at(*ep.oo_target, k));
      g.edges.push_back(std::move(oo));
    }
    return g;
  }
};

}  // namespace

GraphSeries build_graph_series(const Trace& trace, const RunConfig& config) {
  InteractionDetector detector(trace, config);
  SeriesBuilder builder{trace, config, detector, trace.object_names()};

  const auto right = trace.hand(ElementKind::HandRight);
  const auto left = trace.hand(ElementKind::HandLeft);
  const std::size_t frames = trace.frame_count();

  GraphSeries series;
  series.timestamps = trace.grid();
  series.right.reserve(frames);
  series.left.reserve(frames);

  HandEpisode ep_r, ep_l;
  for (std::size_t k = 0; k < frames; ++k) {
    if (right) builder.update_members(ep_r, *right, k);
    if (left) builder.update_members(ep_l, *left, k);
    if (right) builder.update_oo(ep_r, ep_l, k);
    if (left) builder.update_oo(ep_l, ep_r, k);
    SceneGraph gr, gl;
    if (right) {
      gr = builder.make_graph(ep_r, HandSide::Right, *right, k);
    } else {
      gr.hand = HandSide::Right;
      gr.frame_t = trace.grid()[k];
    }
    if (left) {
      gl = builder.make_graph(ep_l, HandSide::Left, *left, k);
    } else {
      gl.hand = HandSide::Left;
      gl.frame_t = trace.grid()[k];
    }
    series.right.push_back(std::move(gr));
    series.left.push_back(std::move(gl));
  }
  return series;
}

std::size_t frame_for_time(const Trace& trace, double t) {
  if (!trace.normalized() || trace.frame_count() == 0) {
    raise(ErrorCode::InvalidArgument, "trace must be normalized");
  }
  const auto& grid = trace.grid();
  const double k = (t - grid.front()) * trace.rate_hz;
  const auto frame = static_cast<long>(std::lround(k));
  if (frame < 0 || frame >= static_cast<long>(grid.size())) {
    raise(ErrorCode::WindowOutOfRange, "t=" + std::to_string(t) + " outside the trace grid");
  }
  return static_cast<std::size_t>(frame);
}

HoDecision detect_ho(const Trace& trace, const std::string& hand, const std::string& object,
                     double t, const RunConfig& config) {
  InteractionDetector detector(trace, config);
  const std::size_t k = frame_for_time(trace, t);
  return HoDecision{detector.ho_state(hand, object, k), detector.ho_mi(hand, object, k)};
}

bool detect_unity(const Trace& trace, const std::vector<std::string>& objects, double t,
                  const RunConfig& config) {
  InteractionDetector detector(trace, config);
  return detector.unity_state(objects, frame_for_time(trace, t));
}

bool detect_oo(const Trace& trace, const std::string& manipulated,
               const std::string& background, double t, const RunConfig& config) {
  GraphSeries series = build_graph_series(trace, config);
  const std::size_t k = frame_for_time(trace, t);
  for (const SceneGraph* g : {&series.right[k], &series.left[k]}) {
    const auto members = g->manipulated();
    if (std::find(members.begin(), members.end(), manipulated) == members.end()) continue;
    if (auto bkg = g->background(); bkg && *bkg == background) return true;
  }
  return false;
}

SceneGraph build_graph(const Trace& trace, HandSide hand, double t, const RunConfig& config) {
  GraphSeries series = build_graph_series(trace, config);
  const std::size_t k = frame_for_time(trace, t);
  return hand == HandSide::Right ? series.right[k] : series.left[k];
}

}  // namespace bimoplan
