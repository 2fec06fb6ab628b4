#include "bimoplan/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "bimoplan/errors.hpp"

namespace bimoplan {
namespace {

using Eigen::Vector3d;
using nlohmann::json;

double min_jerk(double tau) {
  tau = std::clamp(tau, 0.0, 1.0);
  return tau * tau * tau * (10.0 - 15.0 * tau + 6.0 * tau * tau);
}

// Nominal detector latencies used only for the per-frame label track. Unit
// labels and primitive expectations do not depend on them.
constexpr double kHoOnsetLag = 0.10;
constexpr double kHoOffLag = 0.15;
constexpr double kOoOnsetLag = 0.50;
constexpr double kOoOffLag = 0.40;

struct GripEvent {
  double t_grasp = 0.0;
  double t_release = 0.0;
  std::string object;
  Vector3d offset = Vector3d::Zero();
  double approach_s = 1.2;
  double retreat_s = 1.0;
};

/// Composes per-frame position tracks: keyframed objects, follow links,
/// additive min-jerk wobble chains, and hands derived from grip schedules.
class Script {
 public:
  Script(double rate_hz, double duration)
      : rate_(rate_hz), frames_(static_cast<std::size_t>(std::floor(duration * rate_hz)) + 1) {}

  std::size_t frame(double t) const {
    const auto k = static_cast<long>(std::lround(t * rate_));
    return static_cast<std::size_t>(std::clamp<long>(k, 0, static_cast<long>(frames_) - 1));
  }
  double time(std::size_t k) const { return static_cast<double>(k) / rate_; }
  std::size_t frames() const { return frames_; }

  void object(const std::string& name, std::vector<std::pair<double, Vector3d>> keyframes) {
    order_.push_back(name);
    keyframes_[name] = std::move(keyframes);
  }

  void follow(const std::string& name, const std::string& leader, const Vector3d& offset,
              double t0, double t1) {
    follows_[name] = Follow{leader, offset, t0, t1};
  }

  // Additive chain of min-jerk hops 0 -> a -> 0 -> ... -> 0 on one axis.
  void wiggle(const std::string& name, int axis, double t0, double t1, double amplitude,
              double hop_s) {
    wiggles_[name].push_back(Wiggle{axis, t0, t1, amplitude, hop_s});
  }

  void hand(const std::string& name, const Vector3d& park, std::vector<GripEvent> grips) {
    hands_.push_back(Hand{name, park, std::move(grips)});
  }

  std::map<std::string, std::vector<Vector3d>> build() const {
    std::map<std::string, std::vector<Vector3d>> tracks;
    for (const auto& name : order_) {
      std::vector<Vector3d> track(frames_);
      const auto& kf = keyframes_.at(name);
      for (std::size_t k = 0; k < frames_; ++k) track[k] = sample_keyframes(kf, time(k));
      apply_wiggles(name, track);
      tracks[name] = std::move(track);
    }
    // Follow links override (and freeze after) the base track.
    for (const auto& [name, f] : follows_) {
      auto& track = tracks.at(name);
      const auto& leader = tracks.at(f.leader);
      const std::size_t k0 = frame(f.t0), k1 = frame(f.t1);
      for (std::size_t k = k0; k <= k1 && k < frames_; ++k) track[k] = leader[k] + f.offset;
      for (std::size_t k = std::min(k1 + 1, frames_); k < frames_; ++k) track[k] = track[k1];
    }
    for (const auto& h : hands_) tracks[h.name] = hand_track(h, tracks);
    return tracks;
  }

 private:
  struct Follow {
    std::string leader;
    Vector3d offset;
    double t0, t1;
  };
  struct Wiggle {
    int axis;
    double t0, t1;
    double amplitude;
    double hop_s;
  };
  struct Hand {
    std::string name;
    Vector3d park;
    std::vector<GripEvent> grips;
  };

  static Vector3d sample_keyframes(const std::vector<std::pair<double, Vector3d>>& kf,
                                   double t) {
    if (kf.empty()) return Vector3d::Zero();
    if (t <= kf.front().first) return kf.front().second;
    for (std::size_t i = 1; i < kf.size(); ++i) {
      if (t <= kf[i].first) {
        const double span = kf[i].first - kf[i - 1].first;
        const double s = span > 0.0 ? min_jerk((t - kf[i - 1].first) / span) : 1.0;
        return kf[i - 1].second + s * (kf[i].second - kf[i - 1].second);
      }
    }
    return kf.back().second;
  }

  void apply_wiggles(const std::string& name, std::vector<Vector3d>& track) const {
    auto it = wiggles_.find(name);
    if (it == wiggles_.end()) return;
    for (const auto& w : it->second) {
      const double span = w.t1 - w.t0;
      if (span <= 0.0) continue;
      std::size_t hops = static_cast<std::size_t>(std::lround(span / w.hop_s));
      if (hops < 2) hops = 2;
      if (hops % 2 == 1) ++hops;  // chains end back at zero offset
      const double hop_len = span / static_cast<double>(hops);
      for (std::size_t k = frame(w.t0); k <= frame(w.t1) && k < frames_; ++k) {
        const double local = time(k) - w.t0;
        if (local < 0.0 || local > span) continue;
        auto hop = static_cast<std::size_t>(local / hop_len);
        if (hop >= hops) hop = hops - 1;
        const double tau = (local - static_cast<double>(hop) * hop_len) / hop_len;
        const double from = hop % 2 == 0 ? 0.0 : w.amplitude;
        const double to = hop % 2 == 0 ? w.amplitude : 0.0;
        track[k][w.axis] += from + min_jerk(tau) * (to - from);
      }
    }
  }

  std::vector<Vector3d> hand_track(const Hand& h,
                                   const std::map<std::string, std::vector<Vector3d>>& tracks) const {
    std::vector<Vector3d> track(frames_, h.park);
    Vector3d current = h.park;
    std::size_t k = 0;
    for (std::size_t gi = 0; gi < h.grips.size(); ++gi) {
      const auto& g = h.grips[gi];
      const auto& obj = tracks.at(g.object);
      const std::size_t kg = frame(g.t_grasp);
      const std::size_t kr = frame(g.t_release);
      const Vector3d grasp_pose = obj[kg] + g.offset;
      if (g.t_grasp > 0.0) {
        const std::size_t ka = frame(std::max(0.0, g.t_grasp - g.approach_s));
        for (; k < ka && k < frames_; ++k) track[k] = current;
        for (; k < kg && k < frames_; ++k) {
          const double tau = static_cast<double>(k - ka) / std::max<double>(1.0, kg - ka);
          track[k] = current + min_jerk(tau) * (grasp_pose - current);
        }
      }
      for (k = kg; k <= kr && k < frames_; ++k) track[k] = obj[k] + g.offset;
      current = obj[std::min(kr, frames_ - 1)] + g.offset;
      k = std::min(kr + 1, frames_);
      const bool last = gi + 1 == h.grips.size();
      if (last) {
        const std::size_t ke = frame(std::min(g.t_release + g.retreat_s,
                                              time(frames_ - 1)));
        for (; k <= ke && k < frames_; ++k) {
          const double tau = static_cast<double>(k - kr) / std::max<double>(1.0, ke - kr);
          track[k] = current + min_jerk(tau) * (h.park - current);
        }
        current = h.park;
        for (; k < frames_; ++k) track[k] = current;
      }
    }
    for (; k < frames_; ++k) track[k] = current;
    return track;
  }

  double rate_;
  std::size_t frames_;
  std::vector<std::string> order_;
  std::map<std::string, std::vector<std::pair<double, Vector3d>>> keyframes_;
  std::map<std::string, Follow> follows_;
  std::map<std::string, std::vector<Wiggle>> wiggles_;
  std::vector<Hand> hands_;
};

struct SceneElement {
  std::string name;
  ElementKind kind;
};

Trace emit_trace(const Script& script, const std::vector<SceneElement>& elements,
                 const ScenarioSpec& spec,
                 std::map<std::string, std::vector<Vector3d>>& tracks) {
  tracks = script.build();
  Trace trace;
  trace.rate_hz = spec.rate_hz;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> pos_noise(0.0, spec.sigma_pos);
  std::normal_distribution<double> rot_noise(0.0, spec.sigma_rot);
  for (const auto& e : elements) trace.elements.push_back({e.name, e.kind});
  for (const auto& e : elements) {
    trace.streams[e.name].reserve(script.frames());
  }
  for (std::size_t k = 0; k < script.frames(); ++k) {
    const double t = script.time(k);
    for (const auto& e : elements) {
      Vector3d p = tracks.at(e.name)[k];
      Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
      if (spec.sigma_pos > 0.0) {
        p += Vector3d(pos_noise(rng), pos_noise(rng), pos_noise(rng));
      }
      if (spec.sigma_rot > 0.0) {
        const Vector3d rv(rot_noise(rng), rot_noise(rng), rot_noise(rng));
        const double angle = rv.norm();
        if (angle > 0.0) q = Eigen::Quaterniond(Eigen::AngleAxisd(angle, rv / angle));
      }
      trace.streams[e.name].push_back({t, make_transform(q, p)});
    }
  }
  return trace;
}

json pose_json(const Vector3d& p) {
  return json{{"position", {p.x(), p.y(), p.z()}}, {"orientation", {1.0, 0.0, 0.0, 0.0}}};
}

std::string scene_json_from(const std::vector<SceneElement>& elements,
                            const std::map<std::string, std::vector<Vector3d>>& tracks,
                            const std::string& right_hand, const std::string& left_hand) {
  json doc;
  doc["elements"] = json::array();
  for (const auto& e : elements) {
    if (e.kind != ElementKind::Object) continue;
    json obj = pose_json(tracks.at(e.name).front());
    obj["name"] = e.name;
    obj["kind"] = "object";
    doc["elements"].push_back(obj);
  }
  doc["grippers"] = {{"arm_x", pose_json(tracks.at(right_hand).front())},
                     {"arm_y", pose_json(tracks.at(left_hand).front())}};
  return doc.dump(2);
}

void fill_final_rel(GroundTruth& truth,
                    const std::map<std::string, std::vector<Vector3d>>& tracks) {
  for (const auto& pair : truth.checked_pairs) {
    const Vector3d subject = tracks.at(pair.subject).back();
    const Vector3d background = tracks.at(pair.background).back();
    RigidTransform rel;
    rel.translation = subject - background;
    truth.final_rel[pair.subject + "|" + pair.background] = rel;
  }
}

std::vector<std::string> collapse_runs(const std::vector<std::string>& labels) {
  std::vector<std::string> runs;
  for (const auto& label : labels) {
    if (runs.empty() || runs.back() != label) runs.push_back(label);
  }
  return runs;
}

ExpectedPrimitive ep(ActionKind action, Actor actor, std::string target,
                     std::string subject = "") {
  return ExpectedPrimitive{action, actor, std::move(target), std::move(subject)};
}

struct Build {
  Script script;
  std::vector<SceneElement> elements;
  GroundTruth truth;
};

// ---------------------------------------------------------------------------
// Scenarios. Carries are translation-only so rigidly co-moving elements share
// identical per-axis waveforms, which keeps paired detector onsets on the
// same grid frame in the noise-free case.
// ---------------------------------------------------------------------------

Build pick_place(const ScenarioSpec& spec) {
  const double s = spec.time_scale;
  Build b{Script(spec.rate_hz, 9.5 * s), {}, {}};
  b.elements = {{"hand_right", ElementKind::HandRight},
                {"hand_left", ElementKind::HandLeft},
                {"cup1", ElementKind::Object},
                {"plate1", ElementKind::Object}};
  const Vector3d cup_start(0.10, 0.00, 0.02);
  const Vector3d plate(0.10, 0.35, 0.005);
  const Vector3d cup_final = plate + Vector3d(0, 0, 0.025);
  b.script.object("cup1", {{0.0, cup_start}, {2.0 * s, cup_start}, {4.0 * s, cup_final}});
  b.script.object("plate1", {{0.0, plate}});
  b.script.hand("hand_right", Vector3d(0.55, -0.45, 0.20),
                {{2.0 * s, 7.5 * s, "cup1", Vector3d(0.0, -0.025, 0.015), 1.2 * s, 1.0 * s}});
  b.script.hand("hand_left", Vector3d(-0.55, -0.45, 0.20), {});

  b.truth.unit_labels = {"one_arm_right", "one_arm_right"};
  b.truth.primitives = {ep(ActionKind::Move, Actor::Right, "cup1"),
                        ep(ActionKind::Grasp, Actor::Right, "cup1"),
                        ep(ActionKind::Move, Actor::Right, "plate1", "cup1"),
                        ep(ActionKind::Release, Actor::Right, "cup1")};
  b.truth.checked_pairs = {{"cup1", "plate1"}};
  const double on = 2.0 * s + kHoOnsetLag;
  const double oo = 4.0 * s + kOoOnsetLag;
  const double off = 7.5 * s + kHoOffLag;
  b.truth.label_spans = {{on, off, "one_arm_right"}};
  (void)oo;
  return b;
}

Build dual_uncoordinated(const ScenarioSpec& spec) {
  const double s = spec.time_scale;
  Build b{Script(spec.rate_hz, 9.5 * s), {}, {}};
  b.elements = {{"hand_right", ElementKind::HandRight},
                {"hand_left", ElementKind::HandLeft},
                {"profile_b1", ElementKind::Object},
                {"profile_c", ElementKind::Object},
                {"pad_blue", ElementKind::Object},
                {"pad_yellow", ElementKind::Object}};
  const Vector3d right_start(0.25, -0.10, 0.02), left_start(-0.25, -0.10, 0.02);
  const Vector3d pad_blue(0.25, 0.30, 0.005), pad_yellow(-0.25, 0.30, 0.005);
  b.script.object("profile_b1",
                  {{0.0, right_start}, {2.0 * s, right_start}, {4.0 * s, pad_blue + Vector3d(0, 0, 0.025)}});
  b.script.object("profile_c",
                  {{0.0, left_start}, {2.0 * s, left_start}, {4.0 * s, pad_yellow + Vector3d(0, 0, 0.025)}});
  b.script.object("pad_blue", {{0.0, pad_blue}});
  b.script.object("pad_yellow", {{0.0, pad_yellow}});
  b.script.hand("hand_right", Vector3d(0.55, -0.45, 0.20),
                {{2.0 * s, 7.5 * s, "profile_b1", Vector3d(0.025, 0.0, 0.015), 1.2 * s, 1.0 * s}});
  b.script.hand("hand_left", Vector3d(-0.55, -0.45, 0.20),
                {{2.0 * s, 7.5 * s, "profile_c", Vector3d(-0.025, 0.0, 0.015), 1.2 * s, 1.0 * s}});

  b.truth.unit_labels = {"uncoordinated", "uncoordinated"};
  b.truth.primitives = {ep(ActionKind::Move, Actor::Right, "profile_b1"),
                        ep(ActionKind::Grasp, Actor::Right, "profile_b1"),
                        ep(ActionKind::Move, Actor::Left, "profile_c"),
                        ep(ActionKind::Grasp, Actor::Left, "profile_c"),
                        ep(ActionKind::Move, Actor::Right, "pad_blue", "profile_b1"),
                        ep(ActionKind::Move, Actor::Left, "pad_yellow", "profile_c"),
                        ep(ActionKind::Release, Actor::Right, "profile_b1"),
                        ep(ActionKind::Release, Actor::Left, "profile_c")};
  b.truth.checked_pairs = {{"profile_b1", "pad_blue"}, {"profile_c", "pad_yellow"}};
  b.truth.label_spans = {{2.0 * s + kHoOnsetLag, 7.5 * s + kHoOffLag, "uncoordinated"}};
  return b;
}

Build co_transport(const ScenarioSpec& spec) {
  const double s = spec.time_scale;
  Build b{Script(spec.rate_hz, 10.0 * s), {}, {}};
  b.elements = {{"hand_right", ElementKind::HandRight},
                {"hand_left", ElementKind::HandLeft},
                {"pan", ElementKind::Object},
                {"cooker", ElementKind::Object}};
  const Vector3d pan_start(0.00, -0.15, 0.03);
  const Vector3d cooker(0.00, 0.30, 0.00);
  const Vector3d pan_final = cooker + Vector3d(0, 0, 0.035);
  b.script.object("pan", {{0.0, pan_start},
                          {2.0 * s, pan_start},
                          {2.8 * s, pan_start + Vector3d(0, 0, 0.10)},
                          {4.2 * s, pan_final + Vector3d(0, 0, 0.08)},
                          {5.0 * s, pan_final}});
  b.script.object("cooker", {{0.0, cooker}});
  b.script.hand("hand_right", Vector3d(0.55, -0.45, 0.20),
                {{2.0 * s, 8.5 * s, "pan", Vector3d(0.03, 0.0, 0.01), 1.2 * s, 1.0 * s}});
  b.script.hand("hand_left", Vector3d(-0.55, -0.45, 0.20),
                {{2.0 * s, 8.5 * s, "pan", Vector3d(-0.03, 0.0, 0.01), 1.2 * s, 1.0 * s}});

  b.truth.unit_labels = {"synchronous", "synchronous"};
  b.truth.primitives = {ep(ActionKind::Move, Actor::Right, "pan"),
                        ep(ActionKind::Grasp, Actor::Right, "pan"),
                        ep(ActionKind::Move, Actor::Left, "pan"),
                        ep(ActionKind::Grasp, Actor::Left, "pan"),
                        ep(ActionKind::Move, Actor::Both, "cooker", "pan"),
                        ep(ActionKind::Release, Actor::Right, "pan"),
                        ep(ActionKind::Release, Actor::Left, "pan")};
  b.truth.checked_pairs = {{"pan", "cooker"}};
  b.truth.label_spans = {{2.0 * s + kHoOnsetLag, 8.5 * s + kHoOffLag, "synchronous"}};
  return b;
}

Build hold_and_place(const ScenarioSpec& spec) {
  const double s = spec.time_scale;
  Build b{Script(spec.rate_hz, 15.5 * s), {}, {}};
  b.elements = {{"hand_right", ElementKind::HandRight},
                {"hand_left", ElementKind::HandLeft},
                {"pan", ElementKind::Object},
                {"cooker", ElementKind::Object},
                {"cover", ElementKind::Object}};
  const Vector3d pan_start(-0.10, -0.15, 0.03);
  const Vector3d cooker(0.00, 0.30, 0.00);
  const Vector3d pan_final = cooker + Vector3d(0, 0, 0.035);
  const Vector3d cover_start(0.35, 0.10, 0.02);
  const Vector3d cover_final = pan_final + Vector3d(0, 0, 0.045);
  b.script.object("pan", {{0.0, pan_start},
                          {2.0 * s, pan_start},
                          {2.8 * s, pan_start + Vector3d(0, 0, 0.10)},
                          {4.0 * s, pan_final}});
  b.script.object("cooker", {{0.0, cooker}});
  b.script.object("cover", {{0.0, cover_start},
                            {7.2 * s, cover_start},
                            {8.0 * s, cover_start + Vector3d(0, 0, 0.12)},
                            {9.2 * s, cover_final}});
  b.script.hand("hand_left", Vector3d(-0.55, -0.45, 0.20),
                {{2.0 * s, 13.5 * s, "pan", Vector3d(-0.03, 0.0, 0.01), 1.2 * s, 1.0 * s}});
  b.script.hand("hand_right", Vector3d(0.55, -0.45, 0.20),
                {{7.2 * s, 12.0 * s, "cover", Vector3d(0.03, 0.0, 0.01), 1.2 * s, 1.0 * s}});

  b.truth.unit_labels = {"one_arm_left", "one_arm_left", "uncoordinated", "sequential",
                         "one_arm_left"};
  b.truth.dominant_object = "cover";
  b.truth.primitives = {ep(ActionKind::Move, Actor::Left, "pan"),
                        ep(ActionKind::Grasp, Actor::Left, "pan"),
                        ep(ActionKind::Move, Actor::Left, "cooker", "pan"),
                        ep(ActionKind::Move, Actor::Right, "cover"),
                        ep(ActionKind::Grasp, Actor::Right, "cover"),
                        ep(ActionKind::KeepGrasp, Actor::Left, "pan"),
                        ep(ActionKind::Move, Actor::Right, "pan", "cover"),
                        ep(ActionKind::KeepGrasp, Actor::Left, "pan"),
                        ep(ActionKind::Release, Actor::Right, "cover"),
                        ep(ActionKind::KeepGrasp, Actor::Left, "pan"),
                        ep(ActionKind::Release, Actor::Left, "pan")};
  b.truth.checked_pairs = {{"pan", "cooker"}, {"cover", "pan"}};
  b.truth.label_spans = {
      {2.0 * s + kHoOnsetLag, 7.2 * s + kHoOnsetLag, "one_arm_left"},
      {7.2 * s + kHoOnsetLag, 9.2 * s + kOoOnsetLag, "uncoordinated"},
      {9.2 * s + kOoOnsetLag, 12.0 * s + kHoOffLag, "sequential"},
      {12.0 * s + kHoOffLag, 13.5 * s + kHoOffLag, "one_arm_left"}};
  return b;
}

Build pouring(const ScenarioSpec& spec) {
  const double s = spec.time_scale;
  Build b{Script(spec.rate_hz, 15.8 * s), {}, {}};
  b.elements = {{"hand_right", ElementKind::HandRight},
                {"hand_left", ElementKind::HandLeft},
                {"cup", ElementKind::Object},
                {"bottle", ElementKind::Object},
                {"saucer", ElementKind::Object}};
  const Vector3d cup_pour(0.00, 0.10, 0.05);
  const Vector3d bottle_pour = cup_pour + Vector3d(0.044, 0, 0);
  const Vector3d bottle_rest(-0.30, 0.30, 0.02);
  const Vector3d saucer(0.28, 0.35, 0.005);
  const Vector3d cup_up = cup_pour + Vector3d(0, 0, 0.08);
  const Vector3d cup_final = saucer + Vector3d(0, 0, 0.030);

  b.script.object("cup", {{0.0, cup_pour},
                          {7.4 * s, cup_pour},
                          {8.2 * s, cup_up},
                          {8.6 * s, cup_up},
                          {9.4 * s, cup_pour},
                          {10.9 * s, cup_final}});
  b.script.object("bottle", {{0.0, bottle_pour}, {5.0 * s, bottle_pour}, {6.6 * s, bottle_rest}});
  b.script.object("saucer", {{0.0, saucer}});
  // Identically shaped onset bursts keep both hand-object detections on the
  // same frame; the axes are perpendicular to the cup-bottle offset so the
  // pair distance stays inside one discretization bin.
  b.script.wiggle("cup", 2, 1.6 * s, 2.8 * s, 0.015, 0.6);
  b.script.wiggle("bottle", 1, 1.6 * s, 2.8 * s, 0.015, 0.6);
  // Pouring phase: the bottle keeps moving on two axes, the cup is still, so
  // the bottle hand carries the higher mutual information (dominant object).
  b.script.wiggle("bottle", 1, 2.8 * s, 5.0 * s, 0.014, 0.65);
  b.script.wiggle("bottle", 2, 2.8 * s, 5.0 * s, 0.014, 0.5);

  b.script.hand("hand_right", Vector3d(0.55, -0.45, 0.20),
                {{0.0, 14.2 * s, "cup", Vector3d(0.0, -0.03, 0.0), 1.2 * s, 1.0 * s}});
  b.script.hand("hand_left", Vector3d(-0.55, -0.45, 0.20),
                {{0.0, 6.6 * s, "bottle", Vector3d(0.0, 0.03, 0.0), 1.2 * s, 1.0 * s}});

  b.truth.unit_labels = {"sequential", "uncoordinated", "one_arm_right", "one_arm_right"};
  b.truth.dominant_object = "bottle";
  b.truth.primitives = {ep(ActionKind::Move, Actor::Right, "cup"),
                        ep(ActionKind::Grasp, Actor::Right, "cup"),
                        ep(ActionKind::Move, Actor::Left, "bottle"),
                        ep(ActionKind::Grasp, Actor::Left, "bottle"),
                        ep(ActionKind::Move, Actor::Right, "bottle", "cup"),
                        ep(ActionKind::Move, Actor::Left, "cup", "bottle"),
                        ep(ActionKind::KeepGrasp, Actor::Right, "cup"),
                        ep(ActionKind::KeepGrasp, Actor::Left, "bottle"),
                        ep(ActionKind::Release, Actor::Left, "bottle"),
                        ep(ActionKind::KeepGrasp, Actor::Right, "cup"),
                        ep(ActionKind::Move, Actor::Right, "saucer", "cup"),
                        ep(ActionKind::Release, Actor::Right, "cup")};
  b.truth.checked_pairs = {{"cup", "saucer"}};
  b.truth.label_spans = {{1.6 * s - 0.1, 5.0 * s + kOoOffLag, "sequential"},
                         {5.0 * s + kOoOffLag, 6.6 * s + kHoOffLag, "uncoordinated"},
                         {6.6 * s + kHoOffLag, 14.2 * s + kHoOffLag, "one_arm_right"}};
  return b;
}

Build assemble(const ScenarioSpec& spec) {
  const double s = spec.time_scale;
  Build b{Script(spec.rate_hz, 20.5 * s), {}, {}};
  b.elements = {{"hand_right", ElementKind::HandRight},
                {"hand_left", ElementKind::HandLeft},
                {"joint", ElementKind::Object},
                {"profile_a", ElementKind::Object},
                {"workstation", ElementKind::Object},
                {"scale", ElementKind::Object}};
  const Vector3d joint_start(-0.15, -0.10, 0.02);
  const Vector3d profile_start(0.30, -0.15, 0.02);
  const Vector3d workstation(0.00, 0.30, 0.00);
  const Vector3d scale(0.35, 0.30, 0.00);
  const Vector3d joint_on_ws = workstation + Vector3d(0, 0, 0.033);
  const Vector3d assembly_offset(0.044, 0, 0);  // profile relative to joint
  const Vector3d joint_on_scale = scale + Vector3d(0, 0, 0.035);

  b.script.object("joint", {{0.0, joint_start},
                            {2.0 * s, joint_start},
                            {2.8 * s, joint_start + Vector3d(0, 0, 0.10)},
                            {4.0 * s, joint_on_ws},
                            {12.4 * s, joint_on_ws},
                            {13.6 * s, joint_on_ws + Vector3d(0, 0, 0.10)},
                            {15.2 * s, joint_on_scale}});
  b.script.object("profile_a", {{0.0, profile_start},
                                {6.7 * s, profile_start},
                                {7.5 * s, profile_start + Vector3d(0, 0, 0.12)},
                                {8.7 * s, joint_on_ws + assembly_offset}});
  b.script.object("workstation", {{0.0, workstation}});
  b.script.object("scale", {{0.0, scale}});
  // Once assembled, the profile moves rigidly with the joint.
  b.script.follow("profile_a", "joint", assembly_offset, 8.7 * s, 20.5 * s);
  // Pre-lift wiggle of the whole assembly: the shared motion is what fuses
  // the two objects into a manipulated unity before the transport starts.
  // Both axes are perpendicular to the vertical workstation offset, so the
  // contact distance stays inside one discretization bin.
  b.script.wiggle("joint", 1, 10.9 * s, 12.4 * s, 0.022, 0.6);
  b.script.wiggle("joint", 0, 10.9 * s, 12.4 * s, 0.022, 0.75);

  b.script.hand("hand_left", Vector3d(-0.55, -0.45, 0.20),
                {{2.0 * s, 19.2 * s, "joint", Vector3d(0.0, -0.028, 0.01), 1.2 * s, 1.0 * s}});
  b.script.hand("hand_right", Vector3d(0.55, -0.45, 0.20),
                {{6.7 * s, 18.4 * s, "profile_a", Vector3d(0.0, -0.028, 0.01), 1.2 * s, 1.0 * s}});

  b.truth.unit_labels = {"one_arm_left", "one_arm_left", "uncoordinated", "sequential",
                         "synchronous", "synchronous", "synchronous", "one_arm_left"};
  b.truth.dominant_object = "profile_a";
  b.truth.primitives = {ep(ActionKind::Move, Actor::Left, "joint"),
                        ep(ActionKind::Grasp, Actor::Left, "joint"),
                        ep(ActionKind::Move, Actor::Left, "workstation", "joint"),
                        ep(ActionKind::Move, Actor::Right, "profile_a"),
                        ep(ActionKind::Grasp, Actor::Right, "profile_a"),
                        ep(ActionKind::KeepGrasp, Actor::Left, "joint"),
                        ep(ActionKind::Move, Actor::Right, "joint", "profile_a"),
                        ep(ActionKind::KeepGrasp, Actor::Left, "joint"),
                        ep(ActionKind::KeepGrasp, Actor::Right, "joint"),
                        ep(ActionKind::KeepGrasp, Actor::Left, "joint"),
                        ep(ActionKind::KeepGrasp, Actor::Right, "joint"),
                        ep(ActionKind::KeepGrasp, Actor::Left, "joint"),
                        ep(ActionKind::Move, Actor::Both, "scale", "joint"),
                        ep(ActionKind::Release, Actor::Right, "joint"),
                        ep(ActionKind::KeepGrasp, Actor::Left, "joint"),
                        ep(ActionKind::Release, Actor::Left, "joint")};
  b.truth.checked_pairs = {{"joint", "scale"}, {"profile_a", "joint"}};
  b.truth.label_spans = {
      {2.0 * s + kHoOnsetLag, 7.0 * s, "one_arm_left"},
      {7.0 * s, 8.7 * s + kOoOnsetLag, "uncoordinated"},
      {8.7 * s + kOoOnsetLag, 11.4 * s, "sequential"},
      {11.4 * s, 18.4 * s + 0.3, "synchronous"},
      {18.4 * s + 0.3, 19.2 * s + kHoOffLag, "one_arm_left"}};
  return b;
}

}  // namespace

const char* scenario_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::PickPlaceOneArm: return "pickplace";
    case ScenarioKind::DualUncoordinated: return "dual_uncoordinated";
    case ScenarioKind::CoTransportSync: return "cotransport";
    case ScenarioKind::HoldAndPlaceSequential: return "hold_and_place";
    case ScenarioKind::PouringLike: return "pouring";
    case ScenarioKind::AssembleThenCoTransport: return "assemble";
  }
  return "pickplace";
}

ScenarioKind scenario_from_name(const std::string& name) {
  for (ScenarioKind kind : all_scenarios()) {
    if (name == scenario_name(kind)) return kind;
  }
  raise(ErrorCode::InvalidArgument, "unknown scenario '" + name + "'");
}

std::vector<ScenarioKind> all_scenarios() {
  return {ScenarioKind::PickPlaceOneArm,      ScenarioKind::DualUncoordinated,
          ScenarioKind::CoTransportSync,      ScenarioKind::HoldAndPlaceSequential,
          ScenarioKind::PouringLike,          ScenarioKind::AssembleThenCoTransport};
}

std::string GroundTruth::to_json() const {
  json doc;
  doc["unit_labels"] = unit_labels;
  doc["run_labels"] = run_labels;
  doc["dominant_object"] = dominant_object;
  doc["primitives"] = json::array();
  for (const auto& p : primitives) {
    doc["primitives"].push_back({{"action", action_kind_name(p.action)},
                                 {"actor", actor_name(p.actor)},
                                 {"target", p.target},
                                 {"subject", p.subject}});
  }
  doc["checked_pairs"] = json::array();
  for (const auto& c : checked_pairs) {
    doc["checked_pairs"].push_back({{"subject", c.subject}, {"background", c.background}});
  }
  doc["label_spans"] = json::array();
  for (const auto& span : label_spans) {
    doc["label_spans"].push_back(
        {{"t_start", span.t_start}, {"t_end", span.t_end}, {"label", span.label}});
  }
  doc["scene"] = json::parse(scene_json);
  return doc.dump(2);
}

std::string truth_label_at(const GroundTruth& truth, double t) {
  for (const auto& span : truth.label_spans) {
    if (t >= span.t_start && t < span.t_end) return span.label;
  }
  return "idle";
}

std::pair<Trace, GroundTruth> generate(const ScenarioSpec& spec) {
  if (spec.rate_hz <= 0.0) raise(ErrorCode::InvalidArgument, "rate_hz must be positive");
  Build b = [&] {
    switch (spec.kind) {
      case ScenarioKind::PickPlaceOneArm: return pick_place(spec);
      case ScenarioKind::DualUncoordinated: return dual_uncoordinated(spec);
      case ScenarioKind::CoTransportSync: return co_transport(spec);
      case ScenarioKind::HoldAndPlaceSequential: return hold_and_place(spec);
      case ScenarioKind::PouringLike: return pouring(spec);
      case ScenarioKind::AssembleThenCoTransport: return assemble(spec);
    }
    raise(ErrorCode::InvalidArgument, "unknown scenario");
  }();

  std::map<std::string, std::vector<Vector3d>> tracks;
  Trace trace = emit_trace(b.script, b.elements, spec, tracks);
  b.truth.run_labels = collapse_runs(b.truth.unit_labels);
  b.truth.scene_json = scene_json_from(b.elements, tracks, "hand_right", "hand_left");
  fill_final_rel(b.truth, tracks);
  return {std::move(trace), std::move(b.truth)};
}

}  // namespace bimoplan
