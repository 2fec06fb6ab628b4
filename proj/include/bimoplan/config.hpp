#pragma once

#include <cstdint>
#include <string>

#include "bimoplan/infotheory.hpp"

namespace bimoplan {

enum class OoCandidateScope {
  AllOthers,       // every registered object not manipulated by the same hand
  Unmanipulated,   // additionally excludes the other hand's manipulated objects
};

/// Parameters of the full pipeline. Loadable from a TOML-style key/value file
/// (`key = value`, '#' comments); unknown keys are rejected. Every run emits
/// the resolved config so results stay reproducible.
struct RunConfig {
  // trace normalization
  double rate_hz = 30.0;
  double max_gap_s = 0.5;

  // windowed estimators
  double window_s = 1.0;
  // Four bins keep the bin width at or above millimeter-level sensor noise
  // for desk-scale windows; finer binning smears the joint histogram until
  // the bias correction cancels real signal.
  int bins = 4;
  // Summed per-axis MI keeps single-axis manipulation (bobbing a held cup)
  // above threshold under sensor noise; "mean" remains selectable.
  AxisAggregate aggregate = AxisAggregate::Sum;
  double dist_bin_m = 0.01;

  // interaction detection
  double theta_mi = 0.25;       // bits, HO threshold
  // Unity links get a higher bar: during bimanual work both members are
  // active and close by construction, so estimator noise must not fuse them.
  double theta_ci = 0.5;        // bits, unity threshold
  double theta_h = 0.5;         // bits, OO entropy-drop level
  double d_ho = 0.10;           // m
  double d_oo = 0.05;           // m
  double activity_eps = 0.006;  // m; minimum smoothed in-window displacement
  int debounce_frames = 5;
  OoCandidateScope oo_candidates = OoCandidateScope::AllOthers;

  // coordination
  double mi_tie_eps = 0.01;     // bits; smaller deltas count as a tie

  // plan generation / execution
  double at_target_tol_m = 0.01;
  double at_target_tol_rad = 0.0523598776;  // 3 degrees
  double grasp_radius_m = 0.05;
  int move_ticks = 20;
  long max_ticks = 100000;

  SeriesParams series_params() const {
    return SeriesParams{window_s, bins, aggregate, dist_bin_m};
  }
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin);
void apply_config_key(RunConfig& config, const std::string& key, const std::string& value);

/// Canonical key/value rendering; reparses to an identical config.
std::string emit_config(const RunConfig& config);

/// FNV-1a over the canonical rendering, hex encoded.
std::string config_hash(const RunConfig& config);

std::uint64_t fnv1a64(const std::string& data);

}  // namespace bimoplan
