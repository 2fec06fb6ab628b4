#include "bimoplan/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bimoplan/errors.hpp"

namespace bimoplan {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    raise(ErrorCode::ConfigError, "key '" + key + "': bad number '" + value + "'");
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    raise(ErrorCode::ConfigError, "key '" + key + "': bad integer '" + value + "'");
  }
}

void require_positive(const std::string& key, double v) {
  if (!(v > 0.0)) raise(ErrorCode::ConfigError, "key '" + key + "' must be positive");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

}  // namespace

void apply_config_key(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = unquote(trim(raw));
  if (key == "rate_hz") { c.rate_hz = parse_double(key, value); require_positive(key, c.rate_hz); }
  else if (key == "max_gap_s") { c.max_gap_s = parse_double(key, value); require_positive(key, c.max_gap_s); }
  else if (key == "window_s") { c.window_s = parse_double(key, value); require_positive(key, c.window_s); }
  else if (key == "bins") {
    c.bins = static_cast<int>(parse_long(key, value));
    if (c.bins < 2) raise(ErrorCode::ConfigError, "bins must be >= 2");
  } else if (key == "axis_aggregate") {
    if (value == "mean") c.aggregate = AxisAggregate::Mean;
    else if (value == "sum") c.aggregate = AxisAggregate::Sum;
    else raise(ErrorCode::ConfigError, "axis_aggregate must be 'mean' or 'sum'");
  } else if (key == "dist_bin_m") { c.dist_bin_m = parse_double(key, value); require_positive(key, c.dist_bin_m); }
  else if (key == "theta_mi") { c.theta_mi = parse_double(key, value); require_positive(key, c.theta_mi); }
  else if (key == "theta_ci") { c.theta_ci = parse_double(key, value); require_positive(key, c.theta_ci); }
  else if (key == "theta_h") { c.theta_h = parse_double(key, value); require_positive(key, c.theta_h); }
  else if (key == "d_ho") { c.d_ho = parse_double(key, value); require_positive(key, c.d_ho); }
  else if (key == "d_oo") { c.d_oo = parse_double(key, value); require_positive(key, c.d_oo); }
  else if (key == "activity_eps") { c.activity_eps = parse_double(key, value); require_positive(key, c.activity_eps); }
  else if (key == "debounce_frames") {
    c.debounce_frames = static_cast<int>(parse_long(key, value));
    if (c.debounce_frames < 1) raise(ErrorCode::ConfigError, "debounce_frames must be >= 1");
  } else if (key == "oo_candidates") {
    if (value == "all") c.oo_candidates = OoCandidateScope::AllOthers;
    else if (value == "unmanipulated") c.oo_candidates = OoCandidateScope::Unmanipulated;
    else raise(ErrorCode::ConfigError, "oo_candidates must be 'all' or 'unmanipulated'");
  } else if (key == "mi_tie_eps") { c.mi_tie_eps = parse_double(key, value); require_positive(key, c.mi_tie_eps); }
  else if (key == "at_target_tol_m") { c.at_target_tol_m = parse_double(key, value); require_positive(key, c.at_target_tol_m); }
  else if (key == "at_target_tol_rad") { c.at_target_tol_rad = parse_double(key, value); require_positive(key, c.at_target_tol_rad); }
  else if (key == "grasp_radius_m") { c.grasp_radius_m = parse_double(key, value); require_positive(key, c.grasp_radius_m); }
  else if (key == "move_ticks") {
    c.move_ticks = static_cast<int>(parse_long(key, value));
    if (c.move_ticks < 1) raise(ErrorCode::ConfigError, "move_ticks must be >= 1");
  } else if (key == "max_ticks") {
    c.max_ticks = parse_long(key, value);
    if (c.max_ticks < 1) raise(ErrorCode::ConfigError, "max_ticks must be >= 1");
  } else {
    raise(ErrorCode::ConfigError, "unknown key '" + key + "'");
  }
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig config;
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      raise(ErrorCode::ConfigError,
            origin + " line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    apply_config_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream out;
  out << "rate_hz = " << format_double(c.rate_hz) << '\n'
      << "max_gap_s = " << format_double(c.max_gap_s) << '\n'
      << "window_s = " << format_double(c.window_s) << '\n'
      << "bins = " << c.bins << '\n'
      << "axis_aggregate = \"" << (c.aggregate == AxisAggregate::Mean ? "mean" : "sum") << "\"\n"
      << "dist_bin_m = " << format_double(c.dist_bin_m) << '\n'
      << "theta_mi = " << format_double(c.theta_mi) << '\n'
      << "theta_ci = " << format_double(c.theta_ci) << '\n'
      << "theta_h = " << format_double(c.theta_h) << '\n'
      << "d_ho = " << format_double(c.d_ho) << '\n'
      << "d_oo = " << format_double(c.d_oo) << '\n'
      << "activity_eps = " << format_double(c.activity_eps) << '\n'
      << "debounce_frames = " << c.debounce_frames << '\n'
      << "oo_candidates = \""
      << (c.oo_candidates == OoCandidateScope::AllOthers ? "all" : "unmanipulated") << "\"\n"
      << "mi_tie_eps = " << format_double(c.mi_tie_eps) << '\n'
      << "at_target_tol_m = " << format_double(c.at_target_tol_m) << '\n'
      << "at_target_tol_rad = " << format_double(c.at_target_tol_rad) << '\n'
      << "grasp_radius_m = " << format_double(c.grasp_radius_m) << '\n'
      << "move_ticks = " << c.move_ticks << '\n'
      << "max_ticks = " << c.max_ticks << '\n';
  return out.str();
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char byte : data) {
    hash ^= byte;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string config_hash(const RunConfig& config) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(emit_config(config))));
  return buf;
}

}  // namespace bimoplan
