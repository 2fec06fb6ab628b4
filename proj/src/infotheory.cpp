#include "bimoplan/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "bimoplan/errors.hpp"

namespace bimoplan {
namespace {

constexpr double kLn2 = 0.6931471805599453;

double xlogx(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

// Entropy in bits plus the number of occupied cells, from a count histogram.
struct EntropyStats {
  double bits = 0.0;
  int occupied = 0;
};

EntropyStats entropy_from_counts(const std::unordered_map<long long, int>& counts,
                                 std::size_t n) {
  EntropyStats stats;
  const double inv = 1.0 / static_cast<double>(n);
  for (const auto& [sym, c] : counts) {
    stats.bits -= xlogx(static_cast<double>(c) * inv);
    ++stats.occupied;
  }
  return stats;
}

double axis_aggregate(double sum, AxisAggregate aggregate) {
  return aggregate == AxisAggregate::Mean ? sum / 3.0 : sum;
}

std::vector<double> axis_signal(std::span<const Eigen::Vector3d> traj, int axis) {
  std::vector<double> out(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) out[i] = traj[i][axis];
  return out;
}

struct JointStats {
  double hx = 0.0, hy = 0.0, hxy = 0.0;
  int mx = 0, my = 0, mxy = 0;
  std::size_t n = 0;
};

JointStats joint_stats(std::span<const int> x, std::span<const int> y) {
  if (x.size() != y.size()) {
    raise(ErrorCode::LengthMismatch, "signals of length " + std::to_string(x.size()) +
                                         " and " + std::to_string(y.size()));
  }
  JointStats s;
  s.n = x.size();
  std::unordered_map<long long, int> cx, cy, cxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++cx[x[i]];
    ++cy[y[i]];
    ++cxy[(static_cast<long long>(x[i]) << 32) | static_cast<unsigned>(y[i])];
  }
  auto ex = entropy_from_counts(cx, s.n);
  auto ey = entropy_from_counts(cy, s.n);
  auto exy = entropy_from_counts(cxy, s.n);
  s.hx = ex.bits;
  s.hy = ey.bits;
  s.hxy = exy.bits;
  s.mx = ex.occupied;
  s.my = ey.occupied;
  s.mxy = exy.occupied;
  return s;
}

// Joint entropy of a variable subset; each variable already discretized.
EntropyStats subset_entropy(const std::vector<std::vector<int>>& symbols,
                            unsigned subset_mask, std::size_t n, int bins) {
  std::unordered_map<long long, int> counts;
  for (std::size_t i = 0; i < n; ++i) {
    long long key = 0;
    for (std::size_t v = 0; v < symbols.size(); ++v) {
      if (subset_mask & (1u << v)) key = key * bins + symbols[v][i];
    }
    ++counts[key];
  }
  return entropy_from_counts(counts, n);
}

int popcount(unsigned v) { return __builtin_popcount(v); }

double co_information_impl(const std::vector<std::span<const Eigen::Vector3d>>& trajs,
                           int bins, AxisAggregate aggregate, bool adjusted) {
  if (trajs.size() < 2) raise(ErrorCode::InvalidArgument, "co-information needs >= 2 signals");
  const std::size_t n = trajs.front().size();
  for (const auto& t : trajs) {
    if (t.size() != n) raise(ErrorCode::LengthMismatch, "co-information windows differ in length");
  }
  if (n == 0) raise(ErrorCode::InvalidArgument, "empty window");

  double total = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    std::vector<std::vector<int>> symbols;
    symbols.reserve(trajs.size());
    for (const auto& t : trajs) symbols.push_back(discretize(axis_signal(t, axis), bins));

    // I(X1;...;Xn) = -sum over non-empty subsets S of (-1)^|S| H(S).
    double axis_value = 0.0;
    const unsigned full = (1u << trajs.size()) - 1u;
    for (unsigned mask = 1; mask <= full; ++mask) {
      auto stats = subset_entropy(symbols, mask, n, bins);
      double h = stats.bits;
      if (adjusted) h += static_cast<double>(stats.occupied - 1) / (2.0 * static_cast<double>(n) * kLn2);
      const double sign = popcount(mask) % 2 == 0 ? 1.0 : -1.0;
      axis_value -= sign * h;
    }
    total += axis_value;
  }
  return axis_aggregate(total, aggregate);
}

}  // namespace

std::vector<int> discretize(std::span<const double> signal, int bins) {
  if (signal.empty()) raise(ErrorCode::InvalidArgument, "empty signal");
  if (bins < 2) raise(ErrorCode::InvalidArgument, "bins must be >= 2");
  double lo = signal[0], hi = signal[0];
  for (double v : signal) {
    if (!std::isfinite(v)) raise(ErrorCode::InvalidArgument, "non-finite sample");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<int> out(signal.size(), 0);
  // Degenerate range: everything in bin 0. The floor keeps sub-nanometer
  // numerical residue from being amplified into full-range symbols.
  if (hi - lo < 1e-12) return out;
  const double scale = static_cast<double>(bins) / (hi - lo);
  for (std::size_t i = 0; i < signal.size(); ++i) {
    int b = static_cast<int>((signal[i] - lo) * scale);
    out[i] = std::min(b, bins - 1);
  }
  return out;
}

std::vector<int> discretize_fixed(std::span<const double> signal, double bin_width) {
  if (signal.empty()) raise(ErrorCode::InvalidArgument, "empty signal");
  if (bin_width <= 0.0) raise(ErrorCode::InvalidArgument, "bin width must be positive");
  std::vector<int> out(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) {
    out[i] = static_cast<int>(std::floor(signal[i] / bin_width));
  }
  return out;
}

double entropy(std::span<const int> symbols) {
  if (symbols.empty()) raise(ErrorCode::InvalidArgument, "empty symbol sequence");
  std::unordered_map<long long, int> counts;
  for (int s : symbols) ++counts[s];
  return entropy_from_counts(counts, symbols.size()).bits;
}

double mutual_information_symbols(std::span<const int> x, std::span<const int> y) {
  // Canonical argument order keeps the summation order, and therefore the
  // result, bit-identical under argument swap.
  if (std::lexicographical_compare(y.begin(), y.end(), x.begin(), x.end())) {
    std::swap(x, y);
  }
  auto s = joint_stats(x, y);
  return std::max(0.0, s.hx + s.hy - s.hxy);
}

double mutual_information(std::span<const double> x, std::span<const double> y, int bins) {
  if (x.size() != y.size()) {
    raise(ErrorCode::LengthMismatch, "signals of length " + std::to_string(x.size()) +
                                         " and " + std::to_string(y.size()));
  }
  if (x.size() < 2) raise(ErrorCode::InvalidArgument, "window needs >= 2 samples");
  return mutual_information_symbols(discretize(x, bins), discretize(y, bins));
}

namespace {

// Signed bias-corrected estimate; aggregation clamps the combined value so
// per-axis noise can cancel instead of accumulating.
double mutual_information_adjusted_signed(std::span<const double> x,
                                          std::span<const double> y, int bins) {
  auto s = joint_stats(discretize(x, bins), discretize(y, bins));
  const double mi = std::max(0.0, s.hx + s.hy - s.hxy);
  // First-order bias of the plug-in estimate under independence is
  // (Mx-1)(My-1)/(2N ln 2); the occupancy-based Miller-Madow term
  // underestimates it badly when N is smaller than the table.
  const double bias = static_cast<double>((s.mx - 1) * (s.my - 1)) /
                      (2.0 * static_cast<double>(s.n) * kLn2);
  return mi - bias;
}

}  // namespace

double mutual_information_adjusted(std::span<const double> x, std::span<const double> y,
                                   int bins) {
  if (x.size() != y.size()) raise(ErrorCode::LengthMismatch, "window length mismatch");
  return std::max(0.0, mutual_information_adjusted_signed(x, y, bins));
}

double pair_mi_3d(std::span<const Eigen::Vector3d> a, std::span<const Eigen::Vector3d> b,
                  int bins, AxisAggregate aggregate) {
  if (a.size() != b.size()) raise(ErrorCode::LengthMismatch, "trajectory length mismatch");
  double sum = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    sum += mutual_information(axis_signal(a, axis), axis_signal(b, axis), bins);
  }
  return axis_aggregate(sum, aggregate);
}

double pair_mi_3d_adjusted(std::span<const Eigen::Vector3d> a,
                           std::span<const Eigen::Vector3d> b, int bins,
                           AxisAggregate aggregate) {
  if (a.size() != b.size()) raise(ErrorCode::LengthMismatch, "trajectory length mismatch");
  double sum = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    sum += mutual_information_adjusted_signed(axis_signal(a, axis), axis_signal(b, axis),
                                              bins);
  }
  return std::max(0.0, axis_aggregate(sum, aggregate));
}

double co_information(const std::vector<std::span<const Eigen::Vector3d>>& trajs, int bins,
                      AxisAggregate aggregate) {
  return co_information_impl(trajs, bins, aggregate, false);
}

double co_information_adjusted(const std::vector<std::span<const Eigen::Vector3d>>& trajs,
                               int bins, AxisAggregate aggregate) {
  return co_information_impl(trajs, bins, aggregate, true);
}

std::size_t window_samples(double width_s, double rate_hz) {
  auto n = static_cast<std::size_t>(std::lround(width_s * rate_hz));
  return std::max<std::size_t>(n, 2);
}

MetricSeries metric_series(const Trace& trace, const std::vector<std::string>& elements,
                           MetricKind kind, const SeriesParams& params) {
  if (!trace.normalized()) raise(ErrorCode::InvalidArgument, "trace must be normalized");
  for (const auto& e : elements) {
    if (!trace.find(e)) raise(ErrorCode::UnknownElement, e);
  }
  const bool pairwise = kind != MetricKind::CoInformation;
  if (pairwise && elements.size() != 2) {
    raise(ErrorCode::InvalidArgument, "metric needs exactly 2 elements");
  }
  if (!pairwise && elements.size() < 3) {
    raise(ErrorCode::InvalidArgument, "co-information series needs >= 3 elements");
  }

  const auto& grid = trace.grid();
  const std::size_t n = grid.size();
  const std::size_t nw = window_samples(params.width_s, trace.rate_hz);
  MetricSeries series;
  if (n < nw) {
    raise(ErrorCode::WindowOutOfRange,
          "trace of " + std::to_string(n) + " frames cannot fit a " +
              std::to_string(nw) + "-sample window");
  }
  const std::size_t center_off = (nw - 1) / 2;

  std::vector<std::vector<Eigen::Vector3d>> positions;
  positions.reserve(elements.size());
  for (const auto& e : elements) {
    std::vector<Eigen::Vector3d> p(n);
    for (std::size_t k = 0; k < n; ++k) p[k] = trace.position_at(e, k);
    positions.push_back(std::move(p));
  }

  auto window_of = [&](const std::vector<Eigen::Vector3d>& p, std::size_t begin) {
    return std::span<const Eigen::Vector3d>(p.data() + begin, nw);
  };

  if (kind == MetricKind::MutualInformation || kind == MetricKind::CoInformation ||
      kind == MetricKind::Distance) {
    for (std::size_t begin = 0; begin + nw <= n; ++begin) {
      double value = 0.0;
      if (kind == MetricKind::MutualInformation) {
        value = pair_mi_3d(window_of(positions[0], begin), window_of(positions[1], begin),
                           params.bins, params.aggregate);
      } else if (kind == MetricKind::CoInformation) {
        std::vector<std::span<const Eigen::Vector3d>> windows;
        for (const auto& p : positions) windows.push_back(window_of(p, begin));
        value = co_information(windows, params.bins, params.aggregate);
      } else {
        double sum = 0.0;
        for (std::size_t i = 0; i < nw; ++i) {
          sum += (positions[0][begin + i] - positions[1][begin + i]).norm();
        }
        value = sum / static_cast<double>(nw);
      }
      series.timestamps.push_back(grid[begin + center_off]);
      series.values.push_back(value);
    }
    return series;
  }

  // DistanceEntropy: entropy of the smoothed (window-mean) distance signal,
  // evaluated over a second window of the same width.
  MetricSeries dbar = metric_series(trace, elements, MetricKind::Distance, params);
  const std::size_t m = dbar.values.size();
  if (m < nw) {
    raise(ErrorCode::WindowOutOfRange, "trace too short for distance-entropy windows");
  }
  for (std::size_t begin = 0; begin + nw <= m; ++begin) {
    std::span<const double> window(dbar.values.data() + begin, nw);
    series.timestamps.push_back(dbar.timestamps[begin + center_off]);
    series.values.push_back(entropy(discretize_fixed(window, params.dist_bin_m)));
  }
  return series;
}

}  // namespace bimoplan
