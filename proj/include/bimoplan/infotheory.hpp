#pragma once

#include <span>
#include <string>
#include <vector>

#include "bimoplan/trace.hpp"

namespace bimoplan {

/// Sliding analysis window: width_s seconds centered at center_t, B equal-width
/// bins per axis.
struct WindowSpec {
  double width_s = 1.0;
  double center_t = 0.0;
  int bins = 8;
};

enum class AxisAggregate { Mean, Sum };

struct MetricSeries {
  std::vector<double> timestamps;
  std::vector<double> values;
};

enum class MetricKind { MutualInformation, CoInformation, Distance, DistanceEntropy };

/// Equal-width binning over [min, max] of the window; the top bin is
/// right-closed. A constant signal maps every sample to bin 0.
std::vector<int> discretize(std::span<const double> signal, int bins);

/// Fixed-width binning anchored at zero: symbol = floor(value / bin_width).
/// Used for the distance channel, whose scale is absolute (meters).
std::vector<int> discretize_fixed(std::span<const double> signal, double bin_width);

/// Shannon entropy of the empirical symbol distribution, bits.
double entropy(std::span<const int> symbols);

/// Mutual information of the jointly binned empirical distributions, bits.
/// Each signal is discretized over its own window range with `bins` bins.
double mutual_information(std::span<const double> x, std::span<const double> y, int bins);
double mutual_information_symbols(std::span<const int> x, std::span<const int> y);

/// Per-axis mutual information of two position windows, aggregated over x/y/z.
double pair_mi_3d(std::span<const Eigen::Vector3d> a, std::span<const Eigen::Vector3d> b,
                  int bins, AxisAggregate aggregate = AxisAggregate::Mean);

/// Co-information over n >= 2 position windows: per axis, inclusion-exclusion
/// over the joint entropies of every non-empty variable subset, then
/// aggregated over axes. Reduces exactly to mutual information for n == 2.
/// May be negative for n >= 3.
double co_information(const std::vector<std::span<const Eigen::Vector3d>>& trajs, int bins,
                      AxisAggregate aggregate = AxisAggregate::Mean);

/// Miller-Madow adjusted variants used by the interaction detectors. The
/// finite-sample bias of the plug-in estimator at typical window sizes
/// (~(Bx-1)(By-1)/(2N ln2) bits) exceeds the detection thresholds, so the
/// detectors subtract it; the raw estimators above stay untouched.
double mutual_information_adjusted(std::span<const double> x, std::span<const double> y,
                                   int bins);
double pair_mi_3d_adjusted(std::span<const Eigen::Vector3d> a,
                           std::span<const Eigen::Vector3d> b, int bins,
                           AxisAggregate aggregate = AxisAggregate::Mean);
double co_information_adjusted(const std::vector<std::span<const Eigen::Vector3d>>& trajs,
                               int bins, AxisAggregate aggregate = AxisAggregate::Mean);

struct SeriesParams {
  double width_s = 1.0;
  int bins = 8;
  AxisAggregate aggregate = AxisAggregate::Mean;
  double dist_bin_m = 0.01;  // fixed bin width for the distance-entropy channel
};

/// Number of grid samples in one window at the trace rate (>= 2).
std::size_t window_samples(double width_s, double rate_hz);

/// Sliding-window series over a normalized trace, evaluated at every grid
/// timestamp where the full window fits. Distance is the window-mean Euclidean
/// distance; DistanceEntropy is the entropy of that smoothed distance signal
/// over a second window (so its valid range shrinks by one extra window).
MetricSeries metric_series(const Trace& trace, const std::vector<std::string>& elements,
                           MetricKind kind, const SeriesParams& params);

}  // namespace bimoplan
