#pragma once

#include "mvs/ensemble.hpp"

#include <span>
#include <string>
#include <vector>

namespace mvs {

/// Per-gridpoint one- and two-point statistics at one time.
struct MomentFields {
    int n = 0;
    int M = 0;
    double time = 0.0;
    std::vector<double> mean_u, mean_v;
    std::vector<double> second_uu, second_uv, second_vv;
    /// tr(second - mean (x) mean), clamped at 0.
    std::vector<double> variance;
    std::vector<double> variance_u, variance_v;
};

/// Moments at every snapshot time of the accumulator. Throws ConfigError on an
/// empty ensemble.
std::vector<MomentFields> moments(const EnsembleAccumulator& acc);
MomentFields moments(const EnsembleAccumulator& acc, std::size_t time_index);

/// Squared L2 distance between two velocity fields at possibly different
/// resolutions.
double cauchy_rate(const VelocityField& a, const VelocityField& b);
/// Squared L2 distance between two grid quantities, each band-limited to its
/// own grid's cutoff before comparison.
double field_distance(std::span<const double> a, const GridSpec& ga, std::span<const double> b, const GridSpec& gb);

/// Exact optimal assignment: returns perm with row i matched to column perm[i]
/// minimizing sum cost[i][perm[i]]. `cost` is n x n row-major.
std::vector<int> solve_assignment(std::span<const double> cost, int n);

/// 1-Wasserstein distance between two equal-size empirical measures in R^2.
double wasserstein1(std::span<const Vec2> a, std::span<const Vec2> b);

/// Spatial average of W1 over the retained lattice at one time index.
double mean_wasserstein(const LatticeSamples& a, const LatticeSamples& b, std::size_t time_index, int stride = 1);
/// Average of W1 over matching probe records at one time index.
double mean_wasserstein(const std::vector<ProbeRecord>& a, const std::vector<ProbeRecord>& b, std::size_t time_index);

struct Histogram {
    std::vector<double> edges;  // bins + 1
    std::vector<int> counts;
};

Histogram histogram(std::span<const double> values, int bins);
Histogram histogram_at(const ProbeRecord& probe, std::size_t time_index, int component, int bins);

struct SpreadSeries {
    std::vector<double> times;
    std::vector<double> values;
    double window_lo = 2.0, window_hi = 4.0;
    double slope = 0.0, intercept = 0.0;
};

struct LineFit {
    double slope = 0.0, intercept = 0.0;
};

/// Ordinary least squares through (x, y).
LineFit least_squares(std::span<const double> x, std::span<const double> y);

/// Grid integral h^2 sum Var at each time, with a line fitted over the window.
SpreadSeries avg_variance_series(const std::vector<MomentFields>& m, double window_lo = 2.0,
                                 double window_hi = 4.0);
/// Same, for precomputed (time, value) pairs.
SpreadSeries spread_series(std::vector<double> times, std::vector<double> values, double window_lo = 2.0,
                           double window_hi = 4.0);

inline constexpr double kSpreadBound = 5.7;
inline constexpr double kSpreadBoundSlack = 0.05;
inline constexpr double kReportedSpreadRate = 1.8;

struct BoundReport {
    bool pass = true;
    double worst_time = 0.0;
    double worst_value = 0.0;
    /// max over t > 0 of value / (bound * t)
    double worst_ratio = 0.0;
    double empirical_slope = 0.0;
    std::string message;
};

/// Checks values[i] <= 5.7 t_i (1 + 5%) for every t_i > 0.
BoundReport variance_bound_check(const SpreadSeries& series, double bound = kSpreadBound,
                                 double slack = kSpreadBoundSlack);

struct Profile {
    std::vector<double> x2;
    std::vector<double> values;
};

/// Nearest-column profile of a grid quantity at abscissa x1.
Profile slice(std::span<const double> field, int n, double x1);

/// Returned when one of the signed sets is empty: the diameter of [0, 2pi]^2.
inline constexpr double kSeparationSentinel = 2.0 * kTwoPi * 1.4142135623730950488;

/// Minimum periodic distance between nodes with eta > threshold and nodes with
/// eta < -threshold.
double sign_separation(const PhysicalField& eta, double threshold);

/// Squared periodic distance (in grid units) from every node to the nearest
/// marked node; infinity when nothing is marked.
std::vector<double> periodic_distance_transform(const std::vector<char>& marked, int n);

}  // namespace mvs
