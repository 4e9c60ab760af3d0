#include "mvs/statistics.hpp"

#include "mvs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mvs {

// ---- moments -----------------------------------------------------------------

MomentFields moments(const EnsembleAccumulator& acc, std::size_t t) {
    if (acc.count < 1) throw ConfigError("moments: empty ensemble");
    const MomentSums& s = acc.sums.at(t);
    const double inv = 1.0 / acc.count;
    const std::size_t P = s.u.size();
    MomentFields m;
    m.n = acc.n;
    m.M = acc.count;
    m.time = acc.times.at(t);
    m.mean_u.resize(P);
    m.mean_v.resize(P);
    m.second_uu.resize(P);
    m.second_uv.resize(P);
    m.second_vv.resize(P);
    m.variance.resize(P);
    m.variance_u.resize(P);
    m.variance_v.resize(P);
    for (std::size_t i = 0; i < P; ++i) {
        m.mean_u[i] = s.u[i] * inv;
        m.mean_v[i] = s.v[i] * inv;
        m.second_uu[i] = s.uu[i] * inv;
        m.second_uv[i] = s.uv[i] * inv;
        m.second_vv[i] = s.vv[i] * inv;
        m.variance_u[i] = std::max(0.0, m.second_uu[i] - m.mean_u[i] * m.mean_u[i]);
        m.variance_v[i] = std::max(0.0, m.second_vv[i] - m.mean_v[i] * m.mean_v[i]);
        m.variance[i] = m.variance_u[i] + m.variance_v[i];
    }
    return m;
}

std::vector<MomentFields> moments(const EnsembleAccumulator& acc) {
    std::vector<MomentFields> out;
    for (std::size_t t = 0; t < acc.times.size(); ++t) out.push_back(moments(acc, t));
    return out;
}

double cauchy_rate(const VelocityField& a, const VelocityField& b) { return squared_l2_distance(a, b); }

double field_distance(std::span<const double> a, const GridSpec& ga, std::span<const double> b, const GridSpec& gb) {
    return squared_l2_distance(forward_transform(a, ga), forward_transform(b, gb));
}

// ---- optimal transport ---------------------------------------------------------

std::vector<int> solve_assignment(std::span<const double> cost, int n) {
    // Shortest augmenting path with dual potentials (Hungarian method), O(n^3).
    // Index 0 is a virtual column; rows and columns are 1-based internally.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);  // match[col] = row
    for (int row = 1; row <= n; ++row) {
        match[0] = row;
        int col0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[col0] = 1;
            const int r = match[col0];
            double delta = inf;
            int col1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[static_cast<std::size_t>(r - 1) * n + (j - 1)] - u[r] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = col0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    col1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            col0 = col1;
        } while (match[col0] != 0);
        do {
            const int col1 = way[col0];
            match[col0] = match[col1];
            col0 = col1;
        } while (col0 != 0);
    }
    std::vector<int> perm(n);
    for (int j = 1; j <= n; ++j) perm[match[j] - 1] = j - 1;
    return perm;
}

double wasserstein1(std::span<const Vec2> a, std::span<const Vec2> b) {
    if (a.size() != b.size())
        throw ConfigError("wasserstein1: sample counts differ (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
    const int n = static_cast<int>(a.size());
    if (n == 0) return 0.0;
    std::vector<double> cost(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cost[static_cast<std::size_t>(i) * n + j] = std::hypot(a[i][0] - b[j][0], a[i][1] - b[j][1]);
    const std::vector<int> perm = solve_assignment(cost, n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += cost[static_cast<std::size_t>(i) * n + perm[i]];
    return total / n;
}

double mean_wasserstein(const LatticeSamples& a, const LatticeSamples& b, std::size_t t, int stride) {
    if (a.side != b.side || a.M != b.M)
        throw ConfigError("mean_wasserstein: lattices or sample counts differ");
    if (stride < 1) throw ConfigError("mean_wasserstein: stride must be >= 1");
    double total = 0.0;
    int count = 0;
    for (int i = 0; i < a.side; i += stride)
        for (int j = 0; j < a.side; j += stride) {
            const auto sa = a.point_samples(static_cast<int>(t), i, j);
            const auto sb = b.point_samples(static_cast<int>(t), i, j);
            total += wasserstein1(sa, sb);
            ++count;
        }
    return count ? total / count : 0.0;
}

double mean_wasserstein(const std::vector<ProbeRecord>& a, const std::vector<ProbeRecord>& b, std::size_t t) {
    if (a.size() != b.size()) throw ConfigError("mean_wasserstein: probe sets differ");
    double total = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) {
        std::vector<Vec2> sa, sb;
        for (int s = 0; s < a[p].samples(); ++s) sa.push_back(a[p].at(s, static_cast<int>(t)));
        for (int s = 0; s < b[p].samples(); ++s) sb.push_back(b[p].at(s, static_cast<int>(t)));
        total += wasserstein1(sa, sb);
    }
    return a.empty() ? 0.0 : total / a.size();
}

// ---- histograms ----------------------------------------------------------------

Histogram histogram(std::span<const double> values, int bins) {
    if (bins < 2) throw ConfigError("histogram: bins must be >= 2");
    if (values.empty()) throw ConfigError("histogram: no values");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it, hi = *hi_it;
    double pad = 0.01 * (hi - lo);
    if (pad == 0.0) pad = 0.01 * std::max(std::abs(lo), 1.0);
    lo -= pad;
    hi += pad;
    Histogram h;
    h.counts.assign(bins, 0);
    h.edges.resize(bins + 1);
    const double width = (hi - lo) / bins;
    for (int b = 0; b <= bins; ++b) h.edges[b] = lo + width * b;
    for (double x : values) {
        int b = static_cast<int>((x - lo) / width);
        h.counts[std::clamp(b, 0, bins - 1)] += 1;
    }
    return h;
}

Histogram histogram_at(const ProbeRecord& probe, std::size_t t, int component, int bins) {
    if (component != 1 && component != 2) throw ConfigError("histogram_at: component must be 1 or 2");
    std::vector<double> vals;
    for (int s = 0; s < probe.samples(); ++s) {
        const double x = probe.at(s, static_cast<int>(t))[component - 1];
        if (std::isfinite(x)) vals.push_back(x);
    }
    return histogram(vals, bins);
}

// ---- spread of the turbulence zone ------------------------------------------------

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    return f;
}

SpreadSeries spread_series(std::vector<double> times, std::vector<double> values, double lo, double hi) {
    if (times.size() != values.size()) throw ConfigError("spread: ragged series");
    if (times.size() < 2) throw ConfigError("spread: at least two times are required");
    SpreadSeries s;
    s.times = std::move(times);
    s.values = std::move(values);
    s.window_lo = lo;
    s.window_hi = hi;
    std::vector<double> wx, wy;
    for (std::size_t i = 0; i < s.times.size(); ++i)
        if (s.times[i] >= lo - 1e-12 && s.times[i] <= hi + 1e-12) {
            wx.push_back(s.times[i]);
            wy.push_back(s.values[i]);
        }
    if (wx.size() < 2)
        throw ConfigError("spread: fit window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "] holds fewer than two snapshots");
    const LineFit f = least_squares(wx, wy);
    s.slope = f.slope;
    s.intercept = f.intercept;
    return s;
}

SpreadSeries avg_variance_series(const std::vector<MomentFields>& m, double lo, double hi) {
    std::vector<double> times, values;
    for (const auto& f : m) {
        const double h = kTwoPi / f.n;
        double s = 0.0;
        for (double x : f.variance) s += x;
        times.push_back(f.time);
        values.push_back(h * h * s);
    }
    return spread_series(std::move(times), std::move(values), lo, hi);
}

BoundReport variance_bound_check(const SpreadSeries& series, double bound, double slack) {
    BoundReport r;
    r.empirical_slope = series.slope;
    bool first = true;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double t = series.times[i];
        if (t <= 0.0) continue;
        const double limit = bound * t * (1.0 + slack);
        const double ratio = series.values[i] / (bound * t);
        if (first || ratio > r.worst_ratio) {
            first = false;
            r.worst_ratio = ratio;
            r.worst_time = t;
            r.worst_value = series.values[i];
        }
        if (series.values[i] > limit) r.pass = false;
    }
    if (!r.pass)
        r.message = "variance bound violated: worst at t = " + std::to_string(r.worst_time) +
                    " with value " + std::to_string(r.worst_value) + " > " +
                    std::to_string(bound * (1.0 + slack)) + " * t";
    return r;
}

Profile slice(std::span<const double> field, int n, double x1) {
    if (!(x1 >= 0.0 && x1 <= kTwoPi)) throw ConfigError("slice: x1 outside the domain");
    if (field.size() != static_cast<std::size_t>(n) * n) throw ConfigError("slice: field size mismatch");
    const double h = kTwoPi / n;
    const int col = static_cast<int>(std::lround(x1 / h)) % n;
    Profile p;
    for (int i = 0; i < n; ++i) {
        p.x2.push_back(h * i);
        p.values.push_back(field[static_cast<std::size_t>(i) * n + col]);
    }
    return p;
}

// ---- sign separation ----------------------------------------------------------

namespace {

/// d[p] = min_q ((p - q)^2 + f[q]) over periodic images of q; Felzenszwalb's
/// lower envelope of parabolas over three periods.
void periodic_envelope(const std::vector<double>& f, int n, std::vector<double>& d) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> pos, val;
    for (int rep = -1; rep <= 1; ++rep)
        for (int q = 0; q < n; ++q)
            if (std::isfinite(f[q])) {
                pos.push_back(q + rep * n);
                val.push_back(f[q]);
            }
    d.assign(n, inf);
    if (pos.empty()) return;
    const std::size_t m = pos.size();
    std::vector<std::size_t> hull(m);
    std::vector<double> z(m + 1);
    std::size_t k = 0;
    hull[0] = 0;
    z[0] = -inf;
    z[1] = inf;
    auto cross = [&](std::size_t q, std::size_t r) {
        return ((val[q] + pos[q] * pos[q]) - (val[r] + pos[r] * pos[r])) / (2.0 * (pos[q] - pos[r]));
    };
    for (std::size_t q = 1; q < m; ++q) {
        double s = cross(q, hull[k]);
        while (s <= z[k]) s = cross(q, hull[--k]);  // z[0] = -inf stops the walk
        ++k;
        hull[k] = q;
        z[k] = s;
        z[k + 1] = inf;
    }
    std::size_t j = 0;
    for (int p = 0; p < n; ++p) {
        while (z[j + 1] < p) ++j;
        const double dp = p - pos[hull[j]];
        d[p] = dp * dp + val[hull[j]];
    }
}

}  // namespace

std::vector<double> periodic_distance_transform(const std::vector<char>& marked, int n) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> rows(static_cast<std::size_t>(n) * n, inf);
    std::vector<double> f(n), d;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) f[j] = marked[static_cast<std::size_t>(i) * n + j] ? 0.0 : inf;
        periodic_envelope(f, n, d);
        std::copy(d.begin(), d.end(), rows.begin() + static_cast<std::ptrdiff_t>(i) * n);
    }
    std::vector<double> out(rows.size(), inf);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) f[i] = rows[static_cast<std::size_t>(i) * n + j];
        periodic_envelope(f, n, d);
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i) * n + j] = d[i];
    }
    return out;
}

double sign_separation(const PhysicalField& eta, double threshold) {
    if (!(threshold > 0.0)) throw ConfigError("sign_separation: threshold must be positive");
    const int n = eta.n;
    std::vector<char> negative(eta.values.size(), 0);
    bool any_pos = false, any_neg = false;
    for (std::size_t i = 0; i < eta.values.size(); ++i) {
        negative[i] = eta.values[i] < -threshold;
        any_neg = any_neg || negative[i];
        any_pos = any_pos || eta.values[i] > threshold;
    }
    if (!any_pos || !any_neg) return kSeparationSentinel;
    const std::vector<double> dist2 = periodic_distance_transform(negative, n);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < eta.values.size(); ++i)
        if (eta.values[i] > threshold) best = std::min(best, dist2[i]);
    return std::sqrt(best) * (kTwoPi / n);
}

}  // namespace mvs
