#include "mvs/ensemble.hpp"

#include "mvs/errors.hpp"

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

namespace mvs {

void EnsembleConfig::validate() const {
    base.validate();
    if (M < 1) throw ConfigError("M must be >= 1");
    visc.validate(grid);
    ctl.validate();
    if (request_times.empty()) throw ConfigError("times: at least one snapshot time is required");
    if (request_times.front() < 0.0) throw ConfigError("times: must be >= 0");
    for (std::size_t i = 1; i < request_times.size(); ++i)
        if (!(request_times[i] > request_times[i - 1])) throw ConfigError("times: must be strictly increasing");
    for (const auto& p : probes)
        for (double x : p)
            if (!(x >= 0.0 && x < kTwoPi)) throw ConfigError("probes: points must lie in [0, 2pi)");
    if (lattice < 0 || lattice > grid.phys_n) throw ConfigError("lattice: must lie in [0, phys_n]");
    if (retain_stride < 0) throw ConfigError("retain_stride: must be >= 0");
}

// ---- accumulator -----------------------------------------------------------

void MomentSums::add_sample(const PhysicalField& a, const PhysicalField& b) {
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double x = a.values[i], y = b.values[i];
        u[i] += x;
        v[i] += y;
        uu[i] += x * x;
        uv[i] += x * y;
        vv[i] += y * y;
    }
}

MomentSums& MomentSums::operator+=(const MomentSums& o) {
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] += o.u[i];
        v[i] += o.v[i];
        uu[i] += o.uu[i];
        uv[i] += o.uv[i];
        vv[i] += o.vv[i];
    }
    return *this;
}

EnsembleAccumulator::EnsembleAccumulator(int n_, std::vector<double> times_)
    : n(n_), times(std::move(times_)), sums(times.size(), MomentSums(static_cast<std::size_t>(n_) * n_)) {}

void EnsembleAccumulator::add_sample(const std::vector<std::pair<PhysicalField, PhysicalField>>& velocity) {
    for (std::size_t t = 0; t < sums.size(); ++t) sums[t].add_sample(velocity[t].first, velocity[t].second);
    ++count;
}

EnsembleAccumulator& EnsembleAccumulator::merge(const EnsembleAccumulator& o) {
    for (std::size_t t = 0; t < sums.size(); ++t) sums[t] += o.sums[t];
    count += o.count;
    return *this;
}

std::vector<Vec2> LatticeSamples::point_samples(int t, int a, int b) const {
    std::vector<Vec2> out(M);
    for (int s = 0; s < M; ++s) out[s] = at(s, t, a, b);
    return out;
}

std::pair<int, int> nearest_node(const Vec2& x, int n) {
    const double h = kTwoPi / n;
    auto idx = [&](double c) { return static_cast<int>(std::lround(c / h)) % n; };
    return {idx(x[1]), idx(x[0])};
}

// ---- driver ------------------------------------------------------------------

namespace {

struct SampleOutput {
    bool failed = false;
    FailedSample failure;
    std::vector<std::pair<PhysicalField, PhysicalField>> velocity;  // per time
    std::vector<Snapshot> retained;
};

SampleOutput run_sample(const EnsembleConfig& cfg, int k, const InitialOverride& override_ic) {
    SampleOutput out;
    FlowState state;
    state.eta = override_ic ? override_ic(k) : make_initial_condition(cfg.base, cfg.grid, k).eta;
    state.visc = cfg.visc;
    state.nonlinear = cfg.nonlinear;
    const bool retain = cfg.retain_stride > 0 && k % cfg.retain_stride == 0;

    AdvanceOptions opts;
    opts.retain_snapshots = retain;
    opts.observer = [&](const Snapshot& snap) {
        const VelocityField vel = biot_savart(snap.eta);
        out.velocity.emplace_back(synthesize(vel.u), synthesize(vel.v));
    };
    try {
        Trajectory traj = advance(state, cfg.request_times, cfg.ctl, std::nullopt, opts);
        if (retain) out.retained = std::move(traj.snapshots);
    } catch (const DivergenceError& e) {
        out = SampleOutput{};
        out.failed = true;
        out.failure = FailedSample{k, cfg.base.seed, e.time(), e.what()};
    }
    return out;
}

}  // namespace

EnsembleResult run_ensemble(const EnsembleConfig& cfg, int workers, const InitialOverride& override_ic) {
    cfg.validate();
    if (workers < 1) throw ConfigError("workers must be >= 1");
    const int M = cfg.M;
    const int n = cfg.grid.phys_n;
    const std::size_t T = cfg.request_times.size();
    const std::size_t max_failures = static_cast<std::size_t>(std::floor(0.01 * M));

    EnsembleResult result;
    result.acc = EnsembleAccumulator(n, cfg.request_times);

    for (const auto& p : cfg.probes) {
        ProbeRecord rec;
        rec.point = p;
        std::tie(rec.row, rec.col) = nearest_node(p, n);
        rec.times = cfg.request_times;
        rec.values.assign(static_cast<std::size_t>(M) * T, Vec2{NAN, NAN});
        result.probes.push_back(std::move(rec));
    }
    LatticeSamples& lat = result.lattice;
    if (cfg.lattice > 0) {
        lat.side = cfg.lattice;
        lat.M = M;
        lat.times = cfg.request_times;
        for (int a = 0; a < cfg.lattice; ++a)
            lat.nodes.push_back(static_cast<int>(std::lround(static_cast<double>(a) * n / cfg.lattice)) % n);
        lat.values.assign(static_cast<std::size_t>(M) * T * cfg.lattice * cfg.lattice, Vec2{NAN, NAN});
    }

    std::mutex mu;
    std::condition_variable cv;
    std::map<int, SampleOutput> pending;
    int next_fold = 0;
    bool aborted = false;
    std::atomic<int> next_sample{0};

    // Folds finished samples strictly in index order. Caller holds `mu`.
    auto fold_ready = [&] {
        while (!pending.empty() && pending.begin()->first == next_fold) {
            SampleOutput s = std::move(pending.begin()->second);
            pending.erase(pending.begin());
            const int k = next_fold++;
            if (s.failed) {
                result.failures.push_back(std::move(s.failure));
                if (result.failures.size() > max_failures) aborted = true;
                continue;
            }
            result.acc.add_sample(s.velocity);
            for (auto& rec : result.probes)
                for (std::size_t t = 0; t < T; ++t)
                    rec.values[k * T + t] = {s.velocity[t].first(rec.row, rec.col),
                                             s.velocity[t].second(rec.row, rec.col)};
            for (int a = 0; a < lat.side; ++a)
                for (int b = 0; b < lat.side; ++b)
                    for (std::size_t t = 0; t < T; ++t)
                        lat.at(k, static_cast<int>(t), a, b) = {s.velocity[t].first(lat.nodes[a], lat.nodes[b]),
                                                                s.velocity[t].second(lat.nodes[a], lat.nodes[b])};
            if (!s.retained.empty()) result.retained.push_back({k, std::move(s.retained)});
        }
    };

    auto worker = [&] {
        for (;;) {
            {
                std::unique_lock lock(mu);
                // Bound the reorder buffer so memory stays O(workers).
                cv.wait(lock, [&] { return aborted || pending.size() < static_cast<std::size_t>(2 * workers); });
                if (aborted) return;
            }
            const int k = next_sample.fetch_add(1);
            if (k >= M) return;
            SampleOutput out = run_sample(cfg, k, override_ic);
            std::lock_guard lock(mu);
            pending.emplace(k, std::move(out));
            fold_ready();
            cv.notify_all();
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (aborted || result.failures.size() > max_failures) {
        const auto& f = result.failures.front();
        throw std::runtime_error("ensemble aborted: " + std::to_string(result.failures.size()) +
                                 " failed samples (first: sample " + std::to_string(f.index) + ", seed " +
                                 std::to_string(f.seed) + ", t = " + std::to_string(f.time) + ")");
    }
    return result;
}

std::vector<EnsembleConfig> perturbed_family(const EnsembleConfig& cfg, const std::vector<double>& deltas) {
    if (deltas.empty()) throw ConfigError("perturbed_family: empty delta list");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0)) throw ConfigError("perturbed_family: deltas must be positive");
        if (i > 0 && !(deltas[i] < deltas[i - 1])) throw ConfigError("perturbed_family: deltas must decrease");
    }
    std::vector<EnsembleConfig> out;
    for (double d : deltas) {
        EnsembleConfig c = cfg;
        c.base.delta = d;
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace mvs
