#pragma once

// Monte Carlo approximation of measure-valued solutions: M independent
// perturbations of the initial datum are evolved with the spectral solver and
// reduced into per-gridpoint moment sums, probe records and retained lattice
// samples.

#include "mvs/flow.hpp"
#include "mvs/initial_data.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace mvs {

using Vec2 = std::array<double, 2>;

struct EnsembleConfig {
    InitialDataSpec base;  // base.seed is the ensemble's base seed
    int M = 1;
    GridSpec grid = GridSpec::with_default_padding(32);
    ViscositySpec visc;
    StepControl ctl;
    std::vector<double> request_times;
    std::vector<Vec2> probes;
    /// Side length of the retained sampling lattice (0 = none).
    int lattice = 0;
    /// Keep full vorticity snapshots of every s-th sample (0 = none).
    int retain_stride = 0;
    /// Test hook forwarded to FlowState::nonlinear.
    bool nonlinear = true;
    /// Advect a passive tracer alongside single-sample runs.
    bool tracer = false;

    std::uint64_t base_seed() const { return base.seed; }
    void validate() const;
    friend bool operator==(const EnsembleConfig&, const EnsembleConfig&) = default;
};

/// Per-gridpoint sums at one snapshot time.
struct MomentSums {
    std::vector<double> u, v, uu, uv, vv;

    explicit MomentSums(std::size_t points = 0) : u(points), v(points), uu(points), uv(points), vv(points) {}
    void add_sample(const PhysicalField& a, const PhysicalField& b);
    MomentSums& operator+=(const MomentSums& o);
    friend bool operator==(const MomentSums&, const MomentSums&) = default;
};

struct EnsembleAccumulator {
    int n = 0;  // physical grid size
    int count = 0;
    std::vector<double> times;
    std::vector<MomentSums> sums;  // one per time

    EnsembleAccumulator() = default;
    EnsembleAccumulator(int n, std::vector<double> times);

    /// Adds one sample given its velocity grids at every snapshot time.
    void add_sample(const std::vector<std::pair<PhysicalField, PhysicalField>>& velocity);
    EnsembleAccumulator& merge(const EnsembleAccumulator& o);
    friend bool operator==(const EnsembleAccumulator&, const EnsembleAccumulator&) = default;
};

struct ProbeRecord {
    Vec2 point{};
    int row = 0, col = 0;  // nearest grid node (x2 index, x1 index)
    std::vector<double> times;
    /// values[sample * times.size() + t]
    std::vector<Vec2> values;

    const Vec2& at(int sample, int time_index) const {
        return values[static_cast<std::size_t>(sample) * times.size() + time_index];
    }
    int samples() const { return times.empty() ? 0 : static_cast<int>(values.size() / times.size()); }
    friend bool operator==(const ProbeRecord&, const ProbeRecord&) = default;
};

/// Raw samples at an S x S lattice of grid nodes, the input for Wasserstein
/// distances.
struct LatticeSamples {
    int side = 0;
    int M = 0;
    std::vector<double> times;
    std::vector<int> nodes;  // grid index per lattice coordinate (same for x1 and x2)
    /// values[((sample * T + t) * side + a) * side + b], a = x2 index, b = x1 index
    std::vector<Vec2> values;

    const Vec2& at(int sample, int t, int a, int b) const {
        return values[((static_cast<std::size_t>(sample) * times.size() + t) * side + a) * side + b];
    }
    Vec2& at(int sample, int t, int a, int b) {
        return values[((static_cast<std::size_t>(sample) * times.size() + t) * side + a) * side + b];
    }
    /// All M samples at one lattice point and time.
    std::vector<Vec2> point_samples(int t, int a, int b) const;
    friend bool operator==(const LatticeSamples&, const LatticeSamples&) = default;
};

struct FailedSample {
    int index = 0;
    std::uint64_t seed = 0;
    double time = 0.0;
    std::string message;
};

struct RetainedSample {
    int index = 0;
    std::vector<Snapshot> snapshots;
};

struct EnsembleResult {
    EnsembleAccumulator acc;
    std::vector<ProbeRecord> probes;
    LatticeSamples lattice;
    std::vector<RetainedSample> retained;
    std::vector<FailedSample> failures;
};

/// Optional replacement of the per-sample initial condition (test hook for
/// synthetic ensembles). Must be a pure function of the sample index.
using InitialOverride = std::function<SpectralField(int sample)>;

/// Runs all M samples on `workers` threads. The output depends only on `cfg`:
/// samples are folded into the accumulator in index order regardless of which
/// worker finished first. Throws std::runtime_error when more than 1% of the
/// samples diverge.
EnsembleResult run_ensemble(const EnsembleConfig& cfg, int workers, const InitialOverride& override_ic = {});

/// One config per delta, sharing the base seed so that sample k uses the same
/// underlying draw (rescaled) at every delta.
std::vector<EnsembleConfig> perturbed_family(const EnsembleConfig& cfg, const std::vector<double>& deltas);

/// Grid node nearest to a physical point.
std::pair<int, int> nearest_node(const Vec2& x, int n);

}  // namespace mvs
