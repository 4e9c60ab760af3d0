#pragma once

// Spectral (viscosity) scheme for the 2D incompressible Euler equations in
// vorticity form,
//
//   d/dt eta + P_N(v . grad eta) = eps div((I - P_m) grad eta),  v = BS(eta),
//
// integrated with the three-stage SSP Runge-Kutta scheme in Shu-Osher form.
// A velocity-form twin is provided for cross-checking the two formulations.

#include "mvs/spectral.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace mvs {

struct FlowState {
    SpectralField eta;
    double time = 0.0;
    ViscositySpec visc;
    /// Test hook: when false the advection term is dropped (linear dynamics).
    bool nonlinear = true;

    const GridSpec& grid() const { return eta.grid(); }
};

struct StepControl {
    double cfl = 0.5;
    std::optional<double> dt_max;
    std::optional<double> dt_fixed;

    void validate() const;
    friend bool operator==(const StepControl&, const StepControl&) = default;
};

struct Snapshot {
    double time = 0.0;
    SpectralField eta;
    std::optional<SpectralField> tracer;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    std::vector<double> request_times;
};

/// Generic SSP-RK3 step u -> u+ for any state type with vector-space
/// operators. L maps a state to its time derivative.
template <class State, class Rhs>
State ssp_rk3(const State& u, double dt, Rhs&& L) {
    State u1 = u + dt * L(u);
    State u2 = 0.75 * u + 0.25 * (u1 + dt * L(u1));
    return (1.0 / 3.0) * u + (2.0 / 3.0) * (u2 + dt * L(u2));
}

/// P_N(v . grad phi) evaluated alias-free on the padded grid.
SpectralField advection(const VelocityField& vel, const SpectralField& phi);

/// -eps |k|^2 (Q phi)_k
SpectralField viscous_term(const SpectralField& phi, const ViscositySpec& visc);

SpectralField rhs_vorticity(const FlowState& state);

/// Velocity-form right-hand side: -Leray(P_N(v . grad v)) - eps |k|^2 Q v.
VelocityField rhs_velocity(const VelocityField& vel, const ViscositySpec& visc);

/// One SSP-RK3 step of the vorticity form. Throws DivergenceError if the
/// result contains non-finite coefficients.
FlowState ssp_rk3_step(const FlowState& state, double dt);

/// One SSP-RK3 step of the velocity form.
VelocityField ssp_rk3_step(const VelocityField& vel, const ViscositySpec& visc, double dt);

/// Largest stable step: advective CFL, explicit viscous limit, dt_max and
/// (if given) the remaining time to `next_time`.
double choose_dt(const FlowState& state, const StepControl& ctl,
                 std::optional<double> next_time = std::nullopt);

/// Advective CFL bound cfl*h/max(|v|_inf, 1e-8).
double advective_dt_bound(double max_speed, double spacing, double cfl);

/// Maximum pointwise speed |v| on the physical grid.
double max_speed(const VelocityField& vel);

using SnapshotObserver = std::function<void(const Snapshot&)>;

struct AdvanceOptions {
    /// Called once per snapshot, in time order.
    SnapshotObserver observer;
    bool retain_snapshots = true;
};

/// Evolves `state` to each requested time, landing exactly on it. The tracer,
/// when present, is advected by the same velocity with the same spectral
/// viscosity. On divergence the partial trajectory is discarded and the
/// DivergenceError propagates.
Trajectory advance(const FlowState& state, const std::vector<double>& request_times, const StepControl& ctl,
                   const std::optional<SpectralField>& tracer = std::nullopt, const AdvanceOptions& opts = {});

// ---- weak-form consistency ------------------------------------------------

/// Stream function chi with its first and second derivatives at a point.
struct StreamSample {
    double d1 = 0, d2 = 0;            // d chi / dx1, d chi / dx2
    double d11 = 0, d12 = 0, d22 = 0;  // second derivatives
};

/// Divergence-free space-time test function phi(x,t) = theta(t) grad-perp chi(x),
/// with theta a C-infinity bump supported in (t_start, t_end).
struct WeakTestFunction {
    std::function<StreamSample(double, double)> stream;
    double t_start = 0.0;
    double t_end = 1.0;

    double theta(double t) const;
    double theta_dot(double t) const;
};

/// Periodized Gaussian stream function centred at (c1, c2) with width s.
WeakTestFunction gaussian_stream_test(double c1, double c2, double width, double t_start, double t_end);

/// Incremental evaluation of
///   \int\int d_t phi . v + grad phi : v (x) v dx dt
/// by trapezoid in time over consecutive snapshots and grid quadrature in space.
class WeakResidual {
public:
    explicit WeakResidual(WeakTestFunction fn) : fn_(std::move(fn)) {}

    void add(const Snapshot& snap);
    double value() const { return total_; }

private:
    double integrand(const Snapshot& snap) const;

    WeakTestFunction fn_;
    std::optional<std::pair<double, double>> last_;  // (time, integrand)
    double total_ = 0.0;
};

double weak_residual(const Trajectory& traj, const WeakTestFunction& fn);

}  // namespace mvs
