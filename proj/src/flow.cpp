#include "mvs/flow.hpp"

#include "mvs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mvs {

void StepControl::validate() const {
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("step control: cfl must lie in (0, 1]");
    if (dt_max && !(*dt_max > 0.0)) throw ConfigError("step control: dt_max must be positive");
    if (dt_fixed && !(*dt_fixed > 0.0)) throw ConfigError("step control: dt_fixed must be positive");
}

SpectralField advection(const VelocityField& vel, const SpectralField& phi) {
    const PhysicalField u = synthesize(vel.u);
    const PhysicalField v = synthesize(vel.v);
    const PhysicalField g1 = synthesize(d_dx1(phi));
    const PhysicalField g2 = synthesize(d_dx2(phi));
    PhysicalField prod(u.n);
    for (std::size_t i = 0; i < prod.values.size(); ++i)
        prod.values[i] = u.values[i] * g1.values[i] + v.values[i] * g2.values[i];
    SpectralField out = forward_transform(prod, phi.grid());
    out.at(0, 0) = 0.0;
    return out;
}

SpectralField viscous_term(const SpectralField& phi, const ViscositySpec& visc) {
    SpectralField out = phi;
    const double eps = visc.epsilon;
    out.for_each_mode([&](int k1, int k2, Complex& c) {
        if (band_norm(k1, k2) <= visc.m) {
            c = 0.0;
            return;
        }
        c *= -eps * (static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
    });
    return out;
}

namespace {

SpectralField vorticity_rhs(const SpectralField& eta, const ViscositySpec& visc, bool nonlinear) {
    SpectralField rhs = viscous_term(eta, visc);
    if (nonlinear) rhs -= advection(biot_savart(eta), eta);
    return rhs;
}

void check_finite(const SpectralField& f, double time) {
    if (!f.all_finite()) {
        std::ostringstream os;
        os << "solver diverged: non-finite coefficients at t = " << time;
        throw DivergenceError(time, os.str());
    }
}

/// Vorticity together with a passive scalar, stepped in lockstep.
struct Coupled {
    SpectralField eta;
    SpectralField phi;

    Coupled& operator+=(const Coupled& o) { eta += o.eta; phi += o.phi; return *this; }
    Coupled& operator*=(double s) { eta *= s; phi *= s; return *this; }
    friend Coupled operator+(Coupled a, const Coupled& b) { return a += b; }
    friend Coupled operator*(double s, Coupled a) { return a *= s; }
};

}  // namespace

SpectralField rhs_vorticity(const FlowState& state) {
    return vorticity_rhs(state.eta, state.visc, state.nonlinear);
}

VelocityField rhs_velocity(const VelocityField& vel, const ViscositySpec& visc) {
    VelocityField adv = leray_project(advection(vel, vel.u), advection(vel, vel.v));
    VelocityField rhs{viscous_term(vel.u, visc), viscous_term(vel.v, visc)};
    rhs -= adv;
    return rhs;
}

FlowState ssp_rk3_step(const FlowState& state, double dt) {
    FlowState next = state;
    next.eta = ssp_rk3(state.eta, dt, [&](const SpectralField& e) {
        return vorticity_rhs(e, state.visc, state.nonlinear);
    });
    next.time = state.time + dt;
    check_finite(next.eta, next.time);
    return next;
}

VelocityField ssp_rk3_step(const VelocityField& vel, const ViscositySpec& visc, double dt) {
    return ssp_rk3(vel, dt, [&](const VelocityField& w) { return rhs_velocity(w, visc); });
}

double max_speed(const VelocityField& vel) {
    const PhysicalField u = synthesize(vel.u);
    const PhysicalField v = synthesize(vel.v);
    double m2 = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i)
        m2 = std::max(m2, u.values[i] * u.values[i] + v.values[i] * v.values[i]);
    return std::sqrt(m2);
}

double advective_dt_bound(double speed, double spacing, double cfl) {
    return cfl * spacing / std::max(speed, 1e-8);
}

double choose_dt(const FlowState& state, const StepControl& ctl, std::optional<double> next_time) {
    double dt = std::numeric_limits<double>::infinity();
    if (ctl.dt_fixed) {
        dt = *ctl.dt_fixed;
    } else {
        const double h = state.grid().spacing();
        const double speed = state.nonlinear ? max_speed(biot_savart(state.eta)) : 0.0;
        dt = advective_dt_bound(speed, h, ctl.cfl);
        if (state.visc.epsilon > 0.0) dt = std::min(dt, h * h / (4.0 * state.visc.epsilon));
        if (ctl.dt_max) dt = std::min(dt, *ctl.dt_max);
    }
    if (next_time) dt = std::min(dt, *next_time - state.time);
    return dt;
}

Trajectory advance(const FlowState& initial, const std::vector<double>& request_times, const StepControl& ctl,
                   const std::optional<SpectralField>& tracer, const AdvanceOptions& opts) {
    ctl.validate();
    if (request_times.empty()) throw ConfigError("advance: no request times");
    if (request_times.front() < initial.time)
        throw ConfigError("advance: first request time precedes the state time");
    for (std::size_t i = 1; i < request_times.size(); ++i)
        if (!(request_times[i] > request_times[i - 1]))
            throw ConfigError("advance: request times must be strictly increasing");

    Trajectory traj;
    traj.request_times = request_times;
    FlowState state = initial;
    std::optional<SpectralField> phi = tracer;

    auto emit = [&](double t) {
        Snapshot snap{t, state.eta, phi};
        if (opts.observer) opts.observer(snap);
        if (opts.retain_snapshots) traj.snapshots.push_back(std::move(snap));
    };

    for (double target : request_times) {
        while (state.time < target) {
            const double remaining = target - state.time;
            double dt = choose_dt(state, ctl, target);
            const bool lands = remaining - dt <= 1e-9 * dt;
            if (lands) dt = remaining;

            if (phi) {
                const ViscositySpec visc = state.visc;
                const bool nonlinear = state.nonlinear;
                Coupled next = ssp_rk3(Coupled{state.eta, *phi}, dt, [&](const Coupled& c) {
                    Coupled d{viscous_term(c.eta, visc), viscous_term(c.phi, visc)};
                    if (nonlinear) {
                        const VelocityField vel = biot_savart(c.eta);
                        d.eta -= advection(vel, c.eta);
                        d.phi -= advection(vel, c.phi);
                    }
                    return d;
                });
                state.time += dt;
                check_finite(next.eta, state.time);
                check_finite(next.phi, state.time);
                state.eta = std::move(next.eta);
                phi = std::move(next.phi);
            } else {
                state = ssp_rk3_step(state, dt);
            }
            if (lands) state.time = target;
        }
        emit(target);
    }
    return traj;
}

// ---- weak-form consistency ------------------------------------------------

double WeakTestFunction::theta(double t) const {
    if (t <= t_start || t >= t_end) return 0.0;
    const double s = (2.0 * t - (t_start + t_end)) / (t_end - t_start);
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double WeakTestFunction::theta_dot(double t) const {
    if (t <= t_start || t >= t_end) return 0.0;
    const double s = (2.0 * t - (t_start + t_end)) / (t_end - t_start);
    const double q = 1.0 - s * s;
    return theta(t) * (-2.0 * s / (q * q)) * (2.0 / (t_end - t_start));
}

WeakTestFunction gaussian_stream_test(double c1, double c2, double width, double t_start, double t_end) {
    WeakTestFunction fn;
    fn.t_start = t_start;
    fn.t_end = t_end;
    const double s2 = width * width;
    fn.stream = [=](double x1, double x2) {
        StreamSample out;
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b) {
                const double r1 = x1 - c1 - kTwoPi * a;
                const double r2 = x2 - c2 - kTwoPi * b;
                const double g = std::exp(-(r1 * r1 + r2 * r2) / (2.0 * s2));
                out.d1 += -r1 / s2 * g;
                out.d2 += -r2 / s2 * g;
                out.d11 += (r1 * r1 / (s2 * s2) - 1.0 / s2) * g;
                out.d22 += (r2 * r2 / (s2 * s2) - 1.0 / s2) * g;
                out.d12 += r1 * r2 / (s2 * s2) * g;
            }
        return out;
    };
    return fn;
}

double WeakResidual::integrand(const Snapshot& snap) const {
    const double th = fn_.theta(snap.time);
    const double th_dot = fn_.theta_dot(snap.time);
    if (th == 0.0 && th_dot == 0.0) return 0.0;

    const VelocityField vel = biot_savart(snap.eta);
    const PhysicalField u = synthesize(vel.u);
    const PhysicalField v = synthesize(vel.v);
    const int n = u.n;
    const double h = kTwoPi / n;
    double transport = 0.0;  // \int phi_s . v
    double flux = 0.0;       // \int grad phi_s : v (x) v
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const StreamSample s = fn_.stream(h * j, h * i);
            const double a = u(i, j), b = v(i, j);
            transport += -s.d2 * a + s.d1 * b;
            // phi = (-chi_2, chi_1); sum_ij d_j phi_i v_i v_j
            flux += -s.d12 * a * a - s.d22 * a * b + s.d11 * b * a + s.d12 * b * b;
        }
    return h * h * (th_dot * transport + th * flux);
}

void WeakResidual::add(const Snapshot& snap) {
    const double g = integrand(snap);
    if (last_) total_ += 0.5 * (snap.time - last_->first) * (g + last_->second);
    last_ = {snap.time, g};
}

double weak_residual(const Trajectory& traj, const WeakTestFunction& fn) {
    WeakResidual acc(fn);
    for (const auto& s : traj.snapshots) acc.add(s);
    return acc.value();
}

}  // namespace mvs
