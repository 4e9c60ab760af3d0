#include "mvs/spectral.hpp"

#include "fft.hpp"
#include "mvs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mvs {

// ---- grid ----------------------------------------------------------------

GridSpec::GridSpec(int cutoff_N, int phys) : cutoff(cutoff_N), phys_n(phys) {
    if (cutoff < 4) throw ConfigError("grid: cutoff N must be >= 4, got " + std::to_string(cutoff));
    if (phys_n % 2 != 0) throw ConfigError("grid: phys_n must be even, got " + std::to_string(phys_n));
    if (phys_n <= 3 * cutoff)
        throw ConfigError("grid: phys_n must exceed 3N for alias-free products (N=" +
                          std::to_string(cutoff) + ", phys_n=" + std::to_string(phys_n) + ")");
}

int GridSpec::default_phys_n(int cutoff_N) {
    auto smooth = [](int n) {
        for (int p : {2, 3, 5, 7})
            while (n % p == 0) n /= p;
        return n == 1;
    };
    int n = (3 * cutoff_N / 16 + 1) * 16;
    while (!smooth(n)) n += 16;
    return n;
}

GridSpec GridSpec::with_default_padding(int cutoff_N) { return GridSpec(cutoff_N, default_phys_n(cutoff_N)); }

ViscositySpec ViscositySpec::tadmor(int cutoff_N) {
    return ViscositySpec{1.0 / cutoff_N, static_cast<int>(std::floor(std::sqrt(static_cast<double>(cutoff_N))))};
}

void ViscositySpec::validate(const GridSpec& grid) const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("viscosity: epsilon must be >= 0");
    if (m < 0 || m > grid.cutoff) throw ConfigError("viscosity: m must lie in [0, N]");
}

// ---- SpectralField -------------------------------------------------------

SpectralField::SpectralField(const GridSpec& grid)
    : grid_(grid), coeffs_(static_cast<std::size_t>(grid.band_width()) * grid.band_width()) {}

double SpectralField::hermitian_defect() const {
    double worst = 0.0;
    const int n = cutoff();
    for (int k2 = -n; k2 <= n; ++k2)
        for (int k1 = -n; k1 <= n; ++k1)
            worst = std::max(worst, std::abs(at(k1, k2) - std::conj(at(-k1, -k2))));
    return worst;
}

double SpectralField::max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

bool SpectralField::all_finite() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [](const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& o) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * o.coeffs_[i];
    return *this;
}

double PhysicalField::max_abs() const {
    double m = 0.0;
    for (double x : values) m = std::max(m, std::abs(x));
    return m;
}

// ---- transforms ----------------------------------------------------------

namespace {

// Reused per thread; fresh multi-megabyte buffers cost more than the FFT.
std::span<Complex> half_spectrum_scratch(std::size_t size) {
    thread_local std::vector<Complex> buf;
    if (buf.size() < size) buf.resize(size);
    return {buf.data(), size};
}

}  // namespace

SpectralField forward_transform(std::span<const double> samples, const GridSpec& grid) {
    const int n = grid.phys_n;
    if (samples.size() != grid.phys_size())
        throw ConfigError("forward_transform: expected " + std::to_string(grid.phys_size()) +
                          " samples, got " + std::to_string(samples.size()));
    const int half = n / 2 + 1;
    std::span<Complex> spec = half_spectrum_scratch(static_cast<std::size_t>(n) * half);
    detail::fft_r2c(n, samples, spec);

    SpectralField out(grid);
    const double norm = 1.0 / (static_cast<double>(n) * n);
    const int N = grid.cutoff;
    for (int k2 = -N; k2 <= N; ++k2) {
        const int row = k2 >= 0 ? k2 : k2 + n;
        for (int k1 = 0; k1 <= N; ++k1) {
            const Complex c = spec[static_cast<std::size_t>(row) * half + k1] * norm;
            out.at(k1, k2) = c;
            if (k1 > 0) out.at(-k1, -k2) = std::conj(c);
        }
    }
    // k1 = 0 column: enforce exact symmetry between k2 and -k2.
    for (int k2 = 1; k2 <= N; ++k2) out.at(0, -k2) = std::conj(out.at(0, k2));
    out.at(0, 0) = Complex(out.at(0, 0).real(), 0.0);
    return out;
}

SpectralField forward_transform(const PhysicalField& samples, const GridSpec& grid) {
    if (samples.n != grid.phys_n)
        throw ConfigError("forward_transform: grid size " + std::to_string(samples.n) +
                          " does not match phys_n " + std::to_string(grid.phys_n));
    return forward_transform(std::span<const double>(samples.values), grid);
}

PhysicalField synthesize_on(const SpectralField& field, int n) {
    const int N = field.cutoff();
    if (n % 2 != 0 || n < 2 * N + 2)
        throw ConfigError("synthesize: target grid " + std::to_string(n) + " too small for cutoff " +
                          std::to_string(N));
    const int half = n / 2 + 1;
    std::span<Complex> spec = half_spectrum_scratch(static_cast<std::size_t>(n) * half);
    std::fill(spec.begin(), spec.end(), Complex{});
    for (int k2 = -N; k2 <= N; ++k2) {
        const int row = k2 >= 0 ? k2 : k2 + n;
        for (int k1 = 0; k1 <= N; ++k1) spec[static_cast<std::size_t>(row) * half + k1] = field.at(k1, k2);
    }
    PhysicalField out(n);
    detail::fft_c2r(n, spec, out.values);
    return out;
}

PhysicalField synthesize(const SpectralField& field) { return synthesize_on(field, field.grid().phys_n); }

PhysicalField inverse_transform(const SpectralField& field) {
    const double scale = std::max(field.max_abs(), 1e-300);
    const double defect = field.hermitian_defect();
    if (defect > 1e-12 * scale)
        throw InvariantError("inverse_transform: coefficients are not Hermitian (defect " +
                             std::to_string(defect) + ")");
    return synthesize(field);
}

// ---- band operations -----------------------------------------------------

SpectralField truncate(const SpectralField& field, int new_cutoff) {
    if (new_cutoff > field.cutoff())
        throw ConfigError("truncate: new cutoff exceeds the field cutoff");
    SpectralField out = field;
    out.for_each_mode([&](int k1, int k2, Complex& c) {
        if (band_norm(k1, k2) > new_cutoff) c = 0.0;
    });
    return out;
}

SpectralField resample(const SpectralField& field, const GridSpec& target) {
    SpectralField out(target);
    const int n = std::min(field.cutoff(), target.cutoff);
    for (int k2 = -n; k2 <= n; ++k2)
        for (int k1 = -n; k1 <= n; ++k1) out.at(k1, k2) = field.at(k1, k2);
    return out;
}

VelocityField resample(const VelocityField& field, const GridSpec& target) {
    return {resample(field.u, target), resample(field.v, target)};
}

VelocityField leray_project(const SpectralField& w1, const SpectralField& w2) {
    if (!(w1.grid() == w2.grid())) throw ConfigError("leray_project: components on different grids");
    VelocityField out{w1, w2};
    const int N = w1.cutoff();
    for (int k2 = -N; k2 <= N; ++k2)
        for (int k1 = -N; k1 <= N; ++k1) {
            Complex& a = out.u.at(k1, k2);
            Complex& b = out.v.at(k1, k2);
            if (k1 == 0 && k2 == 0) {
                a = b = 0.0;
                continue;
            }
            const double kk = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
            const Complex dot = (static_cast<double>(k1) * a + static_cast<double>(k2) * b) / kk;
            a -= dot * static_cast<double>(k1);
            b -= dot * static_cast<double>(k2);
        }
    return out;
}

SpectralField high_mode_filter(const SpectralField& field, const ViscositySpec& visc) {
    SpectralField out = field;
    out.for_each_mode([&](int k1, int k2, Complex& c) {
        if (band_norm(k1, k2) <= visc.m) c = 0.0;
    });
    return out;
}

SpectralField stream_function(const SpectralField& eta) {
    SpectralField psi = eta;
    psi.for_each_mode([](int k1, int k2, Complex& c) {
        const double kk = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
        c = kk == 0.0 ? Complex(0.0) : -c / kk;
    });
    return psi;
}

VelocityField biot_savart(const SpectralField& eta) {
    VelocityField vel{SpectralField(eta.grid()), SpectralField(eta.grid())};
    const int N = eta.cutoff();
    const Complex I(0.0, 1.0);
    for (int k2 = -N; k2 <= N; ++k2)
        for (int k1 = -N; k1 <= N; ++k1) {
            const double kk = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
            if (kk == 0.0) continue;
            const Complex psi = -eta.at(k1, k2) / kk;
            vel.u.at(k1, k2) = I * psi * static_cast<double>(-k2);
            vel.v.at(k1, k2) = I * psi * static_cast<double>(k1);
        }
    return vel;
}

SpectralField curl(const VelocityField& vel) {
    SpectralField eta(vel.grid());
    const Complex I(0.0, 1.0);
    eta.for_each_mode([&](int k1, int k2, Complex& c) {
        c = I * (static_cast<double>(k1) * vel.v.at(k1, k2) - static_cast<double>(k2) * vel.u.at(k1, k2));
    });
    return eta;
}

SpectralField d_dx1(const SpectralField& f) {
    SpectralField out = f;
    out.for_each_mode([](int k1, int, Complex& c) { c *= Complex(0.0, static_cast<double>(k1)); });
    return out;
}

SpectralField d_dx2(const SpectralField& f) {
    SpectralField out = f;
    out.for_each_mode([](int, int k2, Complex& c) { c *= Complex(0.0, static_cast<double>(k2)); });
    return out;
}

double divergence_residual(const VelocityField& vel) {
    double worst = 0.0;
    const int N = vel.u.cutoff();
    for (int k2 = -N; k2 <= N; ++k2)
        for (int k1 = -N; k1 <= N; ++k1)
            worst = std::max(worst, std::abs(static_cast<double>(k1) * vel.u.at(k1, k2) +
                                             static_cast<double>(k2) * vel.v.at(k1, k2)));
    return worst;
}

// ---- norms ---------------------------------------------------------------

double l2_norm_squared(const SpectralField& f) {
    double s = 0.0;
    for (const auto& c : f.coeffs()) s += std::norm(c);
    return kTwoPi * kTwoPi * s;
}

double kinetic_energy(const VelocityField& vel) { return 0.5 * (l2_norm_squared(vel.u) + l2_norm_squared(vel.v)); }

double squared_l2_distance(const SpectralField& a, const SpectralField& b) {
    const SpectralField& fine = a.cutoff() >= b.cutoff() ? a : b;
    const SpectralField& coarse = a.cutoff() >= b.cutoff() ? b : a;
    const int nc = coarse.cutoff();
    double s = 0.0;
    fine.for_each_mode([&](int k1, int k2, const Complex& c) {
        const Complex other = band_norm(k1, k2) <= nc ? coarse.at(k1, k2) : Complex(0.0);
        s += std::norm(c - other);
    });
    return kTwoPi * kTwoPi * s;
}

double squared_l2_distance(const VelocityField& a, const VelocityField& b) {
    return squared_l2_distance(a.u, b.u) + squared_l2_distance(a.v, b.v);
}

}  // namespace mvs
