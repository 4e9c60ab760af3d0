#pragma once

// Fourier representation of real fields on the 2pi-periodic square.
//
// Coefficients follow  f(x) = sum_k fhat_k exp(i k.x),
//                      fhat_k = (2pi)^-2 \int f exp(-i k.x) dx,
// and are kept for the square band max(|k1|,|k2|) <= N.  Physical samples
// live on an n x n grid, row-major with x2 the slow index: sample (i,j) sits
// at x = (2pi j/n, 2pi i/n).

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace mvs {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.141592653589793238462643383279;

struct GridSpec {
    int cutoff = 0;   // N
    int phys_n = 0;   // physical samples per dimension

    /// Validates N >= 4, phys_n even and phys_n > 3N.
    GridSpec(int cutoff_N, int phys_n);
    GridSpec() = default;

    /// Grid with the default padded physical size for cutoff N.
    static GridSpec with_default_padding(int cutoff_N);
    static int default_phys_n(int cutoff_N);

    int band_width() const { return 2 * cutoff + 1; }
    double spacing() const { return kTwoPi / phys_n; }
    std::size_t phys_size() const {
        return static_cast<std::size_t>(phys_n) * static_cast<std::size_t>(phys_n);
    }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct ViscositySpec {
    double epsilon = 1e-5;
    int m = 0;

    /// m(N) = floor(sqrt(N)), eps(N) = 1/N.
    static ViscositySpec tadmor(int cutoff_N);
    void validate(const GridSpec& grid) const;

    friend bool operator==(const ViscositySpec&, const ViscositySpec&) = default;
};

/// Max-norm of a wavevector.
inline int band_norm(int k1, int k2) { return std::max(std::abs(k1), std::abs(k2)); }

class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(const GridSpec& grid);

    const GridSpec& grid() const { return grid_; }
    int cutoff() const { return grid_.cutoff; }

    Complex& at(int k1, int k2) { return coeffs_[index(k1, k2)]; }
    const Complex& at(int k1, int k2) const { return coeffs_[index(k1, k2)]; }

    std::span<Complex> coeffs() { return coeffs_; }
    std::span<const Complex> coeffs() const { return coeffs_; }

    std::size_t index(int k1, int k2) const {
        const int w = grid_.band_width();
        return static_cast<std::size_t>((k2 + grid_.cutoff) * w + (k1 + grid_.cutoff));
    }

    /// Applies f(k1, k2, coeff&) to every stored mode.
    template <class F>
    void for_each_mode(F&& f) {
        const int n = grid_.cutoff;
        std::size_t idx = 0;
        for (int k2 = -n; k2 <= n; ++k2)
            for (int k1 = -n; k1 <= n; ++k1) f(k1, k2, coeffs_[idx++]);
    }
    template <class F>
    void for_each_mode(F&& f) const {
        const int n = grid_.cutoff;
        std::size_t idx = 0;
        for (int k2 = -n; k2 <= n; ++k2)
            for (int k1 = -n; k1 <= n; ++k1) f(k1, k2, coeffs_[idx++]);
    }

    /// max_k |c(k) - conj(c(-k))|
    double hermitian_defect() const;
    double max_abs() const;
    bool all_finite() const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);
    /// this += s * o
    SpectralField& axpy(double s, const SpectralField& o);

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

    friend bool operator==(const SpectralField&, const SpectralField&) = default;

private:
    GridSpec grid_;
    std::vector<Complex> coeffs_;
};

struct VelocityField {
    SpectralField u;  // x1 component
    SpectralField v;  // x2 component

    const GridSpec& grid() const { return u.grid(); }

    VelocityField& operator+=(const VelocityField& o) { u += o.u; v += o.v; return *this; }
    VelocityField& operator-=(const VelocityField& o) { u -= o.u; v -= o.v; return *this; }
    VelocityField& operator*=(double s) { u *= s; v *= s; return *this; }
    friend VelocityField operator+(VelocityField a, const VelocityField& b) { return a += b; }
    friend VelocityField operator-(VelocityField a, const VelocityField& b) { return a -= b; }
    friend VelocityField operator*(double s, VelocityField a) { return a *= s; }
    friend bool operator==(const VelocityField&, const VelocityField&) = default;

    bool all_finite() const { return u.all_finite() && v.all_finite(); }
};

/// Real samples on the phys_n x phys_n grid.
struct PhysicalField {
    int n = 0;
    std::vector<double> values;

    PhysicalField() = default;
    explicit PhysicalField(int n_) : n(n_), values(static_cast<std::size_t>(n_) * n_, 0.0) {}

    double& operator()(int i, int j) { return values[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
    double max_abs() const;
};

// ---- transforms ----------------------------------------------------------

/// Truncated Fourier coefficients of real grid samples. Throws ConfigError on
/// a size mismatch.
SpectralField forward_transform(std::span<const double> samples, const GridSpec& grid);
SpectralField forward_transform(const PhysicalField& samples, const GridSpec& grid);

/// Grid samples of a band-limited field. Throws InvariantError when the
/// coefficients are not Hermitian (relative defect above 1e-12).
PhysicalField inverse_transform(const SpectralField& field);

/// Same as inverse_transform without the symmetry check; for internal hot
/// loops on fields that are Hermitian by construction.
PhysicalField synthesize(const SpectralField& field);

/// Values on an arbitrary n x n grid (n need not match grid().phys_n).
PhysicalField synthesize_on(const SpectralField& field, int n);

// ---- band operations -----------------------------------------------------

SpectralField truncate(const SpectralField& field, int new_cutoff);

/// Re-expresses the field on another grid; modes outside the target band are
/// dropped, missing ones are zero.
SpectralField resample(const SpectralField& field, const GridSpec& target);
VelocityField resample(const VelocityField& field, const GridSpec& target);

VelocityField leray_project(const SpectralField& w1, const SpectralField& w2);
inline VelocityField leray_project(const VelocityField& w) { return leray_project(w.u, w.v); }

/// Applies Q = I - P_m: zeroes every mode with max-norm <= m.
SpectralField high_mode_filter(const SpectralField& field, const ViscositySpec& visc);

/// Velocity v = grad-perp psi with Laplace(psi) = eta, mean-free psi.
VelocityField biot_savart(const SpectralField& eta);
SpectralField stream_function(const SpectralField& eta);
SpectralField curl(const VelocityField& vel);

SpectralField d_dx1(const SpectralField& f);
SpectralField d_dx2(const SpectralField& f);

/// max_k |k . vhat_k|
double divergence_residual(const VelocityField& vel);

// ---- norms ---------------------------------------------------------------

/// (2pi)^2 sum |fhat_k|^2 = \int f^2 dx
double l2_norm_squared(const SpectralField& f);
/// 1/2 \int |v|^2 dx
double kinetic_energy(const VelocityField& vel);
/// \int |a - b|^2 dx; the coarser field is zero-padded to the finer band.
double squared_l2_distance(const SpectralField& a, const SpectralField& b);
double squared_l2_distance(const VelocityField& a, const VelocityField& b);

}  // namespace mvs
