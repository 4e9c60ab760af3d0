#pragma once

#include "mvs/spectral.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace mvs::test {

/// Random Hermitian, mean-free field with coefficients decaying like |k|^-decay.
inline SpectralField random_field(const GridSpec& g, std::uint64_t seed, double decay = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    SpectralField f(g);
    const int N = g.cutoff;
    for (int k2 = -N; k2 <= N; ++k2)
        for (int k1 = 0; k1 <= N; ++k1) {
            if (k1 == 0 && k2 <= 0) continue;
            const double s = std::pow(1.0 + k1 * k1 + k2 * k2, -0.5 * decay);
            const Complex c(s * nd(rng), s * nd(rng));
            f.at(k1, k2) = c;
            f.at(-k1, -k2) = std::conj(c);
        }
    return f;
}

inline VelocityField random_velocity(const GridSpec& g, std::uint64_t seed, double decay = 1.0) {
    return leray_project(random_field(g, seed, decay), random_field(g, seed + 1000, decay));
}

inline PhysicalField sample(int n, const std::function<double(double, double)>& f) {
    PhysicalField p(n);
    const double h = kTwoPi / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) p(i, j) = f(h * j, h * i);
    return p;
}

inline double max_diff(const SpectralField& a, const SpectralField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.coeffs().size(); ++i) m = std::max(m, std::abs(a.coeffs()[i] - b.coeffs()[i]));
    return m;
}

inline double max_diff(const PhysicalField& a, const PhysicalField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

}  // namespace mvs::test
