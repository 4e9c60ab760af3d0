#include <doctest.h>

#include "mvs/errors.hpp"
#include "mvs/spectral.hpp"
#include "support.hpp"

#include <cmath>

using namespace mvs;
using mvs::test::max_diff;
using mvs::test::random_field;
using mvs::test::random_velocity;
using mvs::test::sample;

namespace {

SpectralField single_mode(const GridSpec& g, int k1, int k2, Complex c) {
    SpectralField f(g);
    f.at(k1, k2) = c;
    f.at(-k1, -k2) = std::conj(c);
    return f;
}

double zero_except(const SpectralField& f, std::initializer_list<std::pair<int, int>> keep) {
    double worst = 0.0;
    f.for_each_mode([&](int k1, int k2, const Complex& c) {
        for (auto [a, b] : keep)
            if (a == k1 && b == k2) return;
        worst = std::max(worst, std::abs(c));
    });
    return worst;
}

}  // namespace

TEST_CASE("grid spec validation") {
    CHECK_NOTHROW(GridSpec(16, 50));
    CHECK_THROWS_AS(GridSpec(16, 48), ConfigError);  // phys_n must exceed 3N
    CHECK_THROWS_AS(GridSpec(16, 51), ConfigError);
    CHECK_THROWS_AS(GridSpec(2, 16), ConfigError);
    CHECK(GridSpec::default_phys_n(16) == 64);
    CHECK(GridSpec::default_phys_n(32) == 112);
    CHECK(GridSpec::default_phys_n(64) == 224);
    CHECK(GridSpec::default_phys_n(128) == 400);
    for (int N : {4, 16, 32, 64, 128, 256, 512}) CHECK(GridSpec::default_phys_n(N) > 3 * N);
}

TEST_CASE("forward transform of single modes") {
    const GridSpec g(8, 32);
    SUBCASE("cos x1") {
        const SpectralField f = forward_transform(sample(32, [](double x, double) { return std::cos(x); }), g);
        CHECK(std::abs(f.at(1, 0) - 0.5) < 1e-15);
        CHECK(std::abs(f.at(-1, 0) - 0.5) < 1e-15);
        CHECK(zero_except(f, {{1, 0}, {-1, 0}}) < 1e-15);
    }
    SUBCASE("zero") {
        const SpectralField f = forward_transform(PhysicalField(32), g);
        CHECK(f.max_abs() == 0.0);
    }
    SUBCASE("sin 3 x2 at N = 4") {
        const GridSpec g4(4, 16);
        const SpectralField f = forward_transform(sample(16, [](double, double y) { return std::sin(3 * y); }), g4);
        CHECK(std::abs(f.at(0, 3) - Complex(0, -0.5)) < 1e-15);
        CHECK(std::abs(f.at(0, -3) - Complex(0, 0.5)) < 1e-15);
        CHECK(zero_except(f, {{0, 3}, {0, -3}}) < 1e-15);
    }
    CHECK_THROWS_AS(forward_transform(PhysicalField(30), g), ConfigError);
}

TEST_CASE("inverse transform") {
    const GridSpec g(8, 32);
    CHECK(inverse_transform(SpectralField(g)).max_abs() == 0.0);

    const PhysicalField c = inverse_transform(single_mode(g, 1, 0, 0.5));
    CHECK(max_diff(c, sample(32, [](double x, double) { return std::cos(x); })) < 1e-14);

    const SpectralField r = random_field(g, 3);
    CHECK(max_diff(forward_transform(inverse_transform(r), g), r) < 1e-12);

    SpectralField broken = r;
    broken.at(2, 1) += Complex(0.1, 0.0);
    CHECK_THROWS_AS(inverse_transform(broken), InvariantError);
}

TEST_CASE("truncate") {
    const GridSpec g(8, 32);
    const SpectralField r = random_field(g, 5);
    CHECK(truncate(r, 8) == r);
    CHECK(truncate(single_mode(g, 0, 3, Complex(0, -0.5)), 2).max_abs() == 0.0);
    const SpectralField t = truncate(r, 5);
    CHECK(truncate(t, 5) == t);
    CHECK(l2_norm_squared(t) <= l2_norm_squared(r));
    CHECK_THROWS_AS(truncate(r, 9), ConfigError);
}

TEST_CASE("leray projection") {
    const GridSpec g(8, 32);
    SUBCASE("divergence-free input is fixed") {
        const VelocityField v = random_velocity(g, 11);
        CHECK(max_diff(leray_project(v).u, v.u) < 1e-15);
        CHECK(max_diff(leray_project(v).v, v.v) < 1e-15);
    }
    SUBCASE("gradients are annihilated") {
        const SpectralField p = random_field(g, 12);
        const VelocityField w = leray_project(d_dx1(p), d_dx2(p));
        CHECK(w.u.max_abs() < 1e-15);
        CHECK(w.v.max_abs() < 1e-15);
    }
    SUBCASE("hand-evaluated single mode") {
        SpectralField w1(g), w2(g);
        w1.at(1, 1) = 1.0;
        const VelocityField v = leray_project(w1, w2);
        CHECK(std::abs(v.u.at(1, 1) - 0.5) < 1e-16);
        CHECK(std::abs(v.v.at(1, 1) + 0.5) < 1e-16);
    }
    SUBCASE("idempotent and energy-reducing") {
        const VelocityField w{random_field(g, 13), random_field(g, 14)};
        const VelocityField p = leray_project(w);
        const VelocityField pp = leray_project(p);
        CHECK(max_diff(pp.u, p.u) < 1e-15);
        CHECK(max_diff(pp.v, p.v) < 1e-15);
        CHECK(kinetic_energy(p) <= kinetic_energy(w));
        CHECK(divergence_residual(p) <= 1e-12 * std::max(p.u.max_abs(), p.v.max_abs()));
    }
}

TEST_CASE("high mode filter") {
    const GridSpec g(8, 32);
    const SpectralField r = random_field(g, 21);
    CHECK(high_mode_filter(r, {1e-5, 0}) == r);
    CHECK(high_mode_filter(r, {1e-5, 8}).max_abs() == 0.0);
    const SpectralField two = single_mode(g, 1, 0, 1.0) + single_mode(g, 3, 0, 1.0);
    const SpectralField f = high_mode_filter(two, {1e-5, 2});
    CHECK(f.at(1, 0) == Complex(0.0));
    CHECK(f.at(3, 0) == Complex(1.0));
}

TEST_CASE("biot-savart and curl") {
    const GridSpec g(8, 32);
    SUBCASE("sin x2") {
        const VelocityField v = biot_savart(single_mode(g, 0, 1, Complex(0, -0.5)));
        const PhysicalField u = synthesize(v.u);
        CHECK(max_diff(u, sample(32, [](double, double y) { return std::cos(y); })) < 1e-14);
        CHECK(synthesize(v.v).max_abs() < 1e-15);
    }
    SUBCASE("zero") {
        const VelocityField v = biot_savart(SpectralField(g));
        CHECK(v.u.max_abs() == 0.0);
        CHECK(v.v.max_abs() == 0.0);
    }
    SUBCASE("sin x1 sin x2") {
        const SpectralField eta =
            forward_transform(sample(32, [](double x, double y) { return std::sin(x) * std::sin(y); }), g);
        const SpectralField psi = stream_function(eta);
        CHECK(max_diff(synthesize(psi), sample(32, [](double x, double y) {
                           return -0.5 * std::sin(x) * std::sin(y);
                       })) < 1e-15);
        const VelocityField v = biot_savart(eta);
        // v = grad-perp psi = (-d2 psi, d1 psi)
        CHECK(max_diff(synthesize(v.u), sample(32, [](double x, double y) {
                           return 0.5 * std::sin(x) * std::cos(y);
                       })) < 1e-15);
        CHECK(max_diff(synthesize(v.v), sample(32, [](double x, double y) {
                           return -0.5 * std::cos(x) * std::sin(y);
                       })) < 1e-15);
    }
    SUBCASE("curl of cos x2 shear") {
        SpectralField u(g), v(g);
        u.at(0, 1) = u.at(0, -1) = 0.5;
        const SpectralField eta = curl({u, v});
        CHECK(max_diff(synthesize(eta), sample(32, [](double, double y) { return std::sin(y); })) < 1e-15);
    }
    SUBCASE("compositions are identities") {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const SpectralField eta = random_field(g, seed);
            CHECK(max_diff(curl(biot_savart(eta)), eta) <= 1e-12 * eta.max_abs());
            const VelocityField v = random_velocity(g, seed + 10);
            const VelocityField back = biot_savart(curl(v));
            CHECK(max_diff(back.u, v.u) <= 1e-12 * v.u.max_abs());
            CHECK(max_diff(back.v, v.v) <= 1e-12 * v.v.max_abs());
            const VelocityField bs = biot_savart(eta);
            CHECK(divergence_residual(bs) <= 1e-12 * bs.u.max_abs());
        }
    }
}

TEST_CASE("hermitian symmetry is preserved by every operation") {
    const GridSpec g(12, 40);
    const SpectralField r = random_field(g, 31);
    const VelocityField v = random_velocity(g, 32);
    const double tol = 1e-13;
    CHECK(r.hermitian_defect() <= tol);
    CHECK(forward_transform(inverse_transform(r), g).hermitian_defect() <= tol);
    CHECK(truncate(r, 6).hermitian_defect() <= tol);
    CHECK(high_mode_filter(r, {1e-3, 3}).hermitian_defect() <= tol);
    CHECK(stream_function(r).hermitian_defect() <= tol);
    CHECK(d_dx1(r).hermitian_defect() <= tol);
    CHECK(d_dx2(r).hermitian_defect() <= tol);
    CHECK(curl(v).hermitian_defect() <= tol);
    const VelocityField bs = biot_savart(r);
    CHECK(bs.u.hermitian_defect() <= tol);
    CHECK(bs.v.hermitian_defect() <= tol);
    const VelocityField lp = leray_project(r, d_dx1(r));
    CHECK(lp.u.hermitian_defect() <= tol);
    CHECK(lp.v.hermitian_defect() <= tol);
    CHECK(resample(r, GridSpec(20, 64)).hermitian_defect() <= tol);
}

TEST_CASE("energy and distances") {
    const GridSpec g(8, 32);
    SpectralField cos2(g);
    cos2.at(0, 1) = cos2.at(0, -1) = 0.5;
    const VelocityField shear{cos2, SpectralField(g)};
    const VelocityField zero{SpectralField(g), SpectralField(g)};

    CHECK(kinetic_energy(zero) == 0.0);
    CHECK(kinetic_energy(shear) == doctest::Approx(kPi * kPi).epsilon(1e-15));
    CHECK(squared_l2_distance(shear, shear) == 0.0);
    CHECK(squared_l2_distance(shear, zero) == doctest::Approx(2 * kPi * kPi).epsilon(1e-15));

    const VelocityField a = random_velocity(g, 41), b = random_velocity(g, 42);
    CHECK(squared_l2_distance(a, b) == squared_l2_distance(b, a));

    SUBCASE("parseval against grid quadrature") {
        const PhysicalField u = synthesize(a.u), v = synthesize(a.v);
        double q = 0.0;
        for (std::size_t i = 0; i < u.values.size(); ++i) q += u.values[i] * u.values[i] + v.values[i] * v.values[i];
        q *= 0.5 * std::pow(kTwoPi / u.n, 2);
        CHECK(kinetic_energy(a) == doctest::Approx(q).epsilon(1e-10));
    }
    SUBCASE("different cutoffs are zero-padded") {
        const GridSpec fine(16, 64);
        SpectralField c3(fine);
        c3.at(0, 1) = c3.at(0, -1) = 0.5;
        c3.at(0, 3) = c3.at(0, -3) = 0.25;
        const VelocityField b3{c3, SpectralField(fine)};
        CHECK(squared_l2_distance(shear, b3) == doctest::Approx(kPi * kPi / 2).epsilon(1e-14));
        CHECK(squared_l2_distance(b3, shear) == squared_l2_distance(shear, b3));
    }
}

TEST_CASE("synthesis on finer grids agrees with the band-limited function") {
    const GridSpec g(6, 20);
    const SpectralField r = random_field(g, 51);
    const PhysicalField coarse = synthesize(r);
    const PhysicalField fine = synthesize_on(r, 40);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) worst = std::max(worst, std::abs(coarse(i, j) - fine(2 * i, 2 * j)));
    CHECK(worst < 1e-13);
    CHECK_THROWS_AS(synthesize_on(r, 12), ConfigError);
}
