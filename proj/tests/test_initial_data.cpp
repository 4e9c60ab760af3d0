#include <doctest.h>

#include "mvs/errors.hpp"
#include "mvs/initial_data.hpp"
#include "support.hpp"

#include <cmath>
#include <set>

using namespace mvs;
using mvs::test::max_diff;

namespace {

InitialDataSpec sheet(double delta, double rho = 0.05) {
    InitialDataSpec s;
    s.kind = DatumKind::flat_sheet;
    s.delta = delta;
    s.rho = rho;
    s.K = 10;
    return s;
}

InitialDataSpec patch(double delta) {
    InitialDataSpec s;
    s.kind = DatumKind::vortex_patch;
    s.delta = delta;
    s.K = 20;
    return s;
}

double sum_sq(const std::vector<double>& a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return s;
}

}  // namespace

TEST_CASE("spec parsing and validation") {
    CHECK(parse_datum_kind("vortex_patch") == DatumKind::vortex_patch);
    CHECK(parse_perturbation_kind("gaussian_localized") == PerturbationKind::gaussian_localized);
    CHECK_THROWS_AS(parse_datum_kind("swirl"), ConfigError);
    CHECK(default_modes(DatumKind::vortex_patch) == 20);
    CHECK(default_modes(DatumKind::flat_sheet) == 10);
    CHECK_THROWS_AS(sheet(-0.1).validate(), ConfigError);
    CHECK_THROWS_AS(sheet(0.1, 0.0).validate(), ConfigError);
    InitialDataSpec bad = sheet(0.1);
    bad.K = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("sample rng") {
    SampleRng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x != c.uniform());
    CHECK(x != d.uniform());
    SampleRng r(1, 0);
    double lo = 1.0, hi = 0.0, mean = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        mean += u / 10000;
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(mean == doctest::Approx(0.5).epsilon(0.02));
    double m2 = 0.0;
    for (int i = 0; i < 10000; ++i) m2 += std::pow(r.normal(), 2) / 10000;
    CHECK(m2 == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("perturbation draws") {
    SUBCASE("zero amplitude") {
        SampleRng rng(1, 0);
        const PerturbationDraw d = draw_perturbation(sheet(0.0), rng);
        CHECK(sum_sq(d.amplitudes) == 0.0);
        CHECK(interface_displacement(d, 1.0) == 0.0);
    }
    SUBCASE("normalization and ranges") {
        for (int k = 0; k < 1000; ++k) {
            const InitialDataSpec s = k % 2 ? sheet(0.05) : patch(0.0128);
            SampleRng rng(99, k);
            const PerturbationDraw d = draw_perturbation(s, rng);
            REQUIRE(d.amplitudes.size() == static_cast<std::size_t>(s.K));
            CHECK(std::abs(sum_sq(d.amplitudes) - s.delta) <= 1e-14 * s.delta);
            for (double b : d.phases) CHECK((b >= 0.0 && b < kTwoPi));
            if (s.kind == DatumKind::vortex_patch)
                for (double a : d.amplitudes) CHECK(a >= 0.0);
        }
    }
    SUBCASE("displacement obeys the cauchy-schwarz bound") {
        const InitialDataSpec s = sheet(0.05);
        const double bound = std::sqrt(s.K * s.delta);
        for (int k = 0; k < 1000; ++k) {
            SampleRng rng(5, k);
            const PerturbationDraw d = draw_perturbation(s, rng);
            double sup = 0.0;
            for (int j = 0; j < 256; ++j) sup = std::max(sup, std::abs(interface_displacement(d, kTwoPi * j / 256)));
            CHECK(sup <= bound);
        }
    }
    SUBCASE("cell families") {
        InitialDataSpec s = sheet(0.05);
        s.perturbation = PerturbationKind::uncorrelated;
        SampleRng rng(3, 0);
        CHECK_THROWS_AS(draw_perturbation(s, rng), ConfigError);
        const PerturbationDraw d = draw_perturbation(s, rng, 4);
        REQUIRE(d.cell_values.size() == 16);
        for (const auto& c : d.cell_values)
            for (double x : c) CHECK((x >= -1.0 && x <= 1.0));
        s.perturbation = PerturbationKind::gaussian_localized;
        const PerturbationDraw gd = draw_perturbation(s, rng, 8);
        for (const auto& c : gd.cell_values)
            for (double x : c) CHECK((x >= -3.0 && x <= 3.0));
    }
}

TEST_CASE("vortex patch") {
    const GridSpec g = GridSpec::with_default_padding(64);
    SampleRng rng(0, 0);
    const PerturbationDraw flat = draw_perturbation(patch(0.0), rng);
    const PhysicalField s = vortex_patch_samples(flat, g);
    const int n = g.phys_n;

    std::set<double> values(s.values.begin(), s.values.end());
    CHECK(values == std::set<double>{0.0, 1.0});

    double area = 0.0;
    for (double x : s.values) area += x;
    area *= g.spacing() * g.spacing();
    CHECK(area == doctest::Approx(kPi * kPi / 2).epsilon(0.01));

    // 90-degree rotation about the centre node
    bool symmetric = true;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int di = i - n / 2, dj = j - n / 2;
            if (s(i, j) != s((n / 2 + dj + n) % n, (n / 2 - di + n) % n)) symmetric = false;
        }
    CHECK(symmetric);

    const SpectralField eta = vortex_patch(flat, g);
    CHECK(eta.at(0, 0) == Complex(0.0));
    CHECK(eta.hermitian_defect() < 1e-15);

    SUBCASE("perturbed boundary") {
        SampleRng r2(4, 0);
        const PerturbationDraw d = draw_perturbation(patch(0.0128), r2);
        double worst = 0.0;
        for (int k = 0; k < 360; ++k)
            worst = std::max(worst, std::abs(patch_radius(d, kTwoPi * k / 360) - std::sqrt(kPi / 2)));
        CHECK(worst > 0.0);
        CHECK(worst <= std::sqrt(20 * 0.0128));
        CHECK(max_diff(vortex_patch(d, g), eta) > 0.0);
    }
}

TEST_CASE("flat vortex sheet") {
    SUBCASE("profile endpoints") {
        CHECK(sheet_profile(kPi, 0.001) == doctest::Approx(-1.0));
        CHECK(sheet_profile(0.0, 0.001) == doctest::Approx(1.0));
        CHECK(sheet_profile(kPi, 0.05) == doctest::Approx(-std::tanh(kPi / 0.1)));
        CHECK(sheet_profile(kPi / 2, 0.05) == doctest::Approx(0.0));
        CHECK(sheet_profile(1.5 * kPi, 0.05) == doctest::Approx(0.0));
        CHECK(sheet_profile(0.3 + kTwoPi, 0.05) == sheet_profile(0.3, 0.05));
        CHECK(sheet_profile(-0.3, 0.05) == doctest::Approx(sheet_profile(kTwoPi - 0.3, 0.05)));
    }
    const GridSpec g = GridSpec::with_default_padding(32);
    SUBCASE("unperturbed sheet is x1-independent and divergence-free") {
        SampleRng rng(0, 0);
        const InitialDataSpec s = sheet(0.0);
        const VelocityField v = flat_sheet_velocity(s, draw_perturbation(s, rng), g);
        double off = 0.0;
        v.u.for_each_mode([&](int k1, int, const Complex& c) {
            if (k1 != 0) off = std::max(off, std::abs(c));
        });
        CHECK(off <= 1e-15);
        CHECK(v.v.max_abs() <= 1e-15);
        CHECK(divergence_residual(v) <= 1e-12);
    }
    SUBCASE("perturbed sheet is divergence-free and seed-dependent") {
        const InitialDataSpec s = sheet(0.05);
        SampleRng r1(1, 0), r2(1, 1);
        const VelocityField a = flat_sheet_velocity(s, draw_perturbation(s, r1), g);
        const VelocityField b = flat_sheet_velocity(s, draw_perturbation(s, r2), g);
        CHECK(divergence_residual(a) <= 1e-12 * a.u.max_abs());
        CHECK(a.u.at(0, 0) == Complex(0.0));
        CHECK(squared_l2_distance(a, b) > 0.0);
    }
    SUBCASE("base energy close to the unmollified value") {
        for (double rho : {0.05, 0.01}) {
            const GridSpec gg = GridSpec::with_default_padding(128);
            SampleRng rng(0, 0);
            const InitialDataSpec s = sheet(0.0, rho);
            const double e = kinetic_energy(flat_sheet_velocity(s, draw_perturbation(s, rng), gg));
            // tanh^2 deficit: 2 interfaces x 2 rho, times (1/2) 2 pi
            CHECK(std::abs(e - 2 * kPi * kPi) <= 2.0 * 4 * kPi * rho);
            CHECK(e < 2 * kPi * kPi);
        }
    }
    SUBCASE("tracer is +1 in the middle band") {
        SampleRng rng(0, 0);
        const InitialDataSpec s = sheet(0.0, 0.05);
        const PhysicalField t = synthesize(sheet_tracer(s, draw_perturbation(s, rng), g));
        const int n = g.phys_n;
        CHECK(t(n / 2, 0) == doctest::Approx(1.0).epsilon(2e-2));
        CHECK(t(0, 0) == doctest::Approx(-1.0).epsilon(2e-2));
    }
}

TEST_CASE("cell perturbations") {
    const GridSpec g(32, 112);
    InitialDataSpec s = sheet(0.05);
    s.perturbation = PerturbationKind::uncorrelated;

    SUBCASE("zero amplitude leaves the base sheet") {
        InitialDataSpec z = s;
        z.delta = 0.0;
        SampleRng rng(1, 0), r0(1, 0);
        const VelocityField v = uncorrelated_perturbation(z, rng, g);
        const InitialDataSpec flat = sheet(0.0);
        const VelocityField base = flat_sheet_velocity(flat, draw_perturbation(flat, r0), g);
        CHECK(max_diff(v.u, base.u) < 1e-15);
        CHECK(v.v.max_abs() < 1e-15);
    }
    SUBCASE("piecewise constant before projection") {
        SampleRng rng(2, 0);
        const PerturbationDraw d = draw_perturbation(s, rng, g.phys_n / kCellSize);
        const auto [a, b] = cell_perturbation_samples(s, d, g);
        bool constant = true;
        for (int i = 0; i < g.phys_n; ++i)
            for (int j = 0; j < g.phys_n; ++j) {
                const int i0 = i / kCellSize * kCellSize, j0 = j / kCellSize * kCellSize;
                if (a(i, j) != a(i0, j0) || b(i, j) != b(i0, j0)) constant = false;
            }
        CHECK(constant);
        CHECK(a.max_abs() <= s.delta);
    }
    SUBCASE("different seeds differ") {
        SampleRng r1(1, 0), r2(2, 0);
        const VelocityField a = uncorrelated_perturbation(s, r1, g);
        const VelocityField b = uncorrelated_perturbation(s, r2, g);
        CHECK(squared_l2_distance(a, b) > 0.0);
        CHECK(divergence_residual(a) <= 1e-12 * a.u.max_abs());
    }
    SUBCASE("grid must be divisible by the cell size") {
        SampleRng rng(1, 0);
        CHECK_THROWS_AS(uncorrelated_perturbation(s, rng, GridSpec(16, 50)), ConfigError);
    }
    SUBCASE("localized families") {
        InitialDataSpec u = s;
        u.perturbation = PerturbationKind::uniform_localized;
        InitialDataSpec gs = s;
        gs.perturbation = PerturbationKind::gaussian_localized;
        SampleRng r1(3, 0), r2(3, 0);
        const PerturbationDraw du = draw_perturbation(u, r1, g.phys_n / kCellSize);
        const auto [a, b] = cell_perturbation_samples(u, du, g);
        const double peak = std::max(a.max_abs(), b.max_abs());
        const double h = g.spacing();
        double far = 0.0;
        for (int i = 0; i < g.phys_n; ++i) {
            const double y = h * i;
            const double dist = std::min(std::abs(y - kPi / 2), std::abs(y - 1.5 * kPi));
            if (dist > 5.5 * kLocalizedWidth)
                for (int j = 0; j < g.phys_n; ++j) far = std::max({far, std::abs(a(i, j)), std::abs(b(i, j))});
        }
        CHECK(far < 1e-6 * peak);

        const VelocityField vu = localized_perturbation(u, r1, g);
        const VelocityField vg = localized_perturbation(gs, r2, g);
        CHECK(squared_l2_distance(vu, vg) > 0.0);
        CHECK_THROWS_AS(localized_perturbation(s, r1, g), ConfigError);
    }
}

TEST_CASE("taylor-green fixture") {
    const GridSpec g(8, 32);
    const SpectralField tg = taylor_green(g);
    int nonzero = 0;
    tg.for_each_mode([&](int k1, int k2, const Complex& c) {
        if (c != Complex(0.0)) {
            ++nonzero;
            CHECK(std::abs(k1) == 1);
            CHECK(std::abs(k2) == 1);
            CHECK(std::abs(c) == 0.25);
        }
    });
    CHECK(nonzero == 4);
    CHECK(tg.at(0, 0) == Complex(0.0));
    CHECK(max_diff(synthesize(tg), test::sample(32, [](double x, double y) { return std::sin(x) * std::sin(y); })) <
          1e-15);
}

TEST_CASE("initial conditions are deterministic per sample") {
    const GridSpec g = GridSpec::with_default_padding(16);
    for (DatumKind k : {DatumKind::vortex_patch, DatumKind::flat_sheet, DatumKind::taylor_green}) {
        InitialDataSpec s = k == DatumKind::vortex_patch ? patch(0.01) : sheet(0.05);
        s.kind = k;
        s.seed = 42;
        const InitialCondition a = make_initial_condition(s, g, 3, true);
        const InitialCondition b = make_initial_condition(s, g, 3, true);
        CHECK(a.eta == b.eta);
        CHECK(a.tracer == b.tracer);
        CHECK(a.eta.at(0, 0) == Complex(0.0));
        if (k != DatumKind::taylor_green) CHECK(make_initial_condition(s, g, 4).eta != a.eta);
    }
}
