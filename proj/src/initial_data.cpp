#include "mvs/initial_data.hpp"

#include "mvs/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mvs {

std::string to_string(DatumKind k) {
    switch (k) {
        case DatumKind::vortex_patch: return "vortex_patch";
        case DatumKind::flat_sheet: return "flat_sheet";
        case DatumKind::taylor_green: return "taylor_green";
    }
    return "?";
}

std::string to_string(PerturbationKind k) {
    switch (k) {
        case PerturbationKind::sinusoidal: return "sinusoidal";
        case PerturbationKind::uncorrelated: return "uncorrelated";
        case PerturbationKind::uniform_localized: return "uniform_localized";
        case PerturbationKind::gaussian_localized: return "gaussian_localized";
    }
    return "?";
}

DatumKind parse_datum_kind(const std::string& s) {
    for (auto k : {DatumKind::vortex_patch, DatumKind::flat_sheet, DatumKind::taylor_green})
        if (to_string(k) == s) return k;
    throw ConfigError("unknown datum kind '" + s + "'");
}

PerturbationKind parse_perturbation_kind(const std::string& s) {
    for (auto k : {PerturbationKind::sinusoidal, PerturbationKind::uncorrelated, PerturbationKind::uniform_localized,
                   PerturbationKind::gaussian_localized})
        if (to_string(k) == s) return k;
    throw ConfigError("unknown perturbation kind '" + s + "'");
}

int default_modes(DatumKind k) { return k == DatumKind::vortex_patch ? 20 : 10; }

void InitialDataSpec::validate() const {
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw ConfigError("delta must be >= 0");
    if (kind == DatumKind::flat_sheet && !(rho > 0.0)) throw ConfigError("rho must be > 0");
    if (K < 1) throw ConfigError("K must be >= 1");
    if (kind == DatumKind::vortex_patch && perturbation != PerturbationKind::sinusoidal)
        throw ConfigError("perturbation: the vortex patch only supports the sinusoidal family");
}

// ---- RNG -----------------------------------------------------------------

SampleRng::SampleRng(std::uint64_t seed, std::uint64_t sample_index, std::uint64_t stream) {
    auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x & 0xffffffffu); };
    auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
    std::seed_seq seq{lo(seed), hi(seed), lo(sample_index), hi(sample_index), lo(stream), hi(stream)};
    engine_.seed(seq);
}

double SampleRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SampleRng::normal() {
    if (spare_) {
        const double z = *spare_;
        spare_.reset();
        return z;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    return r * std::cos(kTwoPi * u2);
}

// ---- draws ---------------------------------------------------------------

namespace {

PerturbationDraw draw_sinusoidal(const InitialDataSpec& spec, SampleRng& rng) {
    PerturbationDraw d;
    d.amplitudes.resize(spec.K);
    d.phases.resize(spec.K);
    const bool patch = spec.kind == DatumKind::vortex_patch;
    for (int k = 0; k < spec.K; ++k) {
        d.amplitudes[k] = patch ? rng.uniform() : rng.uniform(-1.0, 1.0);
        d.phases[k] = rng.uniform(0.0, kTwoPi);
    }
    return d;
}

double sum_squares(const std::vector<double>& a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return s;
}

}  // namespace

PerturbationDraw draw_perturbation(const InitialDataSpec& spec, SampleRng& rng, int cells_per_side) {
    spec.validate();
    if (spec.perturbation == PerturbationKind::sinusoidal) {
        PerturbationDraw d = draw_sinusoidal(spec, rng);
        double raw = sum_squares(d.amplitudes);
        if (raw == 0.0) {
            d = draw_sinusoidal(spec, rng);
            raw = sum_squares(d.amplitudes);
            if (raw == 0.0) throw std::runtime_error("draw_perturbation: degenerate all-zero amplitudes");
        }
        const double scale = std::sqrt(spec.delta / raw);
        for (double& a : d.amplitudes) a *= scale;
        return d;
    }

    if (cells_per_side < 1) throw ConfigError("draw_perturbation: cell families need a cell count");
    PerturbationDraw d;
    d.cells_per_side = cells_per_side;
    d.cell_values.resize(static_cast<std::size_t>(cells_per_side) * cells_per_side);
    const bool gaussian = spec.perturbation == PerturbationKind::gaussian_localized;
    for (auto& cell : d.cell_values)
        for (double& x : cell) x = gaussian ? std::clamp(rng.normal(), -3.0, 3.0) : rng.uniform(-1.0, 1.0);
    return d;
}

// ---- vortex patch ----------------------------------------------------------

double patch_radius(const PerturbationDraw& draw, double theta) {
    double r = std::sqrt(kPi / 2.0);
    for (std::size_t k = 0; k < draw.amplitudes.size(); ++k)
        r += draw.amplitudes[k] * std::sin(draw.phases[k] + static_cast<double>(21 + k) * theta);
    return r;
}

PhysicalField vortex_patch_samples(const PerturbationDraw& draw, const GridSpec& grid) {
    const int n = grid.phys_n;
    const double h = grid.spacing();
    PhysicalField eta(n);
    const bool flat = std::all_of(draw.amplitudes.begin(), draw.amplitudes.end(), [](double a) { return a == 0.0; });
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            // Offsets from the centre (pi, pi), which is grid node (n/2, n/2).
            const double dx = (j - n / 2) * h;
            const double dy = (i - n / 2) * h;
            const double r2 = dx * dx + dy * dy;
            bool inside = false;
            if (flat) {
                inside = r2 <= kPi / 2.0;
            } else {
                const double R = patch_radius(draw, std::atan2(dy, dx));
                inside = R > 0.0 && r2 <= R * R;
            }
            eta(i, j) = inside ? 1.0 : 0.0;
        }
    return eta;
}

SpectralField vortex_patch(const PerturbationDraw& draw, const GridSpec& grid) {
    SpectralField eta = forward_transform(vortex_patch_samples(draw, grid), grid);
    eta.at(0, 0) = 0.0;
    return eta;
}

// ---- flat vortex sheet -------------------------------------------------------

double sheet_profile(double y, double rho) {
    y = std::fmod(y, kTwoPi);
    if (y < 0.0) y += kTwoPi;
    return y <= kPi ? -std::tanh((y - kPi / 2.0) / rho) : -std::tanh((1.5 * kPi - y) / rho);
}

double interface_displacement(const PerturbationDraw& draw, double x1) {
    double p = 0.0;
    for (std::size_t k = 0; k < draw.amplitudes.size(); ++k)
        p += draw.amplitudes[k] * std::sin(static_cast<double>(k + 1) * x1 - draw.phases[k]);
    return p;
}

namespace {

PhysicalField sheet_samples(const InitialDataSpec& spec, const PerturbationDraw& draw, const GridSpec& grid,
                            double sign) {
    const int n = grid.phys_n;
    const double h = grid.spacing();
    PhysicalField u(n);
    for (int j = 0; j < n; ++j) {
        const double p = interface_displacement(draw, h * j);
        for (int i = 0; i < n; ++i) u(i, j) = sign * sheet_profile(h * i - p, spec.rho);
    }
    return u;
}

double periodic_gap(double a, double b) {
    double d = std::fmod(std::abs(a - b), kTwoPi);
    return std::min(d, kTwoPi - d);
}

}  // namespace

VelocityField flat_sheet_velocity(const InitialDataSpec& spec, const PerturbationDraw& draw, const GridSpec& grid) {
    const SpectralField u = forward_transform(sheet_samples(spec, draw, grid, 1.0), grid);
    return leray_project(u, SpectralField(grid));
}

SpectralField sheet_tracer(const InitialDataSpec& spec, const PerturbationDraw& draw, const GridSpec& grid) {
    return forward_transform(sheet_samples(spec, draw, grid, -1.0), grid);
}

std::pair<PhysicalField, PhysicalField> cell_perturbation_samples(const InitialDataSpec& spec,
                                                                  const PerturbationDraw& draw,
                                                                  const GridSpec& grid) {
    const int n = grid.phys_n;
    if (n % kCellSize != 0)
        throw ConfigError("cell perturbation: phys_n = " + std::to_string(n) + " is not divisible by " +
                          std::to_string(kCellSize));
    const int cells = n / kCellSize;
    if (draw.cells_per_side != cells) throw ConfigError("cell perturbation: draw does not match the grid");
    const bool localized = spec.perturbation == PerturbationKind::uniform_localized ||
                           spec.perturbation == PerturbationKind::gaussian_localized;
    const double h = grid.spacing();
    const double w2 = 2.0 * kLocalizedWidth * kLocalizedWidth;
    PhysicalField a(n), b(n);
    for (int i = 0; i < n; ++i) {
        double weight = spec.delta;
        if (localized) {
            const double g1 = periodic_gap(h * i, kPi / 2.0);
            const double g2 = periodic_gap(h * i, 1.5 * kPi);
            weight *= std::exp(-g1 * g1 / w2) + std::exp(-g2 * g2 / w2);
        }
        for (int j = 0; j < n; ++j) {
            const auto& x = draw.cell_values[static_cast<std::size_t>(i / kCellSize) * cells + j / kCellSize];
            a(i, j) = weight * x[0];
            b(i, j) = weight * x[1];
        }
    }
    return {std::move(a), std::move(b)};
}

namespace {

VelocityField cell_perturbed_sheet(const InitialDataSpec& spec, SampleRng& rng, const GridSpec& grid) {
    if (grid.phys_n % kCellSize != 0)
        throw ConfigError("cell perturbation: phys_n = " + std::to_string(grid.phys_n) +
                          " is not divisible by " + std::to_string(kCellSize));
    const PerturbationDraw draw = draw_perturbation(spec, rng, grid.phys_n / kCellSize);
    auto [a, b] = cell_perturbation_samples(spec, draw, grid);
    const PhysicalField base = sheet_samples(spec, PerturbationDraw{}, grid, 1.0);
    for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] += base.values[i];
    return leray_project(forward_transform(a, grid), forward_transform(b, grid));
}

}  // namespace

VelocityField uncorrelated_perturbation(const InitialDataSpec& spec, SampleRng& rng, const GridSpec& grid) {
    InitialDataSpec s = spec;
    s.perturbation = PerturbationKind::uncorrelated;
    return cell_perturbed_sheet(s, rng, grid);
}

VelocityField localized_perturbation(const InitialDataSpec& spec, SampleRng& rng, const GridSpec& grid) {
    if (spec.perturbation != PerturbationKind::uniform_localized &&
        spec.perturbation != PerturbationKind::gaussian_localized)
        throw ConfigError("localized_perturbation: spec must name a localized family");
    return cell_perturbed_sheet(spec, rng, grid);
}

SpectralField taylor_green(const GridSpec& grid) {
    SpectralField eta(grid);
    eta.at(1, -1) = 0.25;
    eta.at(-1, 1) = 0.25;
    eta.at(1, 1) = -0.25;
    eta.at(-1, -1) = -0.25;
    return eta;
}

InitialCondition make_initial_condition(const InitialDataSpec& spec, const GridSpec& grid,
                                        std::uint64_t sample_index, bool with_tracer) {
    spec.validate();
    SampleRng rng(spec.seed, sample_index);
    InitialCondition ic;
    switch (spec.kind) {
        case DatumKind::taylor_green:
            ic.eta = taylor_green(grid);
            break;
        case DatumKind::vortex_patch:
            ic.draw = draw_perturbation(spec, rng);
            ic.eta = vortex_patch(ic.draw, grid);
            break;
        case DatumKind::flat_sheet:
            if (spec.perturbation == PerturbationKind::sinusoidal) {
                ic.draw = draw_perturbation(spec, rng);
                ic.eta = curl(flat_sheet_velocity(spec, ic.draw, grid));
            } else {
                ic.eta = curl(cell_perturbed_sheet(spec, rng, grid));
            }
            break;
    }
    if (with_tracer) {
        // Cell families leave the interfaces flat.
        ic.tracer = spec.kind == DatumKind::flat_sheet ? sheet_tracer(spec, ic.draw, grid)
                                                        : SpectralField(grid);
    }
    return ic;
}

}  // namespace mvs
