#pragma once

#include "mvs/spectral.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace mvs {

enum class DatumKind { vortex_patch, flat_sheet, taylor_green };
enum class PerturbationKind { sinusoidal, uncorrelated, uniform_localized, gaussian_localized };

std::string to_string(DatumKind k);
std::string to_string(PerturbationKind k);
DatumKind parse_datum_kind(const std::string& s);
PerturbationKind parse_perturbation_kind(const std::string& s);

/// Default number of perturbation modes: 20 for the patch, 10 for the sheet.
int default_modes(DatumKind k);

struct InitialDataSpec {
    DatumKind kind = DatumKind::flat_sheet;
    double delta = 0.0;
    double rho = 0.05;
    int K = 10;
    PerturbationKind perturbation = PerturbationKind::sinusoidal;
    std::uint64_t seed = 0;

    void validate() const;
    friend bool operator==(const InitialDataSpec&, const InitialDataSpec&) = default;
};

/// Reproducible random stream for one (seed, sample, stream) triple,
/// independent of how samples are scheduled.
class SampleRng {
public:
    SampleRng(std::uint64_t seed, std::uint64_t sample_index, std::uint64_t stream = 0);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal (Box-Muller).
    double normal();

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

struct PerturbationDraw {
    std::vector<double> amplitudes;
    std::vector<double> phases;
    /// Per-cell 2-vectors for the uncorrelated/localized families, row-major
    /// over cells with x2 the slow index.
    std::vector<std::array<double, 2>> cell_values;
    int cells_per_side = 0;
};

inline constexpr int kCellSize = 16;
inline constexpr double kLocalizedWidth = 0.2;

/// Random coefficients for `spec`. Sinusoidal families renormalize so that
/// sum(amplitudes^2) == delta; cell families need `cells_per_side`.
PerturbationDraw draw_perturbation(const InitialDataSpec& spec, SampleRng& rng, int cells_per_side = 0);

/// Radius of the perturbed patch boundary at polar angle theta.
double patch_radius(const PerturbationDraw& draw, double theta);

/// Indicator samples of the (perturbed) patch, before any transform.
PhysicalField vortex_patch_samples(const PerturbationDraw& draw, const GridSpec& grid);
SpectralField vortex_patch(const PerturbationDraw& draw, const GridSpec& grid);

/// Mollified sheet profile for the x1 velocity at height y (any real y).
double sheet_profile(double y, double rho);
/// Interface displacement p(x1) = sum alpha_k sin(k x1 - beta_k).
double interface_displacement(const PerturbationDraw& draw, double x1);

VelocityField flat_sheet_velocity(const InitialDataSpec& spec, const PerturbationDraw& draw, const GridSpec& grid);
/// +1 between the (displaced) interfaces, -1 outside, mollified with rho.
SpectralField sheet_tracer(const InitialDataSpec& spec, const PerturbationDraw& draw, const GridSpec& grid);

/// Pre-projection perturbation delta * X (times the interface cutoff for the
/// localized families).
std::pair<PhysicalField, PhysicalField> cell_perturbation_samples(const InitialDataSpec& spec,
                                                                  const PerturbationDraw& draw,
                                                                  const GridSpec& grid);
/// Base sheet plus piecewise-constant random field, Leray-projected.
VelocityField uncorrelated_perturbation(const InitialDataSpec& spec, SampleRng& rng, const GridSpec& grid);
VelocityField localized_perturbation(const InitialDataSpec& spec, SampleRng& rng, const GridSpec& grid);

SpectralField taylor_green(const GridSpec& grid);

struct InitialCondition {
    SpectralField eta;
    std::optional<SpectralField> tracer;
    PerturbationDraw draw;
};

/// Initial vorticity (and optional tracer) of ensemble member `sample_index`.
InitialCondition make_initial_condition(const InitialDataSpec& spec, const GridSpec& grid,
                                        std::uint64_t sample_index, bool with_tracer = false);

}  // namespace mvs
