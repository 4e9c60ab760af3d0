// mvs: command-line driver for single runs, ensembles and their statistics.

#include "mvs/config.hpp"
#include "mvs/errors.hpp"
#include "mvs/io_formats.hpp"
#include "mvs/runtime.hpp"
#include "mvs/statistics.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>

namespace fs = std::filesystem;
using namespace mvs;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::string indexed(const std::string& stem, std::size_t t) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "_%04zu", t);
    return stem + buf + ".mvsf";
}

int default_workers() {
    if (const char* env = std::getenv("MVS_WORKERS")) {
        char* end = nullptr;
        const long w = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || w < 1) throw ConfigError("MVS_WORKERS: expected a positive integer");
        return static_cast<int>(w);
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Collects artifacts written into a run directory for the manifest.
struct ArtifactWriter {
    fs::path dir;
    std::vector<ManifestArtifact> artifacts;

    void field(const std::string& rel, FieldKind kind, double time, const PhysicalField& f) {
        write_field(dir / rel, FieldFile{kind, f.n, f.n, time, f.values});
        artifacts.push_back({rel, ""});
    }
    void field(const std::string& rel, FieldKind kind, double time, int n, const std::vector<double>& v) {
        write_field(dir / rel, FieldFile{kind, n, n, time, v});
        artifacts.push_back({rel, ""});
    }
    void series(const std::string& rel, const Table& t) {
        write_series(dir / rel, t);
        artifacts.push_back({rel, ""});
    }
    void text(const std::string& rel, const std::string& s) {
        write_file_atomic(dir / rel, s);
        artifacts.push_back({rel, ""});
    }
};

// ---- run ---------------------------------------------------------------------

void cmd_run(const std::string& config_path, const fs::path& out, bool tracer_flag) {
    EnsembleConfig cfg = load_config(config_path);
    if (tracer_flag) cfg.tracer = true;
    cfg.M = 1;

    InitialCondition ic = make_initial_condition(cfg.base, cfg.grid, 0, cfg.tracer);
    FlowState state;
    state.eta = std::move(ic.eta);
    state.visc = cfg.visc;

    ArtifactWriter w{out, {}};
    w.text("config.json", config_to_json(cfg).dump(2) + "\n");
    Table energy{{"time", "energy", "enstrophy"}, {{}, {}, {}}};
    std::size_t index = 0;
    AdvanceOptions opts;
    opts.observer = [&](const Snapshot& s) {
        const VelocityField vel = biot_savart(s.eta);
        w.field("fields/" + indexed("vorticity", index), FieldKind::vorticity, s.time, synthesize(s.eta));
        w.field("fields/" + indexed("velocity_x", index), FieldKind::velocity_x, s.time, synthesize(vel.u));
        w.field("fields/" + indexed("velocity_y", index), FieldKind::velocity_y, s.time, synthesize(vel.v));
        if (s.tracer) w.field("fields/" + indexed("tracer", index), FieldKind::tracer, s.time, synthesize(*s.tracer));
        energy.columns[0].push_back(s.time);
        energy.columns[1].push_back(kinetic_energy(vel));
        energy.columns[2].push_back(0.5 * l2_norm_squared(s.eta));
        ++index;
    };
    advance(state, cfg.request_times, cfg.ctl, ic.tracer, opts);
    w.series("energy.csv", energy);

    RunManifest m;
    m.kind = "run";
    m.config = config_to_json(cfg);
    m.extra = {{"seeds", {cfg.base.seed}}, {"sample", 0}};
    m.artifacts = std::move(w.artifacts);
    write_manifest(out, std::move(m));
    std::cout << "run: " << index << " snapshots written to " << out.string() << "\n";
}

// ---- ensemble ------------------------------------------------------------------

void cmd_ensemble(const std::string& config_path, const fs::path& out, std::optional<int> samples, int workers) {
    EnsembleConfig cfg = load_config(config_path);
    if (samples) cfg.M = *samples;
    if (cfg.M < 1) throw ConfigError("samples: must be >= 1");
    const EnsembleResult res = run_ensemble(cfg, workers);

    ArtifactWriter w{out, {}};
    w.text("config.json", config_to_json(cfg).dump(2) + "\n");
    const int n = cfg.grid.phys_n;
    const auto mom = moments(res.acc);
    for (std::size_t t = 0; t < mom.size(); ++t) {
        const MomentFields& f = mom[t];
        w.field("fields/" + indexed("mean_x", t), FieldKind::mean_x, f.time, n, f.mean_u);
        w.field("fields/" + indexed("mean_y", t), FieldKind::mean_y, f.time, n, f.mean_v);
        w.field("fields/" + indexed("second_xx", t), FieldKind::second_xx, f.time, n, f.second_uu);
        w.field("fields/" + indexed("second_xy", t), FieldKind::second_xy, f.time, n, f.second_uv);
        w.field("fields/" + indexed("second_yy", t), FieldKind::second_yy, f.time, n, f.second_vv);
        w.field("fields/" + indexed("variance", t), FieldKind::variance, f.time, n, f.variance);
    }
    if (!res.probes.empty()) {
        Table pt{{"probe", "x1", "x2", "sample", "time", "u", "v"}, std::vector<std::vector<double>>(7)};
        for (std::size_t p = 0; p < res.probes.size(); ++p) {
            const ProbeRecord& rec = res.probes[p];
            for (int s = 0; s < rec.samples(); ++s)
                for (std::size_t t = 0; t < rec.times.size(); ++t) {
                    const Vec2& v = rec.at(s, static_cast<int>(t));
                    const double row[] = {double(p), rec.point[0], rec.point[1], double(s), rec.times[t], v[0], v[1]};
                    for (int c = 0; c < 7; ++c) pt.columns[c].push_back(row[c]);
                }
        }
        w.series("probes.csv", pt);
    }
    if (res.lattice.side > 0) {
        const LatticeSamples& L = res.lattice;
        Table lt{{"sample", "time_index", "a", "b", "u", "v"}, std::vector<std::vector<double>>(6)};
        for (int s = 0; s < L.M; ++s)
            for (std::size_t t = 0; t < L.times.size(); ++t)
                for (int a = 0; a < L.side; ++a)
                    for (int b = 0; b < L.side; ++b) {
                        const Vec2& v = L.at(s, static_cast<int>(t), a, b);
                        const double row[] = {double(s), double(t), double(a), double(b), v[0], v[1]};
                        for (int c = 0; c < 6; ++c) lt.columns[c].push_back(row[c]);
                    }
        w.series("lattice.csv", lt);
    }
    for (const auto& r : res.retained)
        for (std::size_t t = 0; t < r.snapshots.size(); ++t) {
            char stem[32];
            std::snprintf(stem, sizeof stem, "retained/sample_%05d_vorticity", r.index);
            w.field(indexed(stem, t), FieldKind::vorticity, r.snapshots[t].time, synthesize(r.snapshots[t].eta));
        }

    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : res.failures)
        failures.push_back({{"sample", f.index}, {"seed", f.seed}, {"time", f.time}, {"message", f.message}});
    RunManifest m;
    m.kind = "ensemble";
    m.config = config_to_json(cfg);
    m.extra = {{"seeds", {cfg.base_seed()}}, {"samples", res.acc.count}, {"failures", failures}};
    m.artifacts = std::move(w.artifacts);
    write_manifest(out, std::move(m));
    std::cout << "ensemble: " << res.acc.count << " samples folded (" << res.failures.size() << " failed), "
              << mom.size() << " snapshot times written to " << out.string() << "\n";
}

// ---- loading run directories -------------------------------------------------------

struct RunDir {
    fs::path dir;
    RunManifest manifest;
    EnsembleConfig cfg;

    std::vector<double> field(const std::string& stem, std::size_t t) const {
        return read_field(dir / "fields" / indexed(stem, t)).data;
    }
    bool is_ensemble() const { return manifest.kind == "ensemble"; }
};

RunDir open_run(const fs::path& dir) {
    if (!fs::exists(dir / "manifest.json")) throw ConfigError(dir.string() + ": no manifest.json (not a run directory)");
    RunDir r;
    r.dir = dir;
    r.manifest = read_manifest(dir);
    r.cfg = parse_config(r.manifest.config);
    return r;
}

RunDir open_ensemble(const fs::path& dir) {
    RunDir r = open_run(dir);
    if (!r.is_ensemble()) throw ConfigError(dir.string() + ": expected an ensemble directory, found a single run");
    return r;
}

void require_compatible(const RunDir& a, const RunDir& b, bool same_grid) {
    if (a.manifest.kind != b.manifest.kind)
        throw ConfigError("manifest mismatch: " + a.manifest.kind + " vs " + b.manifest.kind + " directories");
    if (a.cfg.request_times != b.cfg.request_times)
        throw ConfigError("manifest mismatch: snapshot times differ");
    if (same_grid && !(a.cfg.grid == b.cfg.grid)) throw ConfigError("manifest mismatch: grids differ");
}

Table table_with(std::vector<std::string> names) {
    Table t;
    t.columns.resize(names.size());
    t.names = std::move(names);
    return t;
}

void emit(const Table& t, const std::string& out) {
    if (out.empty())
        std::cout << encode_series(t);
    else
        write_series(out, t);
}

// ---- statistics subcommands ------------------------------------------------------

void cmd_cauchy(const fs::path& a_dir, const fs::path& b_dir, const std::string& out) {
    const RunDir a = open_run(a_dir), b = open_run(b_dir);
    require_compatible(a, b, false);
    const GridSpec& ga = a.cfg.grid;
    const GridSpec& gb = b.cfg.grid;
    auto dist = [&](const std::string& stem, std::size_t t) {
        return field_distance(a.field(stem, t), ga, b.field(stem, t), gb);
    };
    const auto& times = a.cfg.request_times;
    if (a.is_ensemble()) {
        Table tab = table_with({"time", "mean", "second_xx", "second_xy", "second_yy"});
        for (std::size_t t = 0; t < times.size(); ++t) {
            const double row[] = {times[t], dist("mean_x", t) + dist("mean_y", t), dist("second_xx", t),
                                  dist("second_xy", t), dist("second_yy", t)};
            for (int c = 0; c < 5; ++c) tab.columns[c].push_back(row[c]);
        }
        emit(tab, out);
    } else {
        Table tab = table_with({"time", "velocity"});
        for (std::size_t t = 0; t < times.size(); ++t) {
            tab.columns[0].push_back(times[t]);
            tab.columns[1].push_back(dist("velocity_x", t) + dist("velocity_y", t));
        }
        emit(tab, out);
    }
}

std::vector<ProbeRecord> load_probes(const RunDir& r) {
    std::vector<ProbeRecord> out;
    if (!fs::exists(r.dir / "probes.csv")) return out;
    const Table t = read_series(r.dir / "probes.csv");
    const auto& times = r.cfg.request_times;
    const int M = r.manifest.extra.value("samples", r.cfg.M);
    out.resize(r.cfg.probes.size());
    for (std::size_t p = 0; p < out.size(); ++p) {
        out[p].point = r.cfg.probes[p];
        std::tie(out[p].row, out[p].col) = nearest_node(out[p].point, r.cfg.grid.phys_n);
        out[p].times = times;
        out[p].values.assign(static_cast<std::size_t>(M) * times.size(), Vec2{0.0, 0.0});
    }
    const auto& probe = t.column("probe");
    const auto& sample = t.column("sample");
    const auto& u = t.column("u");
    const auto& v = t.column("v");
    for (std::size_t i = 0; i < t.rows(); ++i) {
        const auto p = static_cast<std::size_t>(probe[i]);
        const std::size_t s = static_cast<std::size_t>(sample[i]);
        const std::size_t ti = i % times.size();
        if (p >= out.size() || s >= static_cast<std::size_t>(M)) throw FormatError("probes.csv: index out of range");
        out[p].values[s * times.size() + ti] = {u[i], v[i]};
    }
    return out;
}

LatticeSamples load_lattice(const RunDir& r) {
    LatticeSamples L;
    if (!fs::exists(r.dir / "lattice.csv")) return L;
    const Table t = read_series(r.dir / "lattice.csv");
    L.side = r.cfg.lattice;
    L.M = r.manifest.extra.value("samples", r.cfg.M);
    L.times = r.cfg.request_times;
    L.values.assign(static_cast<std::size_t>(L.M) * L.times.size() * L.side * L.side, Vec2{0.0, 0.0});
    if (t.rows() != L.values.size()) throw FormatError("lattice.csv: unexpected row count");
    const auto& u = t.column("u");
    const auto& v = t.column("v");
    for (std::size_t i = 0; i < t.rows(); ++i) L.values[i] = {u[i], v[i]};
    return L;
}

void cmd_wasserstein(const fs::path& a_dir, const fs::path& b_dir, int stride, const std::string& out) {
    const RunDir a = open_ensemble(a_dir), b = open_ensemble(b_dir);
    require_compatible(a, b, false);
    const LatticeSamples la = load_lattice(a), lb = load_lattice(b);
    const bool use_lattice = la.side > 0 && lb.side > 0;
    std::vector<ProbeRecord> pa, pb;
    if (!use_lattice) {
        pa = load_probes(a);
        pb = load_probes(b);
        if (pa.empty() || pa.size() != pb.size())
            throw ConfigError("manifest mismatch: wasserstein needs a lattice or matching probes in both directories");
    } else if (la.side != lb.side || la.M != lb.M) {
        throw ConfigError("manifest mismatch: lattices differ in size or sample count");
    }
    Table tab = table_with({"time", "w1"});
    for (std::size_t t = 0; t < a.cfg.request_times.size(); ++t) {
        tab.columns[0].push_back(a.cfg.request_times[t]);
        tab.columns[1].push_back(use_lattice ? mean_wasserstein(la, lb, t, stride) : mean_wasserstein(pa, pb, t));
    }
    emit(tab, out);
}

void cmd_stats(const fs::path& dir, const std::string& out, std::optional<double> slice_x1) {
    const RunDir r = open_ensemble(dir);
    const int n = r.cfg.grid.phys_n;
    const double h2 = std::pow(kTwoPi / n, 2);
    Table tab = table_with({"time", "mean_energy", "second_trace", "avg_variance"});
    for (std::size_t t = 0; t < r.cfg.request_times.size(); ++t) {
        const auto mx = r.field("mean_x", t), my = r.field("mean_y", t);
        const auto sxx = r.field("second_xx", t), syy = r.field("second_yy", t), var = r.field("variance", t);
        double e = 0.0, s = 0.0, v = 0.0;
        for (std::size_t i = 0; i < mx.size(); ++i) {
            e += 0.5 * (mx[i] * mx[i] + my[i] * my[i]);
            s += sxx[i] + syy[i];
            v += var[i];
        }
        const double row[] = {r.cfg.request_times[t], h2 * e, h2 * s, h2 * v};
        for (int c = 0; c < 4; ++c) tab.columns[c].push_back(row[c]);

        if (slice_x1) {
            std::vector<double> var_x(mx.size());
            for (std::size_t i = 0; i < mx.size(); ++i) var_x[i] = std::max(0.0, sxx[i] - mx[i] * mx[i]);
            const Profile pm = slice(mx, n, *slice_x1);
            const Profile pv = slice(var_x, n, *slice_x1);
            Table st{{"x2", "mean_x", "variance_x"}, {pm.x2, pm.values, pv.values}};
            char name[32];
            std::snprintf(name, sizeof name, "slice_%04zu.csv", t);
            const fs::path target = out.empty() ? fs::path(name) : fs::path(out).parent_path() / name;
            write_series(target, st);
        }
    }
    emit(tab, out);
}

void cmd_probe(const fs::path& dir, int probe, int bins, const std::string& out) {
    const RunDir r = open_ensemble(dir);
    const auto probes = load_probes(r);
    if (probe < 0 || probe >= static_cast<int>(probes.size()))
        throw ConfigError("probe: index " + std::to_string(probe) + " out of range (" +
                          std::to_string(probes.size()) + " probes)");
    Table tab = table_with({"time", "component", "lo", "hi", "count"});
    const ProbeRecord& rec = probes[probe];
    for (std::size_t t = 0; t < rec.times.size(); ++t)
        for (int c = 1; c <= 2; ++c) {
            const Histogram hgm = histogram_at(rec, t, c, bins);
            for (int b = 0; b < bins; ++b) {
                const double row[] = {rec.times[t], double(c), hgm.edges[b], hgm.edges[b + 1], double(hgm.counts[b])};
                for (int k = 0; k < 5; ++k) tab.columns[k].push_back(row[k]);
            }
        }
    emit(tab, out);
}

void cmd_spread(const fs::path& dir, const std::vector<double>& window, const std::string& out) {
    const RunDir r = open_ensemble(dir);
    if (window.size() != 2 || !(window[0] < window[1])) throw ConfigError("window: expected LO HI with LO < HI");
    const int n = r.cfg.grid.phys_n;
    const double h2 = std::pow(kTwoPi / n, 2);
    std::vector<double> times = r.cfg.request_times, values;
    for (std::size_t t = 0; t < times.size(); ++t) {
        double v = 0.0;
        for (double x : r.field("variance", t)) v += x;
        values.push_back(h2 * v);
    }
    const SpreadSeries s = spread_series(times, values, window[0], window[1]);
    const BoundReport rep = variance_bound_check(s);
    emit(Table{{"time", "avg_variance"}, {s.times, s.values}}, out);
    std::cout << "slope " << format_real(s.slope) << " over [" << window[0] << ", " << window[1] << "]\n"
              << "bound " << (rep.pass ? "PASS" : "FAIL") << ": " << rep.message << "\n";
}

void cmd_preset(const std::string& name, const fs::path& out, const std::string& scale) {
    const auto entries = make_preset(name, parse_preset_scale(scale));
    for (const auto& e : entries) {
        const fs::path p = out / (e.label + ".json");
        write_file_atomic(p, config_to_json(e.config).dump(2) + "\n");
        std::cout << p.string() << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    tune_allocator();
    CLI::App app{"Measure-valued solutions of 2D incompressible Euler via spectral viscosity ensembles", "mvs"};
    app.require_subcommand(1);

    std::string config, out, a_dir, b_dir, run_dir, preset_name, scale = "desk";
    bool tracer = false;
    std::optional<int> samples;
    int workers = 0, stride = 1, probe = 0, bins = 32;
    std::optional<double> slice_x1;
    std::vector<double> window{2.0, 4.0};

    auto* run = app.add_subcommand("run", "Evolve sample 0 of a config and write snapshots");
    run->add_option("--config", config, "Config JSON")->required();
    run->add_option("--out", out, "Output directory")->required();
    run->add_flag("--tracer", tracer, "Advect a passive tracer");

    auto* ens = app.add_subcommand("ensemble", "Run a Monte Carlo ensemble");
    ens->add_option("--config", config, "Config JSON")->required();
    ens->add_option("--out", out, "Output directory")->required();
    ens->add_option("--samples", samples, "Number of samples (overrides M)");
    ens->add_option("--workers", workers, "Worker threads (default: MVS_WORKERS or core count)");

    auto* stats = app.add_subcommand("stats", "Moment summaries of an ensemble directory");
    stats->add_option("--run", run_dir, "Ensemble directory")->required();
    stats->add_option("--out", out, "CSV output (stdout if omitted)");
    stats->add_option("--slice", slice_x1, "Also write x1 = const slices of mean and variance of v1");

    auto* cauchy = app.add_subcommand("cauchy", "Squared L2 differences between two run directories");
    cauchy->add_option("--a", a_dir)->required();
    cauchy->add_option("--b", b_dir)->required();
    cauchy->add_option("--out", out, "CSV output (stdout if omitted)");

    auto* wass = app.add_subcommand("wasserstein", "Spatially averaged W1 distance between two ensembles");
    wass->add_option("--a", a_dir)->required();
    wass->add_option("--b", b_dir)->required();
    wass->add_option("--stride", stride, "Lattice stride")->check(CLI::PositiveNumber);
    wass->add_option("--out", out, "CSV output (stdout if omitted)");

    auto* prb = app.add_subcommand("probe", "Histograms of probe samples");
    prb->add_option("--run", run_dir)->required();
    prb->add_option("--probe", probe, "Probe index");
    prb->add_option("--bins", bins)->check(CLI::PositiveNumber);
    prb->add_option("--out", out, "CSV output (stdout if omitted)");

    auto* spread = app.add_subcommand("spread", "Average variance series, slope and bound check");
    spread->add_option("--run", run_dir)->required();
    spread->add_option("--window", window, "Fit window LO HI")->expected(2);
    spread->add_option("--out", out, "CSV output (stdout if omitted)");

    auto* preset = app.add_subcommand("preset", "Write experiment preset configs");
    preset->add_option("name", preset_name, "Preset name")->required();
    preset->add_option("--out", out, "Output directory")->required();
    preset->add_option("--scale", scale, "desk or paper");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*run) cmd_run(config, out, tracer);
        if (*ens) cmd_ensemble(config, out, samples, workers > 0 ? workers : default_workers());
        if (*stats) cmd_stats(run_dir, out, slice_x1);
        if (*cauchy) cmd_cauchy(a_dir, b_dir, out);
        if (*wass) cmd_wasserstein(a_dir, b_dir, stride, out);
        if (*prb) cmd_probe(run_dir, probe, bins, out);
        if (*spread) cmd_spread(run_dir, window, out);
        if (*preset) cmd_preset(preset_name, out, scale);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DivergenceError& e) {
        std::cerr << "error: solver diverged at t = " << format_real(e.time()) << ": " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
