#include "mvs/config.hpp"

#include "mvs/errors.hpp"
#include "mvs/io_formats.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mvs {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys{
    "kind",    "N",         "phys_n",    "M",        "delta",  "rho",    "K",
    "perturbation", "times", "seed",     "epsilon",  "m",      "viscosity", "cfl",
    "dt_max",  "dt_fixed",  "probes",    "lattice",  "retain_stride", "tracer",
};

[[noreturn]] void fail(const std::string& key, const std::string& msg) { throw ConfigError(key + ": " + msg); }

double get_real(const json& doc, const std::string& key) {
    const json& v = doc.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
}

int get_int(const json& doc, const std::string& key) {
    const json& v = doc.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    const auto x = v.get<long long>();
    if (x < -(1LL << 30) || x > (1LL << 30)) fail(key, "out of range");
    return static_cast<int>(x);
}

std::string get_string(const json& doc, const std::string& key) {
    const json& v = doc.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
}

// Re-raises validation failures from the domain types under a key path.
template <class F>
void check(const std::string& key, F&& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        if (what.rfind(key + ":", 0) == 0) throw;
        fail(key, what);
    }
}

}  // namespace

EnsembleConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
    for (const auto& [k, v] : doc.items())
        if (!kKnownKeys.count(k)) fail(k, "unknown key");
    for (const char* req : {"kind", "N", "times"})
        if (!doc.contains(req)) fail(req, "required key missing");

    EnsembleConfig cfg;
    check("kind", [&] { cfg.base.kind = parse_datum_kind(get_string(doc, "kind")); });
    cfg.base.K = default_modes(cfg.base.kind);

    const int N = get_int(doc, "N");
    if (N < 4) fail("N", "must be >= 4");
    const int phys = doc.contains("phys_n") ? get_int(doc, "phys_n") : GridSpec::default_phys_n(N);
    check("phys_n", [&] { cfg.grid = GridSpec(N, phys); });

    if (doc.contains("M")) cfg.M = get_int(doc, "M");
    if (cfg.M < 1) fail("M", "must be >= 1");

    if (doc.contains("delta")) cfg.base.delta = get_real(doc, "delta");
    if (!(cfg.base.delta >= 0.0)) fail("delta", "must be >= 0");
    if (doc.contains("rho")) cfg.base.rho = get_real(doc, "rho");
    if (!(cfg.base.rho > 0.0)) fail("rho", "must be > 0");
    if (doc.contains("K")) cfg.base.K = get_int(doc, "K");
    if (cfg.base.K < 1) fail("K", "must be >= 1");
    if (doc.contains("perturbation"))
        check("perturbation", [&] { cfg.base.perturbation = parse_perturbation_kind(get_string(doc, "perturbation")); });
    if (doc.contains("seed")) {
        const json& s = doc.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            fail("seed", "expected a non-negative integer");
        cfg.base.seed = s.get<std::uint64_t>();
    }
    check("perturbation", [&] { cfg.base.validate(); });

    const json& times = doc.at("times");
    if (!times.is_array() || times.empty()) fail("times", "expected a non-empty array of numbers");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!times[i].is_number()) fail("times[" + std::to_string(i) + "]", "expected a number");
        const double t = times[i].get<double>();
        if (!std::isfinite(t) || t < 0.0) fail("times[" + std::to_string(i) + "]", "must be finite and >= 0");
        if (i > 0 && !(t > cfg.request_times.back())) fail("times[" + std::to_string(i) + "]", "must increase");
        cfg.request_times.push_back(t);
    }

    const std::string visc_kind = doc.contains("viscosity") ? get_string(doc, "viscosity") : "fixed";
    if (visc_kind == "tadmor") {
        cfg.visc = ViscositySpec::tadmor(N);
    } else if (visc_kind != "fixed") {
        fail("viscosity", "expected \"fixed\" or \"tadmor\", got \"" + visc_kind + "\"");
    }
    if (doc.contains("epsilon")) cfg.visc.epsilon = get_real(doc, "epsilon");
    if (!(cfg.visc.epsilon >= 0.0)) fail("epsilon", "must be >= 0");
    if (doc.contains("m")) cfg.visc.m = get_int(doc, "m");
    if (cfg.visc.m < 0 || cfg.visc.m > N) fail("m", "must lie in [0, N]");

    if (doc.contains("cfl")) cfg.ctl.cfl = get_real(doc, "cfl");
    if (!(cfg.ctl.cfl > 0.0 && cfg.ctl.cfl <= 1.0)) fail("cfl", "must lie in (0, 1]");
    if (doc.contains("dt_max") && !doc.at("dt_max").is_null()) {
        cfg.ctl.dt_max = get_real(doc, "dt_max");
        if (!(*cfg.ctl.dt_max > 0.0)) fail("dt_max", "must be positive");
    }
    if (doc.contains("dt_fixed") && !doc.at("dt_fixed").is_null()) {
        cfg.ctl.dt_fixed = get_real(doc, "dt_fixed");
        if (!(*cfg.ctl.dt_fixed > 0.0)) fail("dt_fixed", "must be positive");
    }

    if (doc.contains("probes")) {
        const json& pr = doc.at("probes");
        if (!pr.is_array()) fail("probes", "expected an array of [x1, x2] pairs");
        for (std::size_t i = 0; i < pr.size(); ++i) {
            const std::string key = "probes[" + std::to_string(i) + "]";
            if (!pr[i].is_array() || pr[i].size() != 2 || !pr[i][0].is_number() || !pr[i][1].is_number())
                fail(key, "expected [x1, x2]");
            const Vec2 p{pr[i][0].get<double>(), pr[i][1].get<double>()};
            for (double x : p)
                if (!(x >= 0.0 && x < kTwoPi)) fail(key, "coordinates must lie in [0, 2pi)");
            cfg.probes.push_back(p);
        }
    }
    if (doc.contains("lattice")) cfg.lattice = get_int(doc, "lattice");
    if (cfg.lattice < 0 || cfg.lattice > cfg.grid.phys_n) fail("lattice", "must lie in [0, phys_n]");
    if (doc.contains("retain_stride")) cfg.retain_stride = get_int(doc, "retain_stride");
    if (cfg.retain_stride < 0) fail("retain_stride", "must be >= 0");
    if (doc.contains("tracer")) {
        if (!doc.at("tracer").is_boolean()) fail("tracer", "expected true or false");
        cfg.tracer = doc.at("tracer").get<bool>();
    }

    cfg.validate();
    return cfg;
}

EnsembleConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

EnsembleConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const FormatError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_config_text(text);
}

json config_to_json(const EnsembleConfig& cfg) {
    json probes = json::array();
    for (const auto& p : cfg.probes) probes.push_back({p[0], p[1]});
    json doc{
        {"kind", to_string(cfg.base.kind)},
        {"N", cfg.grid.cutoff},
        {"phys_n", cfg.grid.phys_n},
        {"M", cfg.M},
        {"delta", cfg.base.delta},
        {"rho", cfg.base.rho},
        {"K", cfg.base.K},
        {"perturbation", to_string(cfg.base.perturbation)},
        {"times", cfg.request_times},
        {"seed", cfg.base.seed},
        {"viscosity", "fixed"},
        {"epsilon", cfg.visc.epsilon},
        {"m", cfg.visc.m},
        {"cfl", cfg.ctl.cfl},
        {"probes", probes},
        {"lattice", cfg.lattice},
        {"retain_stride", cfg.retain_stride},
        {"tracer", cfg.tracer},
    };
    if (cfg.ctl.dt_max) doc["dt_max"] = *cfg.ctl.dt_max;
    if (cfg.ctl.dt_fixed) doc["dt_fixed"] = *cfg.ctl.dt_fixed;
    return doc;
}

// ---- presets -------------------------------------------------------------------

namespace {

const std::vector<double> kPdfTimes{0.0, 0.5, 1.0, 2.0, 4.0};
const std::vector<double> kDeltaFamily{0.1024, 0.0512, 0.0256, 0.0128, 0.0064};

Vec2 unit_point(double a, double b) { return {kTwoPi * a, kTwoPi * b}; }

EnsembleConfig base_config(DatumKind kind, int N) {
    EnsembleConfig c;
    c.base.kind = kind;
    c.base.K = default_modes(kind);
    c.base.seed = 1;
    c.grid = GridSpec::with_default_padding(N);
    return c;
}

std::vector<int> resolutions(PresetScale scale) {
    if (scale == PresetScale::paper) return {128, 256, 512, 1024};
    return {32, 64, 128};
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"vortex-patch", "sheet-single", "sheet-ensemble", "delta-family", "sign-separation"};
}

PresetScale parse_preset_scale(const std::string& s) {
    if (s == "desk") return PresetScale::desk;
    if (s == "paper") return PresetScale::paper;
    throw ConfigError("scale: expected desk or paper, got '" + s + "'");
}

std::vector<PresetEntry> make_preset(const std::string& name, PresetScale scale) {
    const bool paper = scale == PresetScale::paper;
    std::vector<PresetEntry> out;
    auto label = [&](const std::string& suffix) { return name + "_" + suffix; };

    if (name == "vortex-patch") {
        for (int N : resolutions(scale)) {
            EnsembleConfig c = base_config(DatumKind::vortex_patch, N);
            c.base.delta = 0.0128;
            c.visc = ViscositySpec{1e-5, 0};
            c.request_times = kPdfTimes;
            c.probes = {unit_point(0.65, 0.55)};
            out.push_back({label("N" + std::to_string(N)), c});
        }
    } else if (name == "sheet-single") {
        for (int N : resolutions(scale)) {
            EnsembleConfig c = base_config(DatumKind::flat_sheet, N);
            c.base.delta = 0.01;
            c.base.rho = 0.001;
            c.tracer = true;
            c.request_times = {0.0, 1.0, 2.0};
            out.push_back({label("N" + std::to_string(N)), c});
        }
    } else if (name == "sheet-ensemble") {
        for (int N : resolutions(scale)) {
            EnsembleConfig c = base_config(DatumKind::flat_sheet, N);
            c.base.delta = 0.01;
            c.base.rho = 0.001;
            c.M = paper ? 400 : kDeskMaxM;
            c.request_times = {0.0, 1.0, 2.0};
            c.probes = {unit_point(0.25, 0.77)};
            c.lattice = 16;
            out.push_back({label("N" + std::to_string(N)), c});
        }
    } else if (name == "delta-family") {
        const int N = paper ? 512 : kDeskMaxN;
        EnsembleConfig c = base_config(DatumKind::flat_sheet, N);
        c.base.rho = 0.001;
        c.M = paper ? 400 : kDeskMaxM;
        c.request_times = kPdfTimes;
        c.probes = {unit_point(0.25, 0.77)};
        c.lattice = 16;
        for (const auto& fc : perturbed_family(c, kDeltaFamily)) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "delta%.4f", fc.base.delta);
            out.push_back({label(buf), fc});
        }
    } else if (name == "sign-separation") {
        const int N = paper ? 512 : kDeskMaxN;
        EnsembleConfig c = base_config(DatumKind::flat_sheet, N);
        c.base.rho = 0.008;
        c.request_times = {0.0, 1.0, 2.0, 3.0, 4.0};
        for (const auto& fc : perturbed_family(c, kDeltaFamily)) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "delta%.4f", fc.base.delta);
            out.push_back({label(buf), fc});
        }
    } else {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("preset: unknown preset '" + name + "' (known: " + known + ")");
    }
    for (auto& e : out) {
        if (!paper) {
            e.config.M = std::min(e.config.M, kDeskMaxM);
            if (e.config.grid.cutoff > kDeskMaxN) e.config.grid = GridSpec::with_default_padding(kDeskMaxN);
        }
        e.config.validate();
    }
    return out;
}

}  // namespace mvs
