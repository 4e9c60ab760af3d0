#include "mvs/io_formats.hpp"

#include "mvs/errors.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace mvs {

namespace {

constexpr std::string_view kMagic = "MVSF1\n";

constexpr std::array<FieldKind, 10> kAllKinds{
    FieldKind::vorticity, FieldKind::velocity_x, FieldKind::velocity_y, FieldKind::tracer,    FieldKind::mean_x,
    FieldKind::mean_y,    FieldKind::second_xx,  FieldKind::second_xy,  FieldKind::second_yy, FieldKind::variance,
};

double parse_real(std::string_view s, bool& ok) {
    // from_chars for double is missing from some standard libraries; strtod is
    // exact for 17-digit decimal input.
    std::string tmp(s);
    char* end = nullptr;
    const double x = std::strtod(tmp.c_str(), &end);
    ok = !tmp.empty() && end == tmp.c_str() + tmp.size();
    return x;
}

}  // namespace

std::string to_string(FieldKind k) {
    switch (k) {
        case FieldKind::vorticity: return "vorticity";
        case FieldKind::velocity_x: return "velocity_x";
        case FieldKind::velocity_y: return "velocity_y";
        case FieldKind::tracer: return "tracer";
        case FieldKind::mean_x: return "mean_x";
        case FieldKind::mean_y: return "mean_y";
        case FieldKind::second_xx: return "second_xx";
        case FieldKind::second_xy: return "second_xy";
        case FieldKind::second_yy: return "second_yy";
        case FieldKind::variance: return "variance";
    }
    return "?";
}

FieldKind parse_field_kind(std::string_view token) {
    for (FieldKind k : kAllKinds)
        if (to_string(k) == token) return k;
    throw FormatError("field file: unknown kind '" + std::string(token) + "'");
}

std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---- field files ---------------------------------------------------------------

std::string encode_field(const FieldFile& f) {
    if (f.data.size() != static_cast<std::size_t>(f.n1) * f.n2)
        throw FormatError("field file: payload size does not match n1*n2");
    std::string out(kMagic);
    out += to_string(f.kind) + " " + std::to_string(f.n1) + " " + std::to_string(f.n2) + " " +
           format_real(f.time) + "\n";
    const std::size_t header = out.size();
    out.resize(header + 8 * f.data.size());
    for (std::size_t i = 0; i < f.data.size(); ++i) {
        const auto bits = std::bit_cast<std::uint64_t>(f.data[i]);
        for (int b = 0; b < 8; ++b) out[header + 8 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
    }
    return out;
}

FieldFile decode_field(std::string_view bytes) {
    if (bytes.substr(0, kMagic.size()) != kMagic) throw FormatError("field file: bad magic");
    bytes.remove_prefix(kMagic.size());
    const auto eol = bytes.find('\n');
    if (eol == std::string_view::npos) throw FormatError("field file: truncated header");
    std::istringstream header{std::string(bytes.substr(0, eol))};
    std::string kind, n1s, n2s, ts, extra;
    if (!(header >> kind >> n1s >> n2s >> ts) || (header >> extra))
        throw FormatError("field file: malformed header line");
    FieldFile f;
    f.kind = parse_field_kind(kind);
    auto parse_int = [](const std::string& s) {
        int v = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || v <= 0)
            throw FormatError("field file: bad dimension '" + s + "'");
        return v;
    };
    f.n1 = parse_int(n1s);
    f.n2 = parse_int(n2s);
    bool ok = false;
    f.time = parse_real(ts, ok);
    if (!ok) throw FormatError("field file: bad time '" + ts + "'");
    bytes.remove_prefix(eol + 1);
    const std::size_t count = static_cast<std::size_t>(f.n1) * f.n2;
    if (bytes.size() < 8 * count)
        throw FormatError("field file: truncated payload (" + std::to_string(bytes.size()) + " of " +
                          std::to_string(8 * count) + " bytes)");
    if (bytes.size() > 8 * count) throw FormatError("field file: trailing bytes after payload");
    f.data.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[8 * i + b])) << (8 * b);
        f.data[i] = std::bit_cast<double>(bits);
    }
    return f;
}

void write_field(const std::filesystem::path& path, const FieldFile& f) { write_file_atomic(path, encode_field(f)); }

FieldFile read_field(const std::filesystem::path& path) {
    try {
        return decode_field(read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

// ---- series ----------------------------------------------------------------------

const std::vector<double>& Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return columns[i];
    throw FormatError("series: no column '" + std::string(name) + "'");
}

std::string encode_series(const Table& t) {
    if (t.names.size() != t.columns.size()) throw FormatError("series: names and columns differ in count");
    for (const auto& c : t.columns)
        if (c.size() != t.rows()) throw FormatError("series: columns differ in length");
    std::string out;
    for (std::size_t i = 0; i < t.names.size(); ++i) out += (i ? "," : "") + t.names[i];
    out += "\n";
    for (std::size_t r = 0; r < t.rows(); ++r) {
        for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + format_real(t.columns[c][r]);
        out += "\n";
    }
    return out;
}

Table decode_series(std::string_view text) {
    auto split = [](std::string_view line) {
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        return cells;
    };
    Table t;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line_no == 1) {
            for (auto c : split(line)) t.names.emplace_back(c);
            t.columns.resize(t.names.size());
            continue;
        }
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != t.names.size())
            throw FormatError("series: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                              " fields, expected " + std::to_string(t.names.size()));
        for (std::size_t c = 0; c < cells.size(); ++c) {
            bool ok = false;
            const double x = parse_real(cells[c], ok);
            if (!ok)
                throw FormatError("series: line " + std::to_string(line_no) + ": bad number '" +
                                  std::string(cells[c]) + "'");
            t.columns[c].push_back(x);
        }
    }
    if (line_no == 0) throw FormatError("series: missing header row");
    return t;
}

void write_series(const std::filesystem::path& path, const Table& t) { write_file_atomic(path, encode_series(t)); }

Table read_series(const std::filesystem::path& path) {
    try {
        return decode_series(read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

// ---- files -------------------------------------------------------------------------

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!os) throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string file_sha256(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

// ---- manifest ----------------------------------------------------------------------

nlohmann::json to_json(const RunManifest& m) {
    nlohmann::json arts = nlohmann::json::array();
    for (const auto& a : m.artifacts) arts.push_back({{"path", a.path}, {"sha256", a.sha256}});
    return {{"kind", m.kind},       {"tool_version", m.tool_version}, {"created", m.created},
            {"config", m.config},   {"extra", m.extra},               {"artifacts", arts}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
    try {
        RunManifest m;
        m.kind = j.at("kind").get<std::string>();
        m.tool_version = j.at("tool_version").get<std::string>();
        m.created = j.value("created", "");
        m.config = j.at("config");
        m.extra = j.value("extra", nlohmann::json::object());
        for (const auto& a : j.at("artifacts"))
            m.artifacts.push_back({a.at("path").get<std::string>(), a.at("sha256").get<std::string>()});
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("manifest: ") + e.what());
    }
}

void write_manifest(const std::filesystem::path& dir, RunManifest m) {
    for (auto& a : m.artifacts) a.sha256 = file_sha256(dir / a.path);
    if (m.created.empty()) {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        m.created = buf;
    }
    write_file_atomic(dir / "manifest.json", to_json(m).dump(2) + "\n");
}

RunManifest read_manifest(const std::filesystem::path& dir, bool verify) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(dir / "manifest.json"));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError((dir / "manifest.json").string() + ": " + e.what());
    }
    RunManifest m = manifest_from_json(j);
    if (verify)
        for (const auto& a : m.artifacts) {
            const auto p = dir / a.path;
            if (!std::filesystem::exists(p)) throw FormatError("manifest: missing artifact " + a.path);
            if (file_sha256(p) != a.sha256) throw FormatError("manifest: checksum mismatch for " + a.path);
        }
    return m;
}

}  // namespace mvs
