#pragma once

// On-disk artifacts.
//
// Field file ("MVSF1"):
//   bytes 0..5   "MVSF1\n"
//   header line  "<kind> <n1> <n2> <time>\n" (ASCII, time with 17 significant digits)
//   payload      n1*n2 IEEE-754 binary64 values, little-endian, row-major with
//                x2 as the slow index; value (i, j) sits at x = (2pi j/n1, 2pi i/n2).
//
// Series: CSV with a header row, reals printed with 17 significant digits.
// Manifest: JSON document listing the config and every artifact with its
// SHA-256.

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

namespace mvs {

enum class FieldKind {
    vorticity,
    velocity_x,
    velocity_y,
    tracer,
    mean_x,
    mean_y,
    second_xx,
    second_xy,
    second_yy,
    variance,
};

std::string to_string(FieldKind k);
/// Throws FormatError naming the token.
FieldKind parse_field_kind(std::string_view token);

struct FieldFile {
    FieldKind kind = FieldKind::vorticity;
    int n1 = 0;
    int n2 = 0;
    double time = 0.0;
    std::vector<double> data;

    friend bool operator==(const FieldFile&, const FieldFile&) = default;
};

std::string encode_field(const FieldFile& f);
/// Throws FormatError on bad magic, malformed header, unknown kind or a
/// payload whose length differs from 8*n1*n2.
FieldFile decode_field(std::string_view bytes);

void write_field(const std::filesystem::path& path, const FieldFile& f);
FieldFile read_field(const std::filesystem::path& path);

struct Table {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    const std::vector<double>& column(std::string_view name) const;
    friend bool operator==(const Table&, const Table&) = default;
};

/// 17-significant-digit rendering; shortest exact form for integers.
std::string format_real(double x);

std::string encode_series(const Table& t);
/// Throws FormatError with the 1-based line number of a ragged or
/// non-numeric row.
Table decode_series(std::string_view text);

void write_series(const std::filesystem::path& path, const Table& t);
Table read_series(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& path);

inline constexpr const char* kToolVersion = "mvs 1.0.0";

struct ManifestArtifact {
    std::string path;  // relative to the run directory
    std::string sha256;
};

struct RunManifest {
    std::string kind;  // "run" or "ensemble"
    nlohmann::json config;
    nlohmann::json extra = nlohmann::json::object();
    std::vector<ManifestArtifact> artifacts;
    std::string created;
    std::string tool_version = kToolVersion;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Computes checksums of the listed artifacts and writes manifest.json last.
void write_manifest(const std::filesystem::path& dir, RunManifest m);
/// Reads manifest.json and verifies that every artifact exists with a
/// matching checksum (FormatError otherwise).
RunManifest read_manifest(const std::filesystem::path& dir, bool verify = true);

}  // namespace mvs
