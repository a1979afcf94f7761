// Deterministic file output: CSV/PGM raster export, JSON run manifests with
// content digests, and atomic writes.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pdw/basin.hpp"

namespace pdw {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Shortest round-trip decimal form (17 significant digits).
std::string format_g17(double v);

/// SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(std::string_view bytes);

/// Writes via a temp file in the same directory plus rename.
/// Throws std::runtime_error when the path is unwritable.
void atomic_write_file(const std::string& path, std::string_view content);

std::string read_file(const std::string& path);

/// CSV with header theta1,dtheta1,survival,in_D,in_S1D,in_S2D,in_B;
/// row-major over cells, dtheta1 varying slowest.
std::string raster_to_csv(const RegionRaster& raster);

/// Same cells in rotated export coordinates (theta1+dtheta1, theta1-dtheta1).
std::string raster_to_rotated_csv(const RegionRaster& raster);

/// 8-bit binary PGM of survival counts (clamped to 255); rows run from high
/// dtheta1 down, image convention.
std::string raster_to_pgm(const RegionRaster& raster);

/// JSON sidecar with the full computation protocol.
std::string raster_metadata_json(const RegionRaster& raster);

struct ManifestEntry {
    std::string path;
    std::string sha256;
};

struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> parameters;  // key, value (ordered)
    int workers = 1;
    double wall_time_s = 0.0;
    std::vector<ManifestEntry> outputs;

    /// Digest over command + parameters (not outputs or timing).
    std::string parameter_digest() const;
    std::string to_json() const;
};

/// Writes `content` to `path` atomically and appends its digest entry.
void write_output(RunManifest& manifest, const std::string& path, std::string_view content);

}  // namespace pdw
