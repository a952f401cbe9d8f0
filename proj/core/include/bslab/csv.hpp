#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bslab {

/// SHA-256 digest of a byte string, lowercase hex.
std::string sha256_hex(const std::string& bytes);

/// Write text to a file (binary mode, LF endings as given).
void write_file(const std::filesystem::path& path, const std::string& body);

std::string read_file(const std::filesystem::path& path);

/// Count data rows of a CSV body (lines after the first, ignoring blanks).
std::size_t csv_row_count(const std::string& body);

struct ManifestEntry {
    std::string filename;
    std::string sha256;
    std::size_t rows = 0;
};

/// Write `filename,sha256,rows` lines to <dir>/manifest.csv.
void write_manifest(const std::filesystem::path& dir, const std::vector<ManifestEntry>& entries);

/// Emit one artifact file and return its manifest entry.
ManifestEntry emit_artifact(const std::filesystem::path& dir, const std::string& filename,
                            const std::string& body);

}  // namespace bslab
