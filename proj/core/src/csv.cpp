#include "bslab/csv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bslab {

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_file: cannot open " + path.string());
    os.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!os) throw std::runtime_error("write_file: short write to " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_file: cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::size_t csv_row_count(const std::string& body) {
    std::size_t rows = 0;
    std::size_t pos = body.find('\n');
    while (pos != std::string::npos) {
        const std::size_t next = body.find('\n', pos + 1);
        const std::size_t len = (next == std::string::npos ? body.size() : next) - pos - 1;
        if (len > 0) ++rows;
        pos = next;
    }
    return rows;
}

void write_manifest(const std::filesystem::path& dir, const std::vector<ManifestEntry>& entries) {
    std::string body = "filename,sha256,rows\n";
    for (const auto& e : entries)
        body += e.filename + "," + e.sha256 + "," + std::to_string(e.rows) + "\n";
    write_file(dir / "manifest.csv", body);
}

ManifestEntry emit_artifact(const std::filesystem::path& dir, const std::string& filename,
                            const std::string& body) {
    write_file(dir / filename, body);
    return {filename, sha256_hex(body), csv_row_count(body)};
}

}  // namespace bslab
