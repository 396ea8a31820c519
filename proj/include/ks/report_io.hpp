#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace ks::io {

// Shortest exact decimal form that round-trips a double (17 significant digits).
std::string fmt(double v);

// Write-to-temp-then-rename; the destination never holds a partial file.
void atomic_write(const std::string& path, const std::function<void(std::ostream&)>& body);

std::string read_file(const std::string& path);

// FNV-1a over the raw bytes; used as the config content hash in manifests.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

struct ManifestEntry {
    std::string key;
    std::string value;
};

// Plain "key = value" manifest. The written_at line is the only
// nondeterministic output a run produces.
void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries,
                    bool include_timestamp = true);

void ensure_directory(const std::string& path);

// Resolves an output directory against the KS_OUTPUT_ROOT env var
// (absolute paths are kept as-is).
std::string resolve_output_dir(const std::string& dir);

}  // namespace ks::io
