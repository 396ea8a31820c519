#include "ks/report_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ks/errors.hpp"

namespace ks::io {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::function<void(std::ostream&)>& body) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw config_error("cannot open '" + tmp.string() + "' for writing");
        body(out);
        out.flush();
        if (!out) throw config_error("write to '" + tmp.string() + "' failed");
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries,
                    bool include_timestamp) {
    atomic_write(path, [&](std::ostream& out) {
        for (const auto& e : entries) out << e.key << " = " << e.value << '\n';
        if (include_timestamp) {
            const auto now = std::chrono::system_clock::now();
            out << "written_at = "
                << std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count()
                << '\n';
        }
    });
}

void ensure_directory(const std::string& path) {
    std::filesystem::create_directories(path);
}

std::string resolve_output_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    fs::path p(dir);
    if (p.is_absolute()) return p.string();
    if (const char* root = std::getenv("KS_OUTPUT_ROOT"))
        return (fs::path(root) / p).string();
    return p.string();
}

}  // namespace ks::io
