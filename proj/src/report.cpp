#include "nestlab/report.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace nestlab {

Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json polyline_json(const Polyline& pts, size_t max_points) {
    Json arr = Json::array();
    size_t step = std::max<size_t>(1, pts.size() / max_points);
    for (size_t i = 0; i < pts.size(); i += step)
        arr.push_back(Json::array({pts[i].real(), pts[i].imag()}));
    return arr;
}

std::string content_hash(const std::string& canonical) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[20];
    snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

std::string cache_root(const std::string& cli_override) {
    if (!cli_override.empty()) return cli_override;
    if (const char* env = std::getenv("NESTLAB_CACHE")) return env;
    return ".nestlab-cache";
}

std::optional<Json> cache_load(const std::string& root, const std::string& key) {
    std::filesystem::path p = std::filesystem::path(root) / (key + ".json");
    std::ifstream is(p);
    if (!is) return std::nullopt;
    try {
        Json j;
        is >> j;
        return j;
    } catch (...) {
        return std::nullopt;
    }
}

void cache_store(const std::string& root, const std::string& key, const Json& value) {
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    std::filesystem::path p = std::filesystem::path(root) / (key + ".json");
    std::ofstream os(p);
    if (os) os << value.dump(1);
}

}  // namespace nestlab
