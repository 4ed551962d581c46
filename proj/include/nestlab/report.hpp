#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "nestlab/geom.hpp"

namespace nestlab {

using Json = nlohmann::ordered_json;

Json complex_json(Complex z);
Json polyline_json(const Polyline& pts, size_t max_points = 4096);

// Deterministic content hash of a canonical request (FNV-1a 64).
std::string content_hash(const std::string& canonical);

// Cache root: NESTLAB_CACHE or fallback under the working directory.
std::string cache_root(const std::string& cli_override);
std::optional<Json> cache_load(const std::string& root, const std::string& key);
void cache_store(const std::string& root, const std::string& key, const Json& value);

}  // namespace nestlab
