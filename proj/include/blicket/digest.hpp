#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace blicket {

std::string sha256_hex(std::string_view data);

// Stable hash of the canonical serialization (sorted keys, compact).
inline std::string json_digest(const nlohmann::json& j) { return sha256_hex(j.dump()); }

}  // namespace blicket
