#pragma once

// Config hashing for the comment line every output file starts with.

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

namespace eulerlab {

inline constexpr std::string_view kVersion = "0.1.0";

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

/// FNV-1a of the compact, key-sorted serialisation, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

/// "eulerlab 0.1.0 config=<hash>".
std::string provenance_comment(const nlohmann::json& config);

}  // namespace eulerlab
