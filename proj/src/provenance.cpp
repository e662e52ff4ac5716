#include "eulerlab/provenance.hpp"

#include <cstdio>

namespace eulerlab {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const nlohmann::json& config) {
  // nlohmann::json objects are std::map backed, so dump() is key-sorted.
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config.dump())));
  return buf;
}

std::string provenance_comment(const nlohmann::json& config) {
  return "eulerlab " + std::string(kVersion) + " config=" + config_hash(config);
}

}  // namespace eulerlab
