#include "cascade/manifest.hpp"

namespace cascade {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

std::string canonical_spec_hash(const nlohmann::json& spec_doc) {
  // nlohmann::json objects iterate in sorted key order, so dump() is canonical
  return hex64(fnv1a64(spec_doc.dump()));
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["spec_label"] = spec_label;
  j["spec_hash"] = spec_hash;
  j["parameters"] = parameters;
  j["tool_version"] = tool_version;
  j["timestamp"] = timestamp;
  return j;
}

std::string RunManifest::digest() const {
  nlohmann::json j = to_json();
  j.erase("timestamp");
  return hex64(fnv1a64(j.dump()));
}

}  // namespace cascade
