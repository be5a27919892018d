#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

namespace cascade {

inline constexpr const char* kToolVersion = "1.0.0";

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

// Content digest of a spec document: FNV-1a 64 over the canonical (sorted-key)
// JSON dump.
std::string canonical_spec_hash(const nlohmann::json& spec_doc);

// Record of one CLI run. The digest covers the canonicalized manifest JSON
// excluding the timestamp, so identical parameters always map to the same
// output directory and the determinism contract is checkable byte for byte.
struct RunManifest {
  std::string command;
  std::string spec_label;
  std::string spec_hash;
  nlohmann::json parameters;  // depth, tail, seeds, q-grid, windows, ...
  std::string tool_version = kToolVersion;
  std::string timestamp;

  nlohmann::json to_json() const;
  std::string digest() const;
};

}  // namespace cascade
