#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "foi/audio.hpp"

#ifndef FOI_VERSION_STRING
#define FOI_VERSION_STRING "0.1.0"
#endif

namespace foi {

inline constexpr const char* kVersion = FOI_VERSION_STRING;

// FNV-1a, used for provenance hashes (not cryptographic).
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string hash_string(const std::string& s) {
  return hex64(fnv1a64(s.data(), s.size()));
}

inline std::string hash_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("hash_file: cannot open '" + path + "'");
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (f.read(buf, sizeof buf) || f.gcount() > 0)
    h = fnv1a64(buf, std::size_t(f.gcount()), h);
  return hex64(h);
}

// Run manifest written next to every CLI output: enough to trace any
// artifact back to the exact config and inputs that produced it.
inline void write_run_manifest(const std::string& path, const std::string& command,
                               const std::string& config_hash,
                               const std::vector<std::pair<std::string, std::string>>& inputs,
                               const std::vector<std::string>& outputs,
                               const nlohmann::json& extra = {}) {
  nlohmann::json j;
  j["tool"] = "foi";
  j["version"] = kVersion;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["inputs"] = nlohmann::json::object();
  for (const auto& [name, hash] : inputs) j["inputs"][name] = hash;
  j["outputs"] = outputs;
  if (!extra.is_null() && !extra.empty()) j["extra"] = extra;
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error("write_run_manifest: cannot open '" + path + "'");
  f << j.dump(2) << "\n";
}

}  // namespace foi
