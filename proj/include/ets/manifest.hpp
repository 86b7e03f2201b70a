#ifndef ETS_MANIFEST_HPP
#define ETS_MANIFEST_HPP

#include <cstdint>
#include <string>
#include <vector>

// Run manifest: makes every output auditable as a pure function of
// (configuration, dataset, code version). Checksums are FNV-1a 64.

namespace ets::manifest {

inline constexpr const char* kCodeVersion = "carbon-ets 0.1.0";

std::uint64_t fnv1a(const std::string& bytes);
std::uint64_t fnv1a_file(const std::string& path);
std::string hex(std::uint64_t value);

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::string code_version = kCodeVersion;
  std::vector<std::pair<std::string, std::string>> summary;  // key, value
  std::vector<std::pair<std::string, std::string>> files;    // name, checksum

  std::string serialize() const;
};

}  // namespace ets::manifest

#endif
