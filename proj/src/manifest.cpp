#include "ets/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ets/errors.hpp"

namespace ets::manifest {

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot hash " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a(buf.str());
}

std::string hex(std::uint64_t value) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string RunManifest::serialize() const {
  std::ostringstream os;
  os << "[run]\n";
  os << "command = " << command << '\n';
  os << "config_hash = " << config_hash << '\n';
  os << "code_version = " << code_version << '\n';
  // Wall-clock time is intentionally not recorded: outputs are pure functions
  // of the inputs and re-runs must be byte-identical.
  os << "timestamp = reproducible\n\n";
  os << "[summary]\n";
  for (const auto& [k, v] : summary) os << k << " = " << v << '\n';
  os << "\n[files]\n";
  for (const auto& [name, sum] : files) os << name << " = " << sum << '\n';
  return os.str();
}

}  // namespace ets::manifest
