#include "qwalk/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "qwalk/version.hpp"

namespace qwalk {

RunManifest make_manifest(
    std::string command,
    std::vector<std::pair<std::string, std::string>> parameters,
    std::optional<std::uint64_t> seed) {
  RunManifest m;
  m.command = std::move(command);
  m.parameters = std::move(parameters);
  m.seed = seed;
  m.version = kVersion;

  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  m.timestamp = buf;
  return m;
}

void write_manifest_header(std::ostream& os, const RunManifest& m) {
  os << "# command: " << m.command << "\n";
  for (const auto& [key, value] : m.parameters) {
    os << "# " << key << ": " << value << "\n";
  }
  if (m.seed) {
    os << "# seed: " << *m.seed << "\n";
  }
  os << "# version: " << m.version << "\n";
  os << "# timestamp: " << m.timestamp << "\n";
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace qwalk
