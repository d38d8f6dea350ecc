#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace qwalk {

/// Reproducibility header carried at the top of every CSV the tools emit.
/// Two runs with the same command, parameters, and seed produce bit-identical
/// data rows; the timestamp is the only line allowed to differ.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;  // ordered as given
  std::optional<std::uint64_t> seed;
  std::string version;
  std::string timestamp;  // ISO-8601 UTC
};

RunManifest make_manifest(
    std::string command,
    std::vector<std::pair<std::string, std::string>> parameters,
    std::optional<std::uint64_t> seed = std::nullopt);

/// '#'-prefixed "key: value" lines: command, each parameter, optional seed,
/// version, timestamp.
void write_manifest_header(std::ostream& os, const RunManifest& m);

/// Round-trip decimal formatting for data rows ("%.17g").
std::string format_double(double v);

}  // namespace qwalk
