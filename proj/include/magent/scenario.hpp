#pragma once

#include <filesystem>

#include "magent/sim.hpp"

namespace magent {

// Scenario config file format (JSON). Parsing is strict: unknown keys are
// rejected, and parse(serialize(c)) == c for every valid config.
std::string serialize_config(const ScenarioConfig& config);
ScenarioConfig parse_config(const std::string& text);  // throws DecodeError

// Key directory and secrets files, as written by keygen and run.
std::string serialize_bundle(const TrustBundle& bundle);
TrustBundle parse_bundle(const std::string& text);
std::string serialize_secrets(const SecretBundle& secrets);
SecretBundle parse_secrets(const std::string& text);

Bytes read_file(const std::filesystem::path& path);  // throws std::runtime_error
void write_file(const std::filesystem::path& path, const Bytes& data);
void write_file(const std::filesystem::path& path, const std::string& text);
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace magent
