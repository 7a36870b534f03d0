#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nlch/solver.hpp"

namespace nlch {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Full run configuration: the solver config plus output controls.
struct RunConfig {
    SolverConfig solver;
    std::filesystem::path out_dir = "out";
    int snapshot_every = 0;  // steps between snapshots; 0 disables
    std::string preset;      // set when constructed from a named preset
    bool quiet = false;
};

/// Parses the flat `section.key = value` config format ('#' comments).
/// Every hypothesis validator runs before this returns: initial data
/// admissibility, the reaction sign condition, and kernel resolution.
/// Parse errors carry the line number; validation errors name the violated
/// hypothesis.
RunConfig parse_config(const std::filesystem::path& path);

/// Parses config text (same format) with a diagnostic name for messages.
RunConfig parse_config_text(const std::string& text, const std::string& name);

/// Canonical text form; reparsing it reproduces the identical RunConfig.
std::string normalize_config(const RunConfig& config);

/// FNV-1a hash of the normalized config text.
std::uint64_t config_hash(const RunConfig& config);

/// Writes the run manifest (config hash, seed, format versions).
void write_manifest(const RunConfig& config, const std::filesystem::path& path);

/// Named acceptance scenarios.
std::vector<std::string> preset_names();
RunConfig make_preset(const std::string& name);

}  // namespace nlch
