// Subcommand drivers. Each command renders its data files in memory, then
// writes them together with a manifest into the output directory.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "amc/io/config.hpp"

namespace amc::io {

inline constexpr std::string_view kToolName = "amconv";
inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr std::string_view kManifestName = "manifest.json";

struct OutputFile {
  std::string name;  // relative to the output directory
  std::string content;
};

/// Validates cfg and computes the data files of its command.
std::vector<OutputFile> render_outputs(const RunConfig& cfg);

/// Manifest text: tool version, resolved configuration (as key-value strings
/// and as the serialized config), its digest, derived rates and couplings,
/// the data file list and a UTC timestamp.
std::string make_manifest(const RunConfig& cfg, const std::vector<OutputFile>& files);

/// Recovers the configuration recorded in a manifest; checks the digest.
RunConfig config_from_manifest(std::string_view manifest_text);

struct RunResult {
  std::filesystem::path directory;
  std::vector<std::string> files;  // data files, then the manifest
};

/// Renders and writes everything; throws IoError on file-system failures.
RunResult run(const RunConfig& cfg);

/// Re-executes the run described by a manifest file, optionally into a
/// different directory.
RunResult rerun(const std::filesystem::path& manifest, const std::optional<std::string>& output = std::nullopt);

std::string read_file(const std::filesystem::path& path);

}  // namespace amc::io
