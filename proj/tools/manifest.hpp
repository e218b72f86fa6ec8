#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sikam/kam.hpp"
#include "sikam/timefreq.hpp"

namespace sikam::cli {

struct RunManifest {
  std::filesystem::path input;
  std::filesystem::path output_dir = ".";
  // Clean reference for SDR reporting; optional.
  std::filesystem::path reference;
  SeparationConfig separation;
  TransformParams transform;
  // Interfered time ranges in seconds, [start, end].
  std::vector<std::pair<double, double>> support;
  uint64_t seed = 1;
};

// "0.5:1.2,3:3.4" -> {{0.5, 1.2}, {3, 3.4}}. Empty string gives no ranges.
std::vector<std::pair<double, double>> parse_support(const std::string& text);
std::string format_support(const std::vector<std::pair<double, double>>& ranges);

// key = value lines, '#' starts a comment. Relative paths are resolved
// against the manifest's directory. Unknown keys are an error.
void load_manifest(const std::filesystem::path& path, RunManifest& manifest);

// Applies one key/value pair; shared by the file loader and tests.
void apply_setting(RunManifest& manifest, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir = {});

}  // namespace sikam::cli
