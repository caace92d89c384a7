#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "chaoslab/config.hpp"

namespace chaoslab {

struct RunArtifact {
  std::filesystem::path dir;
  std::filesystem::path manifest;
  std::vector<std::filesystem::path> data_files;
  std::vector<std::filesystem::path> plots;
  double wall_seconds = 0.0;
};

// Library version plus the source revision recorded at configure time.
std::string code_version();

// Validates the config, runs the experiment with chains streams keyed by
// (master-seed, chain index), and writes manifest.json, data files and SVG
// plots into the output directory (default runs/<experiment-id>). Data files
// depend only on the config, never on the thread count.
// Throws ConfigError for invalid configs or an unwritable output directory and
// NumericError when a computation breaks down.
RunArtifact run(const ExperimentConfig& config);

}  // namespace chaoslab
