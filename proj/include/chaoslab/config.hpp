#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace chaoslab {

enum class ExperimentKind {
  FieldValidate,
  FbMoments,
  NegativeMoment,
  Onsager,
  MinDistIntegral,
  MalliavinSmallball,
  SobolevSmallball,
  Density,
  DecompositionScan,
};
std::string to_string(ExperimentKind kind);
// Throws ConfigError for unknown names.
ExperimentKind kind_from_string(const std::string& s);

// One experiment, read from a flat `key = value` file. Lines starting with
// '#' are comments. Lists are comma separated.
struct ExperimentConfig {
  std::string experiment_id;
  ExperimentKind kind = ExperimentKind::FbMoments;
  int dimension = 1;
  std::optional<double> beta;
  std::vector<double> beta_ladder;
  double alpha = 1.0;
  double delta = 0.01;
  int n_modes = 1024;
  std::size_t grid_points = 2048;
  std::int64_t mc_samples = 10000;
  std::uint64_t master_seed = 1;
  int chains = 8;
  std::filesystem::path output_dir;

  std::string field = "circle";  // field-validate: circle | star
  int n_points = 2;              // min-dist-integral
  int trials = 10000;            // onsager validation (and calibration) batch
  int n_max = 6;                 // onsager
  std::vector<double> alphas{0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 1.5, 2.0};
  std::string gtilde = "zero";
  double bump_strength = 0.5;
  int smoothstep_order = 7;
  double sobolev_index = -0.5;
  std::optional<double> eps_min, eps_max;
  int bins = 48;
  double hist_range = 3.0;

  // beta_ladder if given, else {beta}, else empty.
  std::vector<double> betas() const;

  // Throws ConfigError naming the offending field.
  void validate() const;
  // Canonical key = value text; parse(echo()) round-trips.
  std::string echo() const;

  static ExperimentConfig parse(std::istream& in, const std::string& source = "<config>");
  static ExperimentConfig parse_string(const std::string& text);
  static ExperimentConfig from_file(const std::filesystem::path& path);
};

}  // namespace chaoslab
