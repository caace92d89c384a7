#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace chaoslab {

// Renders the data files of an artifact directory as SVG next to them.
//   smallball: smallball*.csv -> log-log CDF with CI band, censored points marked
//   density:   hist_*.csv     -> heatmap
//   moments:   moments.csv, negative_moments.csv, covariance.csv, min_dist.csv,
//              peaks.csv      -> tables with z-scores highlighted
//   scan:      scan.json      -> step plot of the smallest eigenvalue with alpha*
//   all:       every kind present
// Throws DataError when nothing matches `kind` or a file lacks a column.
std::vector<std::filesystem::path> plot(const std::filesystem::path& dir, const std::string& kind = "all");

std::filesystem::path plot_smallball(const std::filesystem::path& csv);
std::filesystem::path plot_density(const std::filesystem::path& csv);
std::filesystem::path plot_table(const std::filesystem::path& csv);
std::filesystem::path plot_scan(const std::filesystem::path& json);

}  // namespace chaoslab
