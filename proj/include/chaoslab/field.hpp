#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "chaoslab/covariance.hpp"
#include "chaoslab/grid.hpp"
#include "chaoslab/rng.hpp"

namespace chaoslab {

enum class SynthesisMethod : std::uint32_t { CircleSeries = 0, LayeredStar = 1, DenseFactor = 2 };
const char* to_string(SynthesisMethod method);

// One realization of a real Gaussian field on a grid. `covariance` is the
// exact covariance of the synthesized approximation, so the truncation
// variance at grid point i is covariance->variance(i).
struct FieldSample {
  GridSpec grid;
  std::vector<double> values;
  SynthesisMethod method = SynthesisMethod::CircleSeries;
  std::shared_ptr<const GridCovariance> covariance;

  double truncation_variance(std::size_t i) const { return covariance->variance(i); }
  // Content hash of grid, method and values; ties derived objects to their field.
  std::uint64_t fingerprint() const;
};

// Circle series sum_{k <= n} k^{-1/2} (A_k cos 2 pi k t + B_k sin 2 pi k t) on
// a periodic grid of [0, 1). Coefficients are folded into one inverse FFT, so
// any mode count works with any grid size.
class CircleSynthesizer {
 public:
  CircleSynthesizer(int n_modes, const GridSpec& grid);
  FieldSample sample(RngStream& rng) const;
  // Draws A_1, B_1, ..., A_n, B_n in that order.
  FieldSample sample_from_coefficients(std::span<const double> a, std::span<const double> b) const;
  int n_modes() const { return n_modes_; }
  const GridSpec& grid() const { return grid_; }
  const std::shared_ptr<const GridCovariance>& covariance() const { return covariance_; }

 private:
  int n_modes_;
  GridSpec grid_;
  std::shared_ptr<const GridCovariance> covariance_;
};

// Layered almost star-scale field on a periodic box. Layer covariances
// k(e^{u_m} r)(1 - e^{-alpha u_m}) du share one circulant; its spectrum is
// nonnegative because each layer is a periodized compactly supported positive
// definite function. The region of interest [origin, origin + roi_extent)^d
// must leave at least one unit of padding so wrap-around never correlates
// points inside it.
class StarSynthesizer {
 public:
  StarSynthesizer(const GridSpec& grid, const LayeredNoiseParams& params, const SeedCovariance& seed,
                  double roi_extent);
  FieldSample sample(RngStream& rng) const;
  const GridSpec& grid() const { return grid_; }
  const std::shared_ptr<const GridCovariance>& covariance() const { return covariance_; }
  double roi_extent() const { return roi_extent_; }

 private:
  GridSpec grid_;
  double roi_extent_;
  std::shared_ptr<const GridCovariance> covariance_;
  std::vector<double> amplitude_;  // sqrt(lambda_k / N)
};

// Symmetric square-root factorization of a covariance matrix.
class DenseSynthesizer {
 public:
  explicit DenseSynthesizer(std::shared_ptr<const GridCovariance> covariance);
  FieldSample sample(RngStream& rng) const;
  const std::shared_ptr<const GridCovariance>& covariance() const { return covariance_; }
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  std::shared_ptr<const GridCovariance> covariance_;
  Eigen::MatrixXd factor_;
  double min_eigenvalue_ = 0.0;
};

FieldSample sample_circle_field(int n_modes, const GridSpec& grid, RngStream& rng);
FieldSample sample_star_field(const GridSpec& grid, const LayeredNoiseParams& params, const SeedCovariance& seed,
                              double roi_extent, RngStream& rng);
FieldSample sample_dense(std::shared_ptr<const GridCovariance> covariance, RngStream& rng);

// Normalized bump exp(-1 / (1 - |x/delta|^2)) on the periodic lags of `grid`.
std::vector<double> mollifier_weights(const GridSpec& grid, double delta);
// Periodic convolution with the bump of radius delta; the covariance follows.
FieldSample mollify(const FieldSample& field, double delta);

void write_binary(std::ostream& out, const FieldSample& field);
// Reads a binary record; the covariance is not stored and comes back null.
FieldSample read_binary(std::istream& in);
// Rows: index coordinates then value.
void write_csv(std::ostream& out, const FieldSample& field);

}  // namespace chaoslab
