#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "chaoslab/covariance.hpp"
#include "chaoslab/parallel.hpp"

namespace chaoslab {

// Empirical covariance at grid lags versus the synthesis oracle. Each sample
// contributes s_k = mean_i X_i X_{i + k e_0}; the standard error is over samples.
struct CovarianceCheckRow {
  double separation = 0.0;
  std::size_t lag = 0;
  double empirical = 0.0;
  double oracle = 0.0;
  double std_error = 0.0;
  double z = 0.0;
};
struct CovarianceCheck {
  std::string field;
  std::int64_t n_samples = 0;
  std::vector<CovarianceCheckRow> rows;
  double max_abs_z() const;
};

// `count` distinct integer lags, roughly log-spaced on [1, max_lag].
std::vector<std::size_t> log_spaced_lags(std::size_t max_lag, int count);

// Circle series with n_modes against circle_truncated_cov.
CovarianceCheck circle_covariance_check(int n_modes, std::size_t grid_points, std::int64_t n_samples,
                                        const ChainPlan& plan, int separations = 20);
// Layered star-scale field on a periodic box of side 2 (region of interest
// [0, 1)^d) against the layered u-quadrature oracle.
CovarianceCheck star_covariance_check(const LayeredNoiseParams& params, int dimension, std::size_t points_per_axis,
                                      std::int64_t n_samples, const ChainPlan& plan, int separations = 20);

void write_csv(std::ostream& out, const CovarianceCheck& check);

// Histogram of complex samples on [-range, range]^2 with bins x bins cells.
struct Histogram2D {
  double range = 0.0;
  int bins = 0;
  std::int64_t n_samples = 0;
  std::int64_t outside = 0;
  std::vector<std::int64_t> counts;  // row-major, real part first

  double bin_width() const { return 2.0 * range / bins; }
  // Largest count / (n_samples * cell area).
  double peak_density() const;
};
Histogram2D histogram2d(std::span<const std::complex<double>> samples, double range, int bins);
// re_lo, re_hi, im_lo, im_hi, count, density
void write_csv(std::ostream& out, const Histogram2D& h);

// Error-compensated running sum.
class NeumaierSum {
 public:
  void add(double x);
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace chaoslab
