#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "chaoslab/grid.hpp"
#include "chaoslab/seed_covariance.hpp"

namespace chaoslab {

// Parameters of the almost star-scale invariant field Y_delta: layer weight
// (1 - exp(-alpha u)) for scales u in [0, log 1/delta].
struct LayeredNoiseParams {
  double alpha = 1.0;
  double delta = 0.01;
  int layers_per_unit = 16;

  void validate() const;
  double max_scale() const;  // log(1/delta)
  int layer_count() const;
};

// Midpoint discretization of the scale variable u.
struct LayerGrid {
  std::vector<double> scales;   // layer midpoints u_m
  std::vector<double> weights;  // (1 - exp(-alpha u_m)) * du
  double du = 0.0;
};
LayerGrid make_layer_grid(const LayeredNoiseParams& params);

// -- Closed-form and quadrature covariances -------------------------------

// log(1 / (2 |sin(pi (t - s))|)); throws NumericError when t = s mod 1.
double circle_cov(double t, double s);
// sum_{k <= n} cos(2 pi k (t - s)) / k.
double circle_truncated_cov(int n, double t, double s);
// sum_{k <= n} 1 / k.
double circle_truncated_variance(int n);

// int_0^{log 1/delta} k(e^u r) (1 - e^{-alpha u}) du with r = |x - y|.
double cov_Y_delta(double r, const LayeredNoiseParams& params, const SeedCovariance& seed);
// Midpoint-layer version of cov_Y_delta; the exact covariance of the layered sampler.
double cov_Y_delta_layered(double r, const LayeredNoiseParams& params, const SeedCovariance& seed);
// Tail field covariance: int_{log 1/delta}^inf k(e^u r)(1 - e^{-alpha u}) du.
double cov_tail(double r, const LayeredNoiseParams& params, const SeedCovariance& seed);
// Covariance of the rescaled tail field x -> Yhat_delta(delta x) at distance r:
// int_0^inf k(e^s r)(1 - delta^alpha e^{-alpha s}) ds.
double cov_tail_rescaled(double r, const LayeredNoiseParams& params, const SeedCovariance& seed);
// Star-scale kernel C_X(r) = int_0^inf k(e^u r) du (singular at r = 0).
double star_cov(double r, const SeedCovariance& seed);
// Difference kernel C_X - C_{Y^(alpha)} = int_0^inf k(e^u r) e^{-alpha u} du; equals 1/alpha at r = 0.
double star_minus_almost_star_cov(double r, double alpha, const SeedCovariance& seed);

// Margins of the tail-field covariance against its bounds at one (r, delta).
struct TailBoundsReport {
  double tail_covariance = 0.0;
  // log(delta / r)^+ - tail >= 0 is the sharp upper bound.
  double log_upper_margin = 0.0;
  // delta / r - tail >= 0 (weaker literal form of the upper bound).
  double ratio_upper_margin = 0.0;
  // tail - (log(delta / r) - C) for the supplied constant C.
  double lower_margin = 0.0;
  bool vanishes_beyond_delta = true;
};
TailBoundsReport cov_tail_bounds_check(double r, const LayeredNoiseParams& params, const SeedCovariance& seed,
                                       double lower_constant);

// -- Oracle type ----------------------------------------------------------

// Evaluates C(x, y). All stationary kinds depend on a symmetric distance
// only, so oracle(x, y) == oracle(y, x) holds bit for bit.
class CovarianceOracle {
 public:
  enum class Kind { CircleExact, CircleTruncated, StarYDelta, StarLayered, StarTail, StarTailRescaled, DenseMatrix, Radial };
  enum class Metric { Euclidean, CircleArc };

  static CovarianceOracle circle_exact();
  static CovarianceOracle circle_truncated(int n_modes);
  static CovarianceOracle star_y_delta(const LayeredNoiseParams& params, const SeedCovariance& seed);
  static CovarianceOracle star_layered(const LayeredNoiseParams& params, const SeedCovariance& seed);
  static CovarianceOracle star_tail(const LayeredNoiseParams& params, const SeedCovariance& seed);
  static CovarianceOracle star_tail_rescaled(const LayeredNoiseParams& params, const SeedCovariance& seed);
  static CovarianceOracle dense(const GridSpec& grid, Eigen::MatrixXd matrix);
  // Stationary kernel given by a profile of the distance. When `singular` is
  // set the kernel behaves as -log r + remainder(r) near zero and
  // `remainder_at_zero` is the limit of the remainder.
  static CovarianceOracle radial(std::string id, std::function<double(double)> profile, Metric metric = Metric::Euclidean,
                                 bool singular = false, double remainder_at_zero = 0.0);

  double operator()(const Point& x, const Point& y) const;
  double operator()(double x, double y) const { return (*this)(Point{x, 0.0}, Point{y, 0.0}); }

  Kind kind() const { return kind_; }
  const std::string& id() const { return id_; }
  Metric metric() const { return metric_; }
  bool stationary() const { return kind_ != Kind::DenseMatrix; }
  bool singular_on_diagonal() const { return singular_; }
  double remainder_at_zero() const { return remainder_at_zero_; }
  double distance(const Point& x, const Point& y) const;
  // Kernel as a function of distance (stationary kinds only).
  double at_distance(double r) const;
  const GridSpec* dense_grid() const { return dense_ ? &dense_->grid : nullptr; }
  const Eigen::MatrixXd* dense_matrix() const { return dense_ ? &dense_->matrix : nullptr; }

 private:
  struct DenseData {
    GridSpec grid;
    Eigen::MatrixXd matrix;
  };
  CovarianceOracle() = default;

  Kind kind_ = Kind::Radial;
  Metric metric_ = Metric::Euclidean;
  std::string id_;
  std::function<double(double)> profile_;
  bool singular_ = false;
  double remainder_at_zero_ = 0.0;
  std::shared_ptr<const DenseData> dense_;
};

// Average of -log|x - y| over pairs of points in one grid cell of side h.
double log_cell_average(double h, int dimension);

// -- Covariance restricted to a grid ---------------------------------------

// Covariance matrix of a field on grid points, either stationary (stored by
// periodic lag and applied with FFTs) or dense. Quadratic forms carry the
// cell volume of both integration variables.
class GridCovariance {
 public:
  // `lags` has one entry per grid point: C between point 0 and point m
  // under periodic wrap-around (row-major for d = 2).
  static std::shared_ptr<const GridCovariance> stationary(const GridSpec& grid, std::vector<double> lags);
  static std::shared_ptr<const GridCovariance> dense(const GridSpec& grid, Eigen::MatrixXd matrix);
  // Singular diagonals are replaced by the cell average of the log part.
  static std::shared_ptr<const GridCovariance> from_oracle(const CovarianceOracle& oracle, const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  bool is_stationary() const { return stationary_; }
  double at(std::size_t i, std::size_t j) const;
  double variance(std::size_t i) const { return at(i, i); }
  const std::vector<double>& lags() const { return lags_; }
  // Real DFT of the lag vector (eigenvalues of the circulant).
  const std::vector<double>& spectrum() const { return spectrum_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

  // h^{2d} sum_ij a_i C_ij conj(b_j)
  std::complex<double> bilinear(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b) const;
  // h^{2d} sum_ij a_i C_ij b_j
  std::complex<double> bilinear_plain(std::span<const std::complex<double>> a,
                                      std::span<const std::complex<double>> b) const;
  // Entrywise square C_ij^2.
  std::shared_ptr<const GridCovariance> squared() const;
  // Entrywise map C_ij -> fn(C_ij).
  std::shared_ptr<const GridCovariance> map(const std::function<double(double)>& fn) const;
  // Covariance of the field convolved with `kernel` (weights on lags, same layout as `lags`).
  std::shared_ptr<const GridCovariance> convolved(std::span<const double> kernel) const;
  Eigen::MatrixXd to_dense() const;

 private:
  GridCovariance() = default;
  void compute_spectrum();

  GridSpec grid_;
  bool stationary_ = true;
  std::vector<double> lags_;
  std::vector<double> spectrum_;
  Eigen::MatrixXd matrix_;
};

// Flat index of -k under periodic wrap for a row-major grid.
std::size_t negated_index(std::size_t k, const GridSpec& grid);

}  // namespace chaoslab
