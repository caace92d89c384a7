#include "chaoslab/covariance.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "chaoslab/errors.hpp"
#include "chaoslab/fft.hpp"

namespace chaoslab {

namespace {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;
constexpr double kPi = std::numbers::pi;

// Integrand in u with the seed evaluated at e^u r. Away from the support edge
// (e^u r < e^-3) everything is entire in u, so wide fixed panels suffice;
// the bump's flat edge gets narrow ones.
template <class F>
double integrate_scales(F&& f, double a, double b, double r) {
  if (!(b > a)) return 0.0;
  const double knee = -std::log(r) - 3.0;
  auto panels = [&](double lo, double hi, double width) {
    if (!(hi > lo)) return 0.0;
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
    const double h = (hi - lo) / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += gauss<double, 20>::integrate(f, lo + i * h, lo + (i + 1) * h);
    return sum;
  };
  return panels(a, std::min(b, knee), 2.0) + panels(std::max(a, knee), b, 0.2);
}

double log_inverse(double r) { return -std::log(r); }

}  // namespace

void LayeredNoiseParams::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("layered noise: alpha must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("layered noise: delta must lie in (0, 1]");
  if (layers_per_unit < 8) throw std::invalid_argument("layered noise: at least 8 layers per unit scale required");
}

double LayeredNoiseParams::max_scale() const { return -std::log(delta); }

int LayeredNoiseParams::layer_count() const {
  return std::max(1, static_cast<int>(std::ceil(layers_per_unit * max_scale() - 1e-9)));
}

LayerGrid make_layer_grid(const LayeredNoiseParams& params) {
  params.validate();
  LayerGrid grid;
  const double umax = params.max_scale();
  if (umax == 0.0) return grid;
  const int n = params.layer_count();
  grid.du = umax / n;
  for (int m = 0; m < n; ++m) {
    const double u = (m + 0.5) * grid.du;
    grid.scales.push_back(u);
    grid.weights.push_back(-std::expm1(-params.alpha * u) * grid.du);
  }
  return grid;
}

double circle_cov(double t, double s) {
  double u = std::fmod(std::abs(t - s), 1.0);
  u = std::min(u, 1.0 - u);
  if (u == 0.0) throw NumericError("circle_cov: singular evaluation at coincident points");
  return -std::log(2.0 * std::sin(kPi * u));
}

double circle_truncated_cov(int n, double t, double s) {
  if (n < 1) throw std::invalid_argument("circle_truncated_cov: need at least one mode");
  double u = std::fmod(std::abs(t - s), 1.0);
  u = std::min(u, 1.0 - u);
  double sum = 0.0;
  for (int k = n; k >= 1; --k) sum += std::cos(2.0 * kPi * k * u) / k;
  return sum;
}

double circle_truncated_variance(int n) {
  if (n < 1) throw std::invalid_argument("circle_truncated_variance: need at least one mode");
  double sum = 0.0;
  for (int k = n; k >= 1; --k) sum += 1.0 / k;
  return sum;
}

double cov_Y_delta(double r, const LayeredNoiseParams& params, const SeedCovariance& seed) {
  params.validate();
  r = std::abs(r);
  const double umax = params.max_scale();
  if (r == 0.0) return umax + std::expm1(-params.alpha * umax) / params.alpha;
  if (r >= 1.0) return 0.0;
  const double upper = std::min(umax, log_inverse(r));
  return integrate_scales([&](double u) { return seed.profile(std::exp(u) * r) * -std::expm1(-params.alpha * u); }, 0.0,
                   upper, r);
}

double cov_Y_delta_layered(double r, const LayeredNoiseParams& params, const SeedCovariance& seed) {
  const LayerGrid layers = make_layer_grid(params);
  r = std::abs(r);
  double sum = 0.0;
  for (std::size_t m = 0; m < layers.scales.size(); ++m) sum += seed.profile(std::exp(layers.scales[m]) * r) * layers.weights[m];
  return sum;
}

double cov_tail(double r, const LayeredNoiseParams& params, const SeedCovariance& seed) {
  params.validate();
  r = std::abs(r);
  if (r >= params.delta) return 0.0;
  if (r == 0.0) throw NumericError("cov_tail: singular evaluation at coincident points");
  return integrate_scales([&](double u) { return seed.profile(std::exp(u) * r) * -std::expm1(-params.alpha * u); },
                   params.max_scale(), log_inverse(r), r);
}

double cov_tail_rescaled(double r, const LayeredNoiseParams& params, const SeedCovariance& seed) {
  params.validate();
  r = std::abs(r);
  if (r >= 1.0) return 0.0;
  if (r == 0.0) throw NumericError("cov_tail_rescaled: singular evaluation at coincident points");
  const double scale = std::pow(params.delta, params.alpha);
  return integrate_scales([&](double s) { return seed.profile(std::exp(s) * r) * (1.0 - scale * std::exp(-params.alpha * s)); },
                   0.0, log_inverse(r), r);
}

double star_cov(double r, const SeedCovariance& seed) {
  r = std::abs(r);
  if (r >= 1.0) return 0.0;
  if (r == 0.0) throw NumericError("star_cov: singular evaluation at coincident points");
  return integrate_scales([&](double u) { return seed.profile(std::exp(u) * r); }, 0.0, log_inverse(r), r);
}

double star_minus_almost_star_cov(double r, double alpha, const SeedCovariance& seed) {
  if (!(alpha > 0.0)) throw std::invalid_argument("star_minus_almost_star_cov: alpha must be positive");
  r = std::abs(r);
  if (r == 0.0) return 1.0 / alpha;
  if (r >= 1.0) return 0.0;
  return integrate_scales([&](double u) { return seed.profile(std::exp(u) * r) * std::exp(-alpha * u); }, 0.0,
                   log_inverse(r), r);
}

TailBoundsReport cov_tail_bounds_check(double r, const LayeredNoiseParams& params, const SeedCovariance& seed,
                                       double lower_constant) {
  r = std::abs(r);
  if (r == 0.0) throw std::invalid_argument("cov_tail_bounds_check: points must be distinct");
  TailBoundsReport report;
  report.tail_covariance = cov_tail(r, params, seed);
  const double log_ratio = std::log(params.delta / r);
  report.log_upper_margin = std::max(log_ratio, 0.0) - report.tail_covariance;
  report.ratio_upper_margin = params.delta / r - report.tail_covariance;
  report.lower_margin = report.tail_covariance - (log_ratio - lower_constant);
  report.vanishes_beyond_delta = r < params.delta || report.tail_covariance == 0.0;
  return report;
}

// ---------------------------------------------------------------------------

CovarianceOracle CovarianceOracle::circle_exact() {
  CovarianceOracle o;
  o.kind_ = Kind::CircleExact;
  o.metric_ = Metric::CircleArc;
  o.id_ = "circle-exact";
  o.profile_ = [](double u) { return -std::log(2.0 * std::sin(kPi * u)); };
  o.singular_ = true;
  o.remainder_at_zero_ = -std::log(2.0 * kPi);
  return o;
}

CovarianceOracle CovarianceOracle::circle_truncated(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("circle_truncated: need at least one mode");
  CovarianceOracle o;
  o.kind_ = Kind::CircleTruncated;
  o.metric_ = Metric::CircleArc;
  o.id_ = "circle-truncated(" + std::to_string(n_modes) + ")";
  o.profile_ = [n_modes](double u) { return circle_truncated_cov(n_modes, u, 0.0); };
  return o;
}

CovarianceOracle CovarianceOracle::star_y_delta(const LayeredNoiseParams& params, const SeedCovariance& seed) {
  params.validate();
  CovarianceOracle o;
  o.kind_ = Kind::StarYDelta;
  o.id_ = "star-Ydelta";
  o.profile_ = [params, seed](double r) { return cov_Y_delta(r, params, seed); };
  return o;
}

CovarianceOracle CovarianceOracle::star_layered(const LayeredNoiseParams& params, const SeedCovariance& seed) {
  params.validate();
  CovarianceOracle o;
  o.kind_ = Kind::StarLayered;
  o.id_ = "star-Ydelta-layered";
  auto layers = std::make_shared<const LayerGrid>(make_layer_grid(params));
  o.profile_ = [layers, seed](double r) {
    double sum = 0.0;
    for (std::size_t m = 0; m < layers->scales.size(); ++m)
      sum += seed.profile(std::exp(layers->scales[m]) * r) * layers->weights[m];
    return sum;
  };
  return o;
}

CovarianceOracle CovarianceOracle::star_tail(const LayeredNoiseParams& params, const SeedCovariance& seed) {
  params.validate();
  CovarianceOracle o;
  o.kind_ = Kind::StarTail;
  o.id_ = "star-tail";
  o.profile_ = [params, seed](double r) { return cov_tail(r, params, seed); };
  o.singular_ = true;
  return o;
}

CovarianceOracle CovarianceOracle::star_tail_rescaled(const LayeredNoiseParams& params, const SeedCovariance& seed) {
  params.validate();
  CovarianceOracle o;
  o.kind_ = Kind::StarTailRescaled;
  o.id_ = "star-tail-rescaled";
  o.profile_ = [params, seed](double r) { return cov_tail_rescaled(r, params, seed); };
  o.singular_ = true;
  return o;
}

CovarianceOracle CovarianceOracle::dense(const GridSpec& grid, Eigen::MatrixXd matrix) {
  grid.validate();
  const auto n = static_cast<Eigen::Index>(grid.total_points());
  if (matrix.rows() != n || matrix.cols() != n)
    throw std::invalid_argument("dense oracle: matrix size does not match grid");
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("dense oracle: matrix must be exactly symmetric");
  CovarianceOracle o;
  o.kind_ = Kind::DenseMatrix;
  o.id_ = "dense-matrix";
  o.dense_ = std::make_shared<const DenseData>(DenseData{grid, std::move(matrix)});
  return o;
}

CovarianceOracle CovarianceOracle::radial(std::string id, std::function<double(double)> profile, Metric metric,
                                          bool singular, double remainder_at_zero) {
  CovarianceOracle o;
  o.kind_ = Kind::Radial;
  o.metric_ = metric;
  o.id_ = std::move(id);
  o.profile_ = std::move(profile);
  o.singular_ = singular;
  o.remainder_at_zero_ = remainder_at_zero;
  return o;
}

double CovarianceOracle::distance(const Point& x, const Point& y) const {
  if (metric_ == Metric::CircleArc) {
    double u = std::fmod(std::abs(x[0] - y[0]), 1.0);
    return std::min(u, 1.0 - u);
  }
  return std::hypot(x[0] - y[0], x[1] - y[1]);
}

double CovarianceOracle::at_distance(double r) const {
  if (!stationary()) throw std::logic_error("at_distance: dense oracle is not stationary");
  if (r == 0.0 && singular_) throw NumericError("covariance oracle '" + id_ + "': singular evaluation on the diagonal");
  return profile_(r);
}

double CovarianceOracle::operator()(const Point& x, const Point& y) const {
  if (dense_) {
    const GridSpec& g = dense_->grid;
    auto index_of = [&](const Point& p) {
      std::size_t flat = 0;
      for (int axis = 0; axis < g.dimension; ++axis) {
        const double pos = (p[static_cast<std::size_t>(axis)] - g.origin) / g.spacing();
        const double rounded = std::round(pos);
        if (std::abs(pos - rounded) > 1e-7 || rounded < 0 || rounded >= static_cast<double>(g.points_per_axis))
          throw std::invalid_argument("dense oracle: point is not a grid node");
        flat = flat * g.points_per_axis + static_cast<std::size_t>(rounded);
      }
      return static_cast<Eigen::Index>(flat);
    };
    return dense_->matrix(index_of(x), index_of(y));
  }
  return at_distance(distance(x, y));
}

double log_cell_average(double h, int dimension) {
  if (dimension == 1) return 1.5 - std::log(h);
  // -E log|z| for z the difference of two uniform points of the unit square.
  static const double unit_square = [] {
    auto inner = [](double a) {
      return gauss_kronrod<double, 31>::integrate(
          [a](double b) { return (1.0 - a) * (1.0 - b) * 0.5 * std::log(a * a + b * b); }, 0.0, 1.0, 15, 1e-12);
    };
    return -4.0 * gauss_kronrod<double, 31>::integrate(inner, 0.0, 1.0, 15, 1e-12);
  }();
  return unit_square - std::log(h);
}

// ---------------------------------------------------------------------------

std::size_t negated_index(std::size_t k, const GridSpec& grid) {
  const std::size_t n = grid.points_per_axis;
  if (grid.dimension == 1) return (n - k) % n;
  const std::size_t k0 = k / n, k1 = k % n;
  return ((n - k0) % n) * n + (n - k1) % n;
}

std::shared_ptr<const GridCovariance> GridCovariance::stationary(const GridSpec& grid, std::vector<double> lags) {
  grid.validate();
  if (lags.size() != grid.total_points()) throw std::invalid_argument("grid covariance: lag vector size mismatch");
  auto cov = std::shared_ptr<GridCovariance>(new GridCovariance());
  cov->grid_ = grid;
  cov->stationary_ = true;
  cov->lags_ = std::move(lags);
  cov->compute_spectrum();
  return cov;
}

std::shared_ptr<const GridCovariance> GridCovariance::dense(const GridSpec& grid, Eigen::MatrixXd matrix) {
  grid.validate();
  const auto n = static_cast<Eigen::Index>(grid.total_points());
  if (matrix.rows() != n || matrix.cols() != n) throw std::invalid_argument("grid covariance: matrix size mismatch");
  auto cov = std::shared_ptr<GridCovariance>(new GridCovariance());
  cov->grid_ = grid;
  cov->stationary_ = false;
  cov->matrix_ = std::move(matrix);
  return cov;
}

std::shared_ptr<const GridCovariance> GridCovariance::from_oracle(const CovarianceOracle& oracle, const GridSpec& grid) {
  grid.validate();
  if (!oracle.stationary()) {
    if (!(*oracle.dense_grid() == grid)) throw std::invalid_argument("grid covariance: oracle grid mismatch");
    return dense(grid, *oracle.dense_matrix());
  }
  const std::size_t n = grid.points_per_axis;
  const double h = grid.spacing();
  std::vector<double> lags(grid.total_points());
  for (std::size_t m = 0; m < lags.size(); ++m) {
    double r;
    if (grid.dimension == 1) {
      r = h * static_cast<double>(std::min(m, n - m));
    } else {
      const std::size_t m0 = m / n, m1 = m % n;
      r = h * std::hypot(static_cast<double>(std::min(m0, n - m0)), static_cast<double>(std::min(m1, n - m1)));
    }
    if (m == 0 && oracle.singular_on_diagonal()) {
      lags[m] = log_cell_average(h, grid.dimension) + oracle.remainder_at_zero();
    } else {
      lags[m] = oracle.at_distance(r);
    }
  }
  return stationary(grid, std::move(lags));
}

void GridCovariance::compute_spectrum() {
  std::vector<cplx> buf(lags_.begin(), lags_.end());
  const auto shape = grid_shape(grid_.dimension, grid_.points_per_axis);
  fft_inplace(buf, shape, FftDirection::Forward);
  spectrum_.resize(buf.size());
  for (std::size_t k = 0; k < buf.size(); ++k) spectrum_[k] = buf[k].real();
}

double GridCovariance::at(std::size_t i, std::size_t j) const {
  if (!stationary_) return matrix_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  const std::size_t n = grid_.points_per_axis;
  if (grid_.dimension == 1) return lags_[(i + n - j) % n];
  const std::size_t d0 = (i / n + n - j / n) % n;
  const std::size_t d1 = (i % n + n - j % n) % n;
  return lags_[d0 * n + d1];
}

std::complex<double> GridCovariance::bilinear(std::span<const cplx> a, std::span<const cplx> b) const {
  const std::size_t total = grid_.total_points();
  if (a.size() != total || b.size() != total) throw std::invalid_argument("bilinear: grid mismatch");
  const double w = grid_.cell_volume();
  if (!stationary_) {
    const Eigen::Map<const Eigen::VectorXcd> av(a.data(), static_cast<Eigen::Index>(total));
    const Eigen::Map<const Eigen::VectorXcd> bv(b.data(), static_cast<Eigen::Index>(total));
    const Eigen::VectorXcd cb = matrix_.cast<cplx>() * bv.conjugate();
    return w * w * (av.array() * cb.array()).sum();
  }
  const auto shape = grid_shape(grid_.dimension, grid_.points_per_axis);
  std::vector<cplx> fa(a.begin(), a.end()), fb(b.begin(), b.end());
  fft_inplace(fa, shape, FftDirection::Forward);
  fft_inplace(fb, shape, FftDirection::Forward);
  cplx sum = 0.0;
  for (std::size_t k = 0; k < total; ++k) sum += fa[k] * spectrum_[k] * std::conj(fb[k]);
  return w * w * sum / static_cast<double>(total);
}

std::complex<double> GridCovariance::bilinear_plain(std::span<const cplx> a, std::span<const cplx> b) const {
  std::vector<cplx> bc(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) bc[i] = std::conj(b[i]);
  return bilinear(a, bc);
}

std::shared_ptr<const GridCovariance> GridCovariance::map(const std::function<double(double)>& fn) const {
  if (stationary_) {
    std::vector<double> out(lags_.size());
    std::transform(lags_.begin(), lags_.end(), out.begin(), fn);
    return stationary(grid_, std::move(out));
  }
  return dense(grid_, matrix_.unaryExpr(fn));
}

std::shared_ptr<const GridCovariance> GridCovariance::squared() const {
  return map([](double c) { return c * c; });
}

std::shared_ptr<const GridCovariance> GridCovariance::convolved(std::span<const double> kernel) const {
  const std::size_t total = grid_.total_points();
  if (kernel.size() != total) throw std::invalid_argument("convolved: kernel size mismatch");
  const auto shape = grid_shape(grid_.dimension, grid_.points_per_axis);
  std::vector<cplx> fk(kernel.begin(), kernel.end());
  fft_inplace(fk, shape, FftDirection::Forward);
  if (stationary_) {
    std::vector<cplx> buf(total);
    for (std::size_t k = 0; k < total; ++k) buf[k] = spectrum_[k] * std::norm(fk[k]);
    fft_inplace(buf, shape, FftDirection::Backward);
    std::vector<double> out(total);
    for (std::size_t m = 0; m < total; ++m) out[m] = buf[m].real() / static_cast<double>(total);
    // Restore exact lag symmetry lost to round-off.
    for (std::size_t m = 0; m < total; ++m) {
      const std::size_t mm = negated_index(m, grid_);
      if (mm > m) out[m] = out[mm] = 0.5 * (out[m] + out[mm]);
    }
    return stationary(grid_, std::move(out));
  }
  // W C W^T with W the periodic convolution by `kernel`.
  auto convolve_columns = [&](Eigen::MatrixXd& m) {
    std::vector<cplx> col(total);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (std::size_t i = 0; i < total; ++i) col[i] = m(static_cast<Eigen::Index>(i), c);
      fft_inplace(col, shape, FftDirection::Forward);
      for (std::size_t k = 0; k < total; ++k) col[k] *= fk[k];
      fft_inplace(col, shape, FftDirection::Backward);
      for (std::size_t i = 0; i < total; ++i) m(static_cast<Eigen::Index>(i), c) = col[i].real() / static_cast<double>(total);
    }
  };
  Eigen::MatrixXd m = matrix_;
  convolve_columns(m);
  m.transposeInPlace();
  convolve_columns(m);
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  return dense(grid_, std::move(sym));
}

Eigen::MatrixXd GridCovariance::to_dense() const {
  if (!stationary_) return matrix_;
  const auto n = static_cast<Eigen::Index>(grid_.total_points());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return m;
}

}  // namespace chaoslab
