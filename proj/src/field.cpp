#include "chaoslab/field.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "chaoslab/errors.hpp"
#include "chaoslab/fft.hpp"

namespace chaoslab {

namespace {

// FNV-style mixing on whole 64-bit words.
struct Fnv {
  std::uint64_t h = 1469598103934665603ULL;
  void add(std::uint64_t word) {
    h ^= word;
    h *= 1099511628211ULL;
    h ^= h >> 29;
  }
};

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

std::uint64_t get_bytes(std::istream& in, int n) {
  unsigned char b[8] = {};
  in.read(reinterpret_cast<char*>(b), n);
  if (!in) throw std::runtime_error("field record truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

// Lag of a flat index as a physical offset in periodic coordinates.
double periodic_radius(std::size_t m, const GridSpec& grid) {
  const std::size_t n = grid.points_per_axis;
  const double h = grid.spacing();
  if (grid.dimension == 1) return h * static_cast<double>(std::min(m, n - m));
  const std::size_t m0 = m / n, m1 = m % n;
  return h * std::hypot(static_cast<double>(std::min(m0, n - m0)), static_cast<double>(std::min(m1, n - m1)));
}

}  // namespace

const char* to_string(SynthesisMethod method) {
  switch (method) {
    case SynthesisMethod::CircleSeries: return "circle-series";
    case SynthesisMethod::LayeredStar: return "layered-star";
    case SynthesisMethod::DenseFactor: return "dense-factor";
  }
  return "unknown";
}

std::uint64_t FieldSample::fingerprint() const {
  Fnv f;
  f.add(static_cast<std::uint64_t>(grid.dimension));
  f.add(grid.points_per_axis);
  f.add(std::bit_cast<std::uint64_t>(grid.extent));
  f.add(std::bit_cast<std::uint64_t>(grid.origin));
  f.add(static_cast<std::uint64_t>(method));
  for (double v : values) f.add(std::bit_cast<std::uint64_t>(v));
  return f.h;
}

// ---------------------------------------------------------------------------

CircleSynthesizer::CircleSynthesizer(int n_modes, const GridSpec& grid) : n_modes_(n_modes), grid_(grid) {
  if (n_modes < 1) throw std::invalid_argument("circle field: need at least one mode");
  grid.validate();
  if (grid.dimension != 1 || grid.extent != 1.0) throw std::invalid_argument("circle field: grid must be [0, 1) in d = 1");
  const std::size_t n = grid.points_per_axis;
  std::vector<cplx> a(n, 0.0);
  for (int k = n_modes; k >= 1; --k) {
    a[static_cast<std::size_t>(k) % n] += 0.5 / k;
    a[(n - static_cast<std::size_t>(k) % n) % n] += 0.5 / k;
  }
  fft_inplace(a, FftDirection::Forward);
  std::vector<double> lags(n);
  lags[0] = circle_truncated_variance(n_modes);
  for (std::size_t m = 1; m < n; ++m) lags[m] = 0.5 * (a[m].real() + a[n - m].real());
  covariance_ = GridCovariance::stationary(grid, std::move(lags));
}

FieldSample CircleSynthesizer::sample_from_coefficients(std::span<const double> a, std::span<const double> b) const {
  const auto modes = static_cast<std::size_t>(n_modes_);
  if (a.size() != modes || b.size() != modes) throw std::invalid_argument("circle field: coefficient count mismatch");
  const std::size_t n = grid_.points_per_axis;
  std::vector<cplx> bins(n, 0.0);
  for (std::size_t k = 1; k <= modes; ++k) bins[k % n] += cplx(a[k - 1], -b[k - 1]) / std::sqrt(static_cast<double>(k));
  fft_inplace(bins, FftDirection::Backward);
  FieldSample out;
  out.grid = grid_;
  out.method = SynthesisMethod::CircleSeries;
  out.covariance = covariance_;
  out.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.values[j] = bins[j].real();
  return out;
}

FieldSample CircleSynthesizer::sample(RngStream& rng) const {
  const auto modes = static_cast<std::size_t>(n_modes_);
  std::vector<double> a(modes), b(modes);
  for (std::size_t k = 0; k < modes; ++k) {
    a[k] = rng.normal();
    b[k] = rng.normal();
  }
  return sample_from_coefficients(a, b);
}

// ---------------------------------------------------------------------------

StarSynthesizer::StarSynthesizer(const GridSpec& grid, const LayeredNoiseParams& params, const SeedCovariance& seed,
                                 double roi_extent)
    : grid_(grid), roi_extent_(roi_extent) {
  grid.validate();
  params.validate();
  if (seed.dimension() != grid.dimension) throw std::invalid_argument("star field: seed and grid dimensions differ");
  if (!(roi_extent > 0.0) || grid.extent < roi_extent + 1.0)
    throw std::invalid_argument("star field: grid must pad the region of interest by at least one unit");
  const LayerGrid layers = make_layer_grid(params);
  std::vector<double> lags(grid.total_points());
  for (std::size_t m = 0; m < lags.size(); ++m) {
    const double r = periodic_radius(m, grid);
    double sum = 0.0;
    for (std::size_t l = 0; l < layers.scales.size(); ++l) sum += seed.profile(std::exp(layers.scales[l]) * r) * layers.weights[l];
    lags[m] = sum;
  }
  covariance_ = GridCovariance::stationary(grid, std::move(lags));
  const auto& spectrum = covariance_->spectrum();
  const double total = static_cast<double>(spectrum.size());
  double peak = 0.0;
  for (double s : spectrum) peak = std::max(peak, std::abs(s));
  amplitude_.resize(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    if (spectrum[k] < -1e-10 * peak) throw NumericError("star field: circulant spectrum is materially negative");
    amplitude_[k] = std::sqrt(std::max(spectrum[k], 0.0) / total);
  }
}

FieldSample StarSynthesizer::sample(RngStream& rng) const {
  std::vector<cplx> buf(amplitude_.size());
  for (std::size_t k = 0; k < buf.size(); ++k) {
    const double re = rng.normal();
    const double im = rng.normal();
    buf[k] = amplitude_[k] * cplx(re, im);
  }
  fft_inplace(buf, grid_shape(grid_.dimension, grid_.points_per_axis), FftDirection::Forward);
  FieldSample out;
  out.grid = grid_;
  out.method = SynthesisMethod::LayeredStar;
  out.covariance = covariance_;
  out.values.resize(buf.size());
  for (std::size_t j = 0; j < buf.size(); ++j) out.values[j] = buf[j].real();
  return out;
}

// ---------------------------------------------------------------------------

DenseSynthesizer::DenseSynthesizer(std::shared_ptr<const GridCovariance> covariance)
    : covariance_(std::move(covariance)) {
  const Eigen::MatrixXd m = covariance_->to_dense();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("dense synthesis: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) throw NumericError("dense synthesis: eigendecomposition failed");
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const double norm = lambda.cwiseAbs().maxCoeff();
  min_eigenvalue_ = lambda.minCoeff();
  if (min_eigenvalue_ < -1e-6 * norm) throw std::invalid_argument("dense synthesis: matrix is not positive semidefinite");
  Eigen::VectorXd root(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    // Slightly negative eigenvalues are discretization noise.
    root(i) = lambda(i) > 0.0 ? std::sqrt(lambda(i)) : 0.0;
  }
  factor_ = eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

FieldSample DenseSynthesizer::sample(RngStream& rng) const {
  Eigen::VectorXd xi(factor_.cols());
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = rng.normal();
  const Eigen::VectorXd v = factor_ * xi;
  FieldSample out;
  out.grid = covariance_->grid();
  out.method = SynthesisMethod::DenseFactor;
  out.covariance = covariance_;
  out.values.assign(v.data(), v.data() + v.size());
  return out;
}

FieldSample sample_circle_field(int n_modes, const GridSpec& grid, RngStream& rng) {
  return CircleSynthesizer(n_modes, grid).sample(rng);
}

FieldSample sample_star_field(const GridSpec& grid, const LayeredNoiseParams& params, const SeedCovariance& seed,
                              double roi_extent, RngStream& rng) {
  return StarSynthesizer(grid, params, seed, roi_extent).sample(rng);
}

FieldSample sample_dense(std::shared_ptr<const GridCovariance> covariance, RngStream& rng) {
  return DenseSynthesizer(std::move(covariance)).sample(rng);
}

// ---------------------------------------------------------------------------

std::vector<double> mollifier_weights(const GridSpec& grid, double delta) {
  grid.validate();
  if (!(delta >= grid.spacing())) throw std::invalid_argument("mollify: delta below grid resolution");
  std::vector<double> w(grid.total_points(), 0.0);
  double mass = 0.0;
  for (std::size_t m = 0; m < w.size(); ++m) {
    const double t = periodic_radius(m, grid) / delta;
    if (t < 1.0) {
      w[m] = std::exp(-1.0 / (1.0 - t * t));
      mass += w[m];
    }
  }
  for (double& x : w) x /= mass;
  return w;
}

FieldSample mollify(const FieldSample& field, double delta) {
  if (!field.covariance) throw std::invalid_argument("mollify: field carries no covariance");
  const std::vector<double> w = mollifier_weights(field.grid, delta);
  const auto shape = grid_shape(field.grid.dimension, field.grid.points_per_axis);
  std::vector<cplx> fw(w.begin(), w.end()), fv(field.values.begin(), field.values.end());
  fft_inplace(fw, shape, FftDirection::Forward);
  fft_inplace(fv, shape, FftDirection::Forward);
  for (std::size_t k = 0; k < fv.size(); ++k) fv[k] *= fw[k];
  fft_inplace(fv, shape, FftDirection::Backward);
  FieldSample out;
  out.grid = field.grid;
  out.method = field.method;
  out.covariance = field.covariance->convolved(w);
  out.values.resize(fv.size());
  const double inv = 1.0 / static_cast<double>(fv.size());
  for (std::size_t j = 0; j < fv.size(); ++j) out.values[j] = fv[j].real() * inv;
  return out;
}

// ---------------------------------------------------------------------------

void write_binary(std::ostream& out, const FieldSample& field) {
  put_u32(out, static_cast<std::uint32_t>(field.grid.dimension));
  put_u64(out, field.grid.points_per_axis);
  put_u64(out, std::bit_cast<std::uint64_t>(field.grid.extent));
  put_u32(out, static_cast<std::uint32_t>(field.method));
  for (double v : field.values) put_u64(out, std::bit_cast<std::uint64_t>(v));
}

FieldSample read_binary(std::istream& in) {
  FieldSample f;
  f.grid.dimension = static_cast<int>(get_bytes(in, 4));
  f.grid.points_per_axis = get_bytes(in, 8);
  f.grid.extent = std::bit_cast<double>(get_bytes(in, 8));
  const auto tag = static_cast<std::uint32_t>(get_bytes(in, 4));
  if (tag > 2) throw std::runtime_error("field record: unknown method tag");
  f.method = static_cast<SynthesisMethod>(tag);
  f.grid.validate();
  f.values.resize(f.grid.total_points());
  for (double& v : f.values) v = std::bit_cast<double>(get_bytes(in, 8));
  return f;
}

void write_csv(std::ostream& out, const FieldSample& field) {
  const std::size_t n = field.grid.points_per_axis;
  out << (field.grid.dimension == 1 ? "i,value\n" : "i,j,value\n");
  out.precision(17);
  for (std::size_t m = 0; m < field.values.size(); ++m) {
    if (field.grid.dimension == 1)
      out << m << ',' << field.values[m] << '\n';
    else
      out << m / n << ',' << m % n << ',' << field.values[m] << '\n';
  }
}

}  // namespace chaoslab
