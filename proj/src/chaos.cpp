#include "chaoslab/chaos.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "chaoslab/fft.hpp"

namespace chaoslab {

void ChaosParams::validate() const {
  if (dimension != 1 && dimension != 2) throw std::invalid_argument("chaos: dimension must be 1 or 2");
  if (!(beta > 0.0 && beta * beta < dimension)) throw std::invalid_argument("chaos: beta must lie in (0, sqrt(d))");
}

TestFunction TestFunction::constant(const GridSpec& grid, std::complex<double> c) {
  grid.validate();
  return TestFunction{grid, std::vector<std::complex<double>>(grid.total_points(), c),
                      std::vector<std::uint8_t>(grid.total_points(), c != 0.0 ? 1 : 0)};
}

TestFunction TestFunction::from(const GridSpec& grid, const std::function<std::complex<double>(const Point&)>& fn) {
  grid.validate();
  TestFunction f{grid, {}, {}};
  f.values.resize(grid.total_points());
  f.support.resize(grid.total_points());
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    f.values[i] = fn(grid.coordinate(i));
    if (!std::isfinite(f.values[i].real()) || !std::isfinite(f.values[i].imag()))
      throw std::invalid_argument("test function: non-finite value");
    f.support[i] = f.values[i] != 0.0 ? 1 : 0;
  }
  return f;
}

TestFunction TestFunction::restricted(const GridSpec& grid, const std::function<std::complex<double>(const Point&)>& fn,
                                      double lo, double hi) {
  return from(grid, [&](const Point& x) -> std::complex<double> {
    for (int a = 0; a < grid.dimension; ++a)
      if (x[static_cast<std::size_t>(a)] < lo || x[static_cast<std::size_t>(a)] >= hi) return 0.0;
    return fn(x);
  });
}

bool TestFunction::real_valued() const {
  for (const auto& v : values)
    if (v.imag() != 0.0) return false;
  return true;
}

std::complex<double> TestFunction::integral() const {
  std::complex<double> s = 0.0;
  for (const auto& v : values) s += v;
  return s * grid.cell_volume();
}

ChaosGrid renormalized_exponential(const FieldSample& field, const ChaosParams& params) {
  params.validate();
  if (params.dimension != field.grid.dimension) throw std::invalid_argument("chaos: dimension mismatch");
  if (!field.covariance) throw std::invalid_argument("chaos: field has no truncation variance");
  ChaosGrid out;
  out.grid = field.grid;
  out.beta = params.beta;
  out.covariance = field.covariance;
  out.field_fingerprint = field.fingerprint();
  out.values.resize(field.values.size());
  const double half_b2 = 0.5 * params.beta * params.beta;
  const bool constant_variance = field.covariance->is_stationary();
  const double modulus0 = std::exp(half_b2 * field.covariance->variance(0));
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const double modulus = constant_variance ? modulus0 : std::exp(half_b2 * field.covariance->variance(i));
    out.values[i] = std::polar(modulus, params.beta * field.values[i]);
  }
  return out;
}

std::vector<std::complex<double>> weighted_chaos(const ChaosGrid& chaos, const TestFunction& f) {
  if (!(chaos.grid == f.grid)) throw std::invalid_argument("chaos: grid mismatch with test function");
  std::vector<std::complex<double>> g(chaos.values.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = f.values[i] * chaos.values[i];
  return g;
}

std::complex<double> chaos_integral(const ChaosGrid& chaos, const TestFunction& f) {
  if (!(chaos.grid == f.grid)) throw std::invalid_argument("chaos: grid mismatch with test function");
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < chaos.values.size(); ++i) s += f.values[i] * chaos.values[i];
  return s * chaos.grid.cell_volume();
}

double sobolev_norm(std::span<const std::complex<double>> g, const GridSpec& grid, double s) {
  if (s > 0.0) throw std::invalid_argument("sobolev_norm: regularity index must be <= 0");
  if (g.size() != grid.total_points()) throw std::invalid_argument("sobolev_norm: grid mismatch");
  std::vector<cplx> c(g.begin(), g.end());
  fft_inplace(c, grid_shape(grid.dimension, grid.points_per_axis), FftDirection::Forward);
  const std::size_t n = grid.points_per_axis;
  const double total = static_cast<double>(c.size());
  const double w = 2.0 * std::numbers::pi / grid.extent;
  auto freq = [n](std::size_t k) { return k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n); };
  double sum = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    double k2 = 0.0;
    if (grid.dimension == 1) {
      k2 = freq(k) * freq(k);
    } else {
      k2 = freq(k / n) * freq(k / n) + freq(k % n) * freq(k % n);
    }
    sum += std::pow(1.0 + w * w * k2, s) * std::norm(c[k] / total);
  }
  return std::sqrt(sum);
}

double sobolev_norm(const ChaosGrid& chaos, const TestFunction& f, double s) {
  const auto g = weighted_chaos(chaos, f);
  return sobolev_norm(g, chaos.grid, s);
}

void write_csv(std::ostream& out, const ChaosGrid& chaos) {
  out << "index,re,im\n";
  out.precision(17);
  for (std::size_t i = 0; i < chaos.values.size(); ++i)
    out << i << ',' << chaos.values[i].real() << ',' << chaos.values[i].imag() << '\n';
}

}  // namespace chaoslab
