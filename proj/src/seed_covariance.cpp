#include "chaoslab/seed_covariance.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace chaoslab {

namespace {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

constexpr double kPi = std::numbers::pi;
constexpr int kPanels = 48;
constexpr int kDegree = 16;
// |b-hat| is below 1e-40 well before this frequency.
constexpr double kMaxFrequency = 3000.0;

double bump(double r) {
  const double t = 4.0 * r * r;
  if (t >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - t));
}

// Composite Gauss-Legendre on [a, b] with `panels` equal panels.
template <class F>
double composite_gauss(F&& f, double a, double b, int panels) {
  const double w = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) sum += gauss<double, 20>::integrate(f, a + p * w, a + (p + 1) * w);
  return sum;
}

double self_convolution_1d(double r) {
  if (r >= 1.0) return 0.0;
  auto f = [r](double t) { return bump(t) * bump(t + r); };
  return composite_gauss(f, -0.5, 0.5 - r, 24);
}

double self_convolution_2d(double r) {
  if (r >= 1.0) return 0.0;
  auto outer = [r](double s) {
    const double bs = bump(s);
    if (bs == 0.0) return 0.0;
    auto inner = [r, s](double theta) {
      const double d2 = s * s + r * r - 2.0 * s * r * std::cos(theta);
      return bump(std::sqrt(std::max(d2, 0.0)));
    };
    return 2.0 * bs * s * composite_gauss(inner, 0.0, kPi, 12);
  };
  return composite_gauss(outer, 0.0, 0.5, 12);
}

double bump_norm_sq(int d) {
  if (d == 1) return composite_gauss([](double t) { return bump(t) * bump(t); }, -0.5, 0.5, 24);
  return 2.0 * kPi * composite_gauss([](double s) { return bump(s) * bump(s) * s; }, 0.0, 0.5, 24);
}

// Abel projection of the bump, P(x) = int b(sqrt(x^2 + y^2)) dy. The 2-D
// radial transform of b is the 1-D cosine transform of P.
double bump_projection(double x) {
  const double top = 0.25 - x * x;
  if (top <= 0.0) return 0.0;
  return 2.0 * composite_gauss([x](double y) { return bump(std::sqrt(x * x + y * y)); }, 0.0, std::sqrt(top), 24);
}

}  // namespace

struct SeedCovariance::Tables {
  using Panels = std::vector<std::array<double, kDegree + 1>>;
  int dimension = 1;
  double norm_sq = 1.0;
  // Piecewise Chebyshev interpolants: k on [0, 1], P on [0, 1/2] (d = 2).
  std::array<double, kDegree + 1> nodes{};
  std::array<double, kDegree + 1> weights{};
  Panels values;
  Panels projection;

  double interpolate(double r) const { return interpolate(values, r); }

  double interpolate(const Panels& table, double r) const {
    const double scaled = r * kPanels;
    int panel = static_cast<int>(scaled);
    if (panel >= kPanels) panel = kPanels - 1;
    const double x = 2.0 * (scaled - panel) - 1.0;  // local coordinate in [-1, 1]
    const auto& v = table[static_cast<std::size_t>(panel)];
    double num = 0.0, den = 0.0;
    for (int j = 0; j <= kDegree; ++j) {
      const double diff = x - nodes[static_cast<std::size_t>(j)];
      if (diff == 0.0) return v[static_cast<std::size_t>(j)];
      const double t = weights[static_cast<std::size_t>(j)] / diff;
      num += t * v[static_cast<std::size_t>(j)];
      den += t;
    }
    return num / den;
  }
};

SeedCovariance SeedCovariance::bump_self_convolution(int dimension) {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("seed covariance: unsupported dimension");
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const Tables>> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(dimension); it != cache.end()) return SeedCovariance(dimension, it->second);

  auto tables = std::make_shared<Tables>();
  tables->dimension = dimension;
  tables->norm_sq = bump_norm_sq(dimension);
  for (int j = 0; j <= kDegree; ++j) {
    // Chebyshev points of the second kind with barycentric weights.
    tables->nodes[static_cast<std::size_t>(j)] = std::cos(kPi * j / kDegree);
    double w = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == kDegree) w *= 0.5;
    tables->weights[static_cast<std::size_t>(j)] = w;
  }
  const double zero_value = dimension == 1 ? self_convolution_1d(0.0) : self_convolution_2d(0.0);
  tables->values.resize(kPanels);
  for (int p = 0; p < kPanels; ++p) {
    for (int j = 0; j <= kDegree; ++j) {
      const double x = tables->nodes[static_cast<std::size_t>(j)];
      const double r = (p + 0.5 * (x + 1.0)) / kPanels;
      const double raw = dimension == 1 ? self_convolution_1d(r) : self_convolution_2d(r);
      tables->values[static_cast<std::size_t>(p)][static_cast<std::size_t>(j)] = raw / zero_value;
    }
  }
  // Pin the endpoints exactly.
  tables->values.front()[kDegree] = 1.0;
  tables->values.back()[0] = 0.0;
  if (dimension == 2) {
    tables->projection.resize(kPanels);
    for (int p = 0; p < kPanels; ++p)
      for (int j = 0; j <= kDegree; ++j) {
        const double x = tables->nodes[static_cast<std::size_t>(j)];
        tables->projection[static_cast<std::size_t>(p)][static_cast<std::size_t>(j)] =
            bump_projection(0.5 * (p + 0.5 * (x + 1.0)) / kPanels);
      }
    tables->projection.back()[0] = 0.0;
  }
  cache.emplace(dimension, tables);
  return SeedCovariance(dimension, std::move(tables));
}

double SeedCovariance::profile(double r) const {
  r = std::abs(r);
  if (r >= 1.0) return 0.0;
  return std::max(0.0, tables_->interpolate(r));
}

double SeedCovariance::bump_transform(double rho) const {
  rho = std::abs(rho);
  if (rho > kMaxFrequency) return 0.0;
  const int panels = std::max(16, static_cast<int>(std::ceil(rho / 4.0)));
  if (dimension_ == 1) {
    return 2.0 * composite_gauss([rho](double x) { return bump(x) * std::cos(rho * x); }, 0.0, 0.5, panels);
  }
  const Tables& t = *tables_;
  return 2.0 * composite_gauss([&t, rho](double x) { return t.interpolate(t.projection, 2.0 * x) * std::cos(rho * x); },
                               0.0, 0.5, panels);
}

double SeedCovariance::fourier_profile(double rho) const {
  const double b = bump_transform(rho);
  return b * b / tables_->norm_sq;
}

SeedCovarianceReport audit_seed_covariance(const SeedCovariance& seed) {
  SeedCovarianceReport report;
  const int d = seed.dimension();
  report.profile_at_zero = seed.profile(0.0);
  for (double r = 1.0; r <= 3.0; r += 0.125)
    report.max_profile_outside_support = std::max(report.max_profile_outside_support, std::abs(seed.profile(r)));
  report.min_profile = 1.0;
  for (int i = 0; i <= 1000; ++i) report.min_profile = std::min(report.min_profile, seed.profile(i / 1000.0));

  report.decay_exponent = 0.5 * (d + 1) + 0.5;
  report.min_fourier = seed.fourier_profile(0.0);
  for (int i = 0; i <= 120; ++i) {
    const double xi = std::pow(10.0, -2.0 + 5.0 * i / 120.0);
    const double v = seed.fourier_profile(xi);
    report.min_fourier = std::min(report.min_fourier, v);
    report.decay_constant = std::max(report.decay_constant, v * std::pow(1.0 + xi * xi, report.decay_exponent));
  }

  // FT of the radial profile, computed directly from k.
  for (double xi : {0.0, 0.5, 2.0, 7.5, 20.0}) {
    double direct = 0.0;
    if (d == 1) {
      direct = 2.0 * gauss_kronrod<double, 61>::integrate(
                         [&](double r) { return seed.profile(r) * std::cos(xi * r); }, 0.0, 1.0, 12, 1e-13);
    } else {
      direct = 2.0 * kPi *
               gauss_kronrod<double, 61>::integrate(
                   [&](double r) { return seed.profile(r) * std::cyl_bessel_j(0.0, xi * r) * r; }, 0.0, 1.0, 12,
                   1e-13);
    }
    report.transform_mismatch = std::max(report.transform_mismatch, std::abs(direct - seed.fourier_profile(xi)));
  }
  report.ok = std::abs(report.profile_at_zero - 1.0) < 1e-12 && report.max_profile_outside_support == 0.0 &&
              report.min_profile >= 0.0 && report.min_fourier >= 0.0 && std::isfinite(report.decay_constant) &&
              report.transform_mismatch < 1e-8;
  return report;
}

}  // namespace chaoslab
