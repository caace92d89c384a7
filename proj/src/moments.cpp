#include "chaoslab/moments.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "chaoslab/errors.hpp"
#include "chaoslab/fft.hpp"

namespace chaoslab {

namespace {

constexpr double kPi = std::numbers::pi;

struct NeumaierSum {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

bool near_pole(std::complex<double> z) {
  const double n = std::round(z.real());
  return n <= 0.0 && std::abs(z - n) < 1e-9;
}

// Average of |x - y|^{-t} over pairs of points in a cell of side h.
double power_cell_average(double h, double t, int dimension) {
  if (dimension == 1) return 2.0 * std::pow(h, -t) / ((1.0 - t) * (2.0 - t));
  using boost::math::quadrature::gauss_kronrod;
  auto inner = [t](double a) {
    return gauss_kronrod<double, 31>::integrate(
        [a, t](double b) { return (1.0 - a) * (1.0 - b) * std::pow(a * a + b * b, -0.5 * t); }, 0.0, 1.0, 15, 1e-12);
  };
  return 4.0 * std::pow(h, -t) * gauss_kronrod<double, 31>::integrate(inner, 0.0, 1.0, 15, 1e-12);
}

double sign_of(MomentSign s) { return s == MomentSign::Plus ? 1.0 : -1.0; }

}  // namespace

double energy(const std::function<double(const Point&, const Point&)>& kernel, const EnergyConfig& cfg) {
  double e = 0.0;
  for (std::size_t j = 0; j < cfg.x.size(); ++j)
    for (std::size_t k = j + 1; k < cfg.x.size(); ++k) e -= kernel(cfg.x[j], cfg.x[k]);
  for (std::size_t j = 0; j < cfg.y.size(); ++j)
    for (std::size_t k = j + 1; k < cfg.y.size(); ++k) e -= kernel(cfg.y[j], cfg.y[k]);
  for (const auto& x : cfg.x)
    for (const auto& y : cfg.y) e += kernel(x, y);
  return e;
}

double energy(const CovarianceOracle& oracle, const EnergyConfig& cfg) {
  return energy([&oracle](const Point& a, const Point& b) { return oracle(a, b); }, cfg);
}

std::complex<double> log_gamma(std::complex<double> z) {
  static constexpr std::array<double, 9> c = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                              771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                              -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (near_pole(z)) throw NumericError("log_gamma: pole at non-positive integer");
  if (z.real() < 0.5) return std::log(kPi) - std::log(std::sin(kPi * z)) - log_gamma(1.0 - z);
  z -= 1.0;
  std::complex<double> x = c[0];
  for (int i = 1; i < 9; ++i) x += c[static_cast<std::size_t>(i)] / (z + static_cast<double>(i));
  const std::complex<double> t = z + 7.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

std::complex<double> fb_moment(std::complex<double> gamma2, double p) {
  if (p == 0.0) return 1.0;
  const std::complex<double> num = 1.0 - 0.5 * p * gamma2;
  const std::complex<double> den = 1.0 - 0.5 * gamma2;
  if (near_pole(num) || near_pole(den)) throw NumericError("fb_moment: Gamma pole on the evaluation path");
  if (p == 1.0) return 1.0;
  return std::exp(log_gamma(num) - p * log_gamma(den));
}

double circle_second_moment(double beta) { return fb_moment(-beta * beta, 2.0).real(); }
double circle_abs_second_moment(double beta) { return fb_moment(beta * beta, 2.0).real(); }

double second_moment_quadrature(double beta, const std::function<double(double)>& f, const CovarianceOracle& oracle,
                                MomentSign sign, std::size_t fourier_points) {
  if (!(beta > 0.0 && beta * beta < 1.0)) throw std::invalid_argument("second moment: need 0 < beta^2 < 1");
  if (!oracle.stationary() || oracle.metric() != CovarianceOracle::Metric::CircleArc)
    throw std::invalid_argument("second moment: continuum quadrature needs a stationary circle kernel");
  std::vector<cplx> coeff(fourier_points);
  for (std::size_t j = 0; j < fourier_points; ++j) coeff[j] = f(static_cast<double>(j) / static_cast<double>(fourier_points));
  fft_inplace(coeff, FftDirection::Forward);
  std::vector<double> power(fourier_points);
  for (std::size_t k = 0; k < fourier_points; ++k) power[k] = std::norm(coeff[k]) / static_cast<double>(fourier_points * fourier_points);
  auto autocorrelation = [&](double u) {
    double s = power[0];
    for (std::size_t k = 1; k < fourier_points; ++k) {
      const double freq = k <= fourier_points / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(fourier_points);
      s += power[k] * std::cos(2.0 * kPi * freq * u);
    }
    return s;
  };
  const double s = sign_of(sign) * beta * beta;
  boost::math::quadrature::tanh_sinh<double> ts;
  auto integrand = [&](double u) {
    if (u <= 0.0) return 0.0;
    return autocorrelation(u) * std::exp(s * oracle.at_distance(u));
  };
  return 2.0 * ts.integrate(integrand, 0.0, 0.5, 1e-13);
}

std::complex<double> second_moment_grid(double beta, const TestFunction& f, const GridCovariance& cov, MomentSign sign) {
  if (!(cov.grid() == f.grid)) throw std::invalid_argument("second moment: grid mismatch");
  const double s = sign_of(sign) * beta * beta;
  const auto kernel = cov.map([s](double c) { return std::exp(s * c); });
  return sign == MomentSign::Plus ? kernel->bilinear(f.values, f.values) : kernel->bilinear_plain(f.values, f.values);
}

std::complex<double> second_moment_grid(double beta, const TestFunction& f, const CovarianceOracle& oracle,
                                        MomentSign sign) {
  const int d = f.grid.dimension;
  if (!(beta > 0.0 && beta * beta < d)) throw std::invalid_argument("second moment: need 0 < beta^2 < d");
  const auto base = GridCovariance::from_oracle(oracle, f.grid);
  if (!oracle.singular_on_diagonal() || !base->is_stationary()) return second_moment_grid(beta, f, *base, sign);
  const double s = sign_of(sign) * beta * beta;
  std::vector<double> lags(base->lags().size());
  for (std::size_t m = 0; m < lags.size(); ++m) lags[m] = std::exp(s * base->lags()[m]);
  lags[0] = std::exp(s * oracle.remainder_at_zero()) * power_cell_average(f.grid.spacing(), s, d);
  const auto kernel = GridCovariance::stationary(f.grid, std::move(lags));
  return sign == MomentSign::Plus ? kernel->bilinear(f.values, f.values) : kernel->bilinear_plain(f.values, f.values);
}

std::complex<double> moment_grid_quadrature(int a, int b, double beta, const TestFunction& f, const GridCovariance& cov) {
  if (a < 0 || b < 0 || a + b < 1 || a + b > 6) throw std::invalid_argument("moment quadrature: need 1 <= a + b <= 6");
  if (!(cov.grid() == f.grid)) throw std::invalid_argument("moment quadrature: grid mismatch");
  const std::size_t n = f.grid.total_points();
  const int order = a + b;
  if (std::pow(static_cast<double>(n), order) > 1.2e9) throw std::invalid_argument("moment quadrature: too many tuples");
  const double b2 = beta * beta;
  std::vector<std::size_t> idx(static_cast<std::size_t>(order));
  auto charge = [a](int j) { return j < a ? 1.0 : -1.0; };
  // Depth-first over tuples with the partial exponent and weight carried along.
  std::function<std::complex<double>(int, double, std::complex<double>)> rec =
      [&](int depth, double exponent, std::complex<double> weight) -> std::complex<double> {
    if (depth == order) return weight * std::exp(b2 * exponent);
    std::complex<double> sum = 0.0;
    const double q = charge(depth);
    for (std::size_t i = 0; i < n; ++i) {
      const std::complex<double> fv = q > 0 ? f.values[i] : std::conj(f.values[i]);
      if (fv == 0.0) continue;
      double e = exponent;
      for (int j = 0; j < depth; ++j) e -= q * charge(j) * cov.at(idx[static_cast<std::size_t>(j)], i);
      idx[static_cast<std::size_t>(depth)] = i;
      sum += rec(depth + 1, e, weight * fv);
    }
    return sum;
  };
  return rec(0, 0.0, 1.0) * std::pow(f.grid.cell_volume(), order);
}

MomentResult summarize(std::span<const std::complex<double>> samples, int batches) {
  MomentResult r;
  r.n_samples = static_cast<std::int64_t>(samples.size());
  if (samples.empty()) return r;
  NeumaierSum re, im;
  for (const auto& x : samples) {
    re.add(x.real());
    im.add(x.imag());
  }
  const double n = static_cast<double>(samples.size());
  r.value = {re.value() / n, im.value() / n};
  NeumaierSum ss;
  for (const auto& x : samples) ss.add(std::norm(x - r.value));
  r.std_error = samples.size() > 1 ? std::sqrt(ss.value() / (n - 1.0) / n) : 0.0;
  const std::size_t size = samples.size() / static_cast<std::size_t>(std::max(batches, 1));
  if (batches >= 2 && size >= 2) {
    std::vector<std::complex<double>> means(static_cast<std::size_t>(batches));
    std::complex<double> grand = 0.0;
    for (int bi = 0; bi < batches; ++bi) {
      NeumaierSum br, bim;
      for (std::size_t i = 0; i < size; ++i) {
        const auto& x = samples[static_cast<std::size_t>(bi) * size + i];
        br.add(x.real());
        bim.add(x.imag());
      }
      means[static_cast<std::size_t>(bi)] = {br.value() / static_cast<double>(size), bim.value() / static_cast<double>(size)};
      grand += means[static_cast<std::size_t>(bi)];
    }
    grand /= static_cast<double>(batches);
    double v = 0.0;
    for (const auto& m : means) v += std::norm(m - grand);
    r.batch_std_error = std::sqrt(v / (batches - 1.0) / batches);
  } else {
    r.batch_std_error = r.std_error;
  }
  return r;
}

double z_score(const MomentResult& r, std::complex<double> oracle) {
  return r.std_error > 0.0 ? std::abs(r.value - oracle) / r.std_error : (r.value == oracle ? 0.0 : INFINITY);
}

std::vector<std::complex<double>> sample_chaos_integrals(const FieldSource& source, const TestFunction& f, double beta,
                                                         std::int64_t n_samples, const ChainPlan& plan) {
  const ChaosParams params{beta, f.grid.dimension};
  params.validate();
  auto parts = run_chains<std::vector<std::complex<double>>>(plan, n_samples, [&](RngStream& rng, std::int64_t count) {
    std::vector<std::complex<double>> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) out.push_back(chaos_integral(renormalized_exponential(source(rng), params), f));
    return out;
  });
  return concat(std::move(parts));
}

MomentResult moment_from_samples(std::span<const std::complex<double>> m, int a, int b) {
  std::vector<std::complex<double>> g(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::complex<double> v = 1.0;
    for (int j = 0; j < a; ++j) v *= m[i];
    for (int j = 0; j < b; ++j) v *= std::conj(m[i]);
    g[i] = v;
  }
  return summarize(g);
}

MomentResult mc_moment(double beta, const TestFunction& f, const FieldSource& source, int a, int b,
                       std::int64_t n_samples, const ChainPlan& plan) {
  if (a < 0 || b < 0 || a + b > 6) throw std::invalid_argument("mc_moment: need a, b >= 0 and a + b <= 6");
  const auto m = sample_chaos_integrals(source, f, beta, n_samples, plan);
  return moment_from_samples(m, a, b);
}

NegativeMomentResult negative_moment_from_samples(double beta, std::span<const std::complex<double>> m) {
  std::vector<std::complex<double>> inv(m.size()), inv_abs(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    inv[i] = 1.0 / m[i];
    inv_abs[i] = 1.0 / std::abs(m[i]);
  }
  return {beta, summarize(inv), summarize(inv_abs)};
}

NegativeMomentResult mc_negative_moment(double beta, int n_modes, std::size_t grid_points, std::int64_t n_samples,
                                        const ChainPlan& plan) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("negative moment: beta must lie in (0, 1)");
  const CircleSynthesizer synth(n_modes, circle_grid(grid_points));
  const auto f = TestFunction::constant(synth.grid(), 1.0);
  const auto m = sample_chaos_integrals([&synth](RngStream& rng) { return synth.sample(rng); }, f, beta, n_samples, plan);
  return negative_moment_from_samples(beta, m);
}

void write_moment_csv_header(std::ostream& out) {
  out << "experiment,beta,a,b,estimate_re,estimate_im,std_error,n_samples,oracle,z_score\n";
}

void write_moment_csv_row(std::ostream& out, const std::string& experiment, double beta, int a, int b,
                          const MomentResult& r, std::complex<double> oracle) {
  out.precision(17);
  out << experiment << ',' << beta << ',' << a << ',' << b << ',' << r.value.real() << ',' << r.value.imag() << ','
      << r.std_error << ',' << r.n_samples << ',' << oracle.real() << ',' << z_score(r, oracle) << '\n';
}

}  // namespace chaoslab
