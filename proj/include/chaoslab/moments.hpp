#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "chaoslab/chaos.hpp"
#include "chaoslab/covariance.hpp"
#include "chaoslab/parallel.hpp"

namespace chaoslab {

// Signed point configuration: charges +1 at x, -1 at y.
struct EnergyConfig {
  std::vector<Point> x;
  std::vector<Point> y;
};

// -sum_{j<k} C(x_j, x_k) - sum_{j<k} C(y_j, y_k) + sum_{j,k} C(x_j, y_k)
double energy(const CovarianceOracle& oracle, const EnergyConfig& cfg);
double energy(const std::function<double(const Point&, const Point&)>& kernel, const EnergyConfig& cfg);

// Principal-branch log Gamma for complex arguments (Lanczos, reflection for Re z < 1/2).
std::complex<double> log_gamma(std::complex<double> z);
// Gamma(1 - p gamma^2 / 2) / Gamma(1 - gamma^2 / 2)^p. Imaginary chaos uses gamma^2 = -beta^2.
// Throws NumericError within 1e-9 of a pole.
std::complex<double> fb_moment(std::complex<double> gamma2, double p);
// E[mu(S^1)^2] and E[|mu(S^1)|^2] for the circle field.
double circle_second_moment(double beta);
double circle_abs_second_moment(double beta);

enum class MomentSign { Plus, Minus };

// Continuum oracle on the circle: int int f(x) f(y) exp(+-beta^2 C(x, y)) dx dy
// for a stationary circle kernel. f is sampled at `fourier_points` nodes to
// build its autocorrelation; the lag integral uses tanh-sinh quadrature.
double second_moment_quadrature(double beta, const std::function<double(double)>& f, const CovarianceOracle& oracle,
                                MomentSign sign, std::size_t fourier_points = 256);

// Grid oracle: h^{2d} sum_ij f_i f_j exp(+-beta^2 C_ij). For a singular oracle
// the diagonal cells use the exact cell average of |x - y|^{-+beta^2}.
std::complex<double> second_moment_grid(double beta, const TestFunction& f, const CovarianceOracle& oracle,
                                        MomentSign sign);
// Same with a given grid covariance (exact for the truncated field).
std::complex<double> second_moment_grid(double beta, const TestFunction& f, const GridCovariance& cov, MomentSign sign);

// Brute force E[M^a conj(M)^b] over all (a + b)-tuples of grid points,
// M = h^d sum f mu and E[prod mu(x_j) prod conj mu(y_k)] = exp(beta^2 E(x; y)).
std::complex<double> moment_grid_quadrature(int a, int b, double beta, const TestFunction& f, const GridCovariance& cov);

struct MomentResult {
  std::complex<double> value;
  double std_error = 0.0;        // sample std / sqrt(n)
  double batch_std_error = 0.0;  // 100-batch means
  std::int64_t n_samples = 0;
};
MomentResult summarize(std::span<const std::complex<double>> samples, int batches = 100);
double z_score(const MomentResult& r, std::complex<double> oracle);

using FieldSource = std::function<FieldSample(RngStream&)>;

// Samples of M = mu(f), chains reduced in order.
std::vector<std::complex<double>> sample_chaos_integrals(const FieldSource& source, const TestFunction& f, double beta,
                                                         std::int64_t n_samples, const ChainPlan& plan);

MomentResult mc_moment(double beta, const TestFunction& f, const FieldSource& source, int a, int b,
                       std::int64_t n_samples, const ChainPlan& plan);
MomentResult moment_from_samples(std::span<const std::complex<double>> m, int a, int b);

struct NegativeMomentResult {
  double beta = 0.0;
  MomentResult inverse;          // E[M^{-1}]
  MomentResult inverse_modulus;  // E[|M|^{-1}]
};
// Circle field with f = 1.
NegativeMomentResult mc_negative_moment(double beta, int n_modes, std::size_t grid_points, std::int64_t n_samples,
                                        const ChainPlan& plan);
NegativeMomentResult negative_moment_from_samples(double beta, std::span<const std::complex<double>> m);

void write_moment_csv_header(std::ostream& out);
void write_moment_csv_row(std::ostream& out, const std::string& experiment, double beta, int a, int b,
                          const MomentResult& r, std::complex<double> oracle);

}  // namespace chaoslab
