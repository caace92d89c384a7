#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "chaoslab/chaos.hpp"
#include "chaoslab/moments.hpp"

namespace chaoslab {

// h = C w in the complexified Cameron-Martin space, stored as the charge w.
struct ChargeFunction {
  GridSpec grid;
  std::vector<std::complex<double>> values;
};

// <C a, C b>_H = h^{2d} sum a C conj(b). The grid covariance carries the
// diagonal correction when it was built from a singular oracle.
std::complex<double> h_inner(const ChargeFunction& a, const ChargeFunction& b, const GridCovariance& cov);
std::complex<double> h_inner(const ChargeFunction& a, const ChargeFunction& b, const CovarianceOracle& oracle);

struct MalliavinStats {
  std::complex<double> i1;  // sum f mu C conj(f mu)
  std::complex<double> i2;  // sum f mu C f mu
  double det_gamma = 0.0;   // beta^4/4 (|I1|^2 - |I2|^2)
  double d2_norm2 = 0.0;    // beta^4 Re sum f mu C^2 conj(f mu)
  std::complex<double> delta_dm{0.0, 0.0};
};

// Uses chaos.covariance, which must be the covariance of the synthesized field.
MalliavinStats malliavin_stats(const ChaosGrid& chaos, const TestFunction& f);
MalliavinStats malliavin_stats(const ChaosGrid& chaos, const TestFunction& f, const GridCovariance& cov);

// beta h^d sum f (i Gamma + beta Var) mu with Var the truncation variance.
// Throws if `chaos` was not built from `field`.
std::complex<double> delta_DM(const FieldSample& field, const ChaosGrid& chaos, const TestFunction& f, double beta);

// Charges of DM = i beta int f mu C(., x) and of D conj(M).
ChargeFunction charge_of_DM(const ChaosGrid& chaos, const TestFunction& f);
ChargeFunction charge_of_DMbar(const ChaosGrid& chaos, const TestFunction& f);

// lhs - rhs of the two projection bounds:
//   det/|DF|^2 >= (|<DF,h>| - |<DFbar,h>|)^2 / (4 |h|^2)
//   det        >= (|<DF,h>| - |<DFbar,h>|)^4 / (4 |h|^4)
struct ProjectionMargins {
  double first = 0.0;
  double second = 0.0;
};
ProjectionMargins projection_bound_check(const ChaosGrid& chaos, const TestFunction& f, const GridCovariance& cov,
                                         const ChargeFunction& h);

// beta^4 Re sum f conj(f) e^{beta^2 C} C^2, the mean of d2_norm2 for a
// Gaussian field with grid covariance C.
double expected_d2_norm2(double beta, const TestFunction& f, const GridCovariance& cov);

enum class SmallBallQuantity { DetGamma, SobolevNorm };
std::string to_string(SmallBallQuantity q);

struct SmallBallCurve {
  std::string quantity;
  double beta = 0.0;
  std::int64_t n_samples = 0;
  std::vector<double> eps;
  std::vector<double> p_hat;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  std::vector<std::uint8_t> censored;  // fewer than 10 samples at or below eps
};

// 95% Wilson score interval.
std::pair<double, double> wilson_interval(std::int64_t hits, std::int64_t n, double z = 1.959963984540054);

std::vector<double> log_spaced(double lo, double hi, int points);

// Empirical CDF of `values` on `eps` (ascending, log-spaced, spanning >= 4 decades).
SmallBallCurve smallball_from_samples(std::vector<double> values, const std::vector<double>& eps, double beta,
                                      const std::string& quantity);

// Draws n realizations and evaluates the quantity; Sobolev uses index s.
std::vector<double> sample_smallball_quantity(SmallBallQuantity quantity, double beta, const TestFunction& f,
                                              const FieldSource& source, std::int64_t n, const ChainPlan& plan,
                                              double sobolev_index = -0.5);
SmallBallCurve smallball_curve(SmallBallQuantity quantity, double beta, const TestFunction& f,
                               const FieldSource& source, const std::vector<double>& eps, std::int64_t n,
                               const ChainPlan& plan, double sobolev_index = -0.5);

// Local log-log slopes of the CDF between the levels where P-hat crosses
// successive powers of ten, scanning down from `top` until censoring.
struct SlopeProfile {
  std::vector<double> level;      // P-hat level at the lower crossing
  std::vector<double> log_eps;    // midpoint of the interval, natural log
  std::vector<double> slope;      // d log P / d log eps
  int decades = 0;                // number of decade intervals observed
};
SlopeProfile smallball_slopes(const std::vector<double>& sorted_values, std::int64_t censor_count = 10,
                              double top = 0.1);

// eps, p_hat, ci_low, ci_high, censored
void write_csv(std::ostream& out, const SmallBallCurve& curve);
void write_stats_header(std::ostream& out);
void write_stats_row(std::ostream& out, std::int64_t index, const MalliavinStats& s);

}  // namespace chaoslab
