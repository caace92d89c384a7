#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "chaoslab/field.hpp"

namespace chaoslab {

struct ChaosParams {
  double beta = 0.5;
  int dimension = 1;
  // Requires 0 < beta < sqrt(d).
  void validate() const;
};

// Grid-aligned test function with a support mask.
struct TestFunction {
  GridSpec grid;
  std::vector<std::complex<double>> values;
  std::vector<std::uint8_t> support;

  static TestFunction constant(const GridSpec& grid, std::complex<double> c);
  static TestFunction from(const GridSpec& grid, const std::function<std::complex<double>(const Point&)>& fn);
  // Values outside [lo, hi)^d are zeroed.
  static TestFunction restricted(const GridSpec& grid, const std::function<std::complex<double>(const Point&)>& fn,
                                 double lo, double hi);
  bool real_valued() const;
  // h^d sum f
  std::complex<double> integral() const;
};

// :exp(i beta Gamma): on the grid.
struct ChaosGrid {
  GridSpec grid;
  std::vector<std::complex<double>> values;
  double beta = 0.0;
  std::shared_ptr<const GridCovariance> covariance;
  std::uint64_t field_fingerprint = 0;
};

ChaosGrid renormalized_exponential(const FieldSample& field, const ChaosParams& params);
// Trapezoidal sum h^d sum_x f(x) mu(x).
std::complex<double> chaos_integral(const ChaosGrid& chaos, const TestFunction& f);
// Pointwise product f mu.
std::vector<std::complex<double>> weighted_chaos(const ChaosGrid& chaos, const TestFunction& f);
// (sum_k (1 + |2 pi k / L|^2)^s |c_k|^2)^{1/2} with c_k the normalized DFT of f mu.
double sobolev_norm(const ChaosGrid& chaos, const TestFunction& f, double s);
double sobolev_norm(std::span<const std::complex<double>> g, const GridSpec& grid, double s);

// Rows: grid index, Re, Im.
void write_csv(std::ostream& out, const ChaosGrid& chaos);

}  // namespace chaoslab
