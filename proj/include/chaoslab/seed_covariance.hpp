#pragma once

#include <memory>
#include <vector>

namespace chaoslab {

// Rotationally symmetric seed covariance k on R^d with k(0) = 1, support in
// the closed unit ball and a nonnegative, rapidly decaying Fourier transform.
//
// The concrete profile is the self-convolution of the bump
// b(x) = exp(-1 / (1 - 4|x|^2)) supported in B(0, 1/2), normalized by
// ||b||^2, so that k-hat = |b-hat|^2 / ||b||^2 is nonnegative by construction.
// Fourier convention: k-hat(xi) = int k(x) exp(-i x.xi) dx.
class SeedCovariance {
 public:
  // Throws std::invalid_argument unless d is 1 or 2.
  static SeedCovariance bump_self_convolution(int dimension);

  int dimension() const { return dimension_; }
  // k(r) for r >= 0; exactly zero for r >= 1.
  double profile(double r) const;
  // k-hat(|xi|) for |xi| >= 0.
  double fourier_profile(double rho) const;
  // The bump transform b-hat(|xi|), exposed for diagnostics.
  double bump_transform(double rho) const;

 private:
  struct Tables;
  SeedCovariance(int dimension, std::shared_ptr<const Tables> tables)
      : dimension_(dimension), tables_(std::move(tables)) {}

  int dimension_;
  std::shared_ptr<const Tables> tables_;
};

inline SeedCovariance seed_covariance_default(int dimension) {
  return SeedCovariance::bump_self_convolution(dimension);
}

// Numerical audit of the seed assumptions.
struct SeedCovarianceReport {
  double profile_at_zero = 0.0;
  double max_profile_outside_support = 0.0;
  double min_profile = 0.0;
  double min_fourier = 0.0;
  // max over a log-spaced xi grid of k-hat(xi) (1 + xi^2)^s.
  double decay_constant = 0.0;
  double decay_exponent = 0.0;
  // max |k-hat - FT[k]| on sample frequencies, FT[k] by direct quadrature.
  double transform_mismatch = 0.0;
  bool ok = false;
};

SeedCovarianceReport audit_seed_covariance(const SeedCovariance& seed);

}  // namespace chaoslab
