#include "doctest.h"

#include "chaoslab/fft.hpp"
#include "chaoslab/grid.hpp"
#include "chaoslab/rng.hpp"
#include "chaoslab/seed_covariance.hpp"

#include <cmath>
#include <numeric>
#include <vector>

using namespace chaoslab;

TEST_CASE("philox known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(42, 3), b(42, 3), c(42, 4);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
}

TEST_CASE("normal draws have unit variance") {
  RngStream rng(7, 0);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("uniform stays in the open unit interval") {
  RngStream rng(1, 1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("fft matches a direct transform") {
  const std::size_t n = 16;
  std::vector<cplx> x(n), y;
  for (std::size_t j = 0; j < n; ++j) x[j] = cplx(std::sin(0.3 * j), std::cos(1.7 * j * j));
  y = x;
  fft_inplace(y, FftDirection::Forward);
  for (std::size_t k = 0; k < n; ++k) {
    cplx direct = 0;
    for (std::size_t j = 0; j < n; ++j)
      direct += x[j] * std::polar(1.0, -2.0 * M_PI * static_cast<double>(j * k) / static_cast<double>(n));
    CHECK(std::abs(direct - y[k]) < 1e-12);
  }
  fft_inplace(y, FftDirection::Backward);
  for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(y[j] / static_cast<double>(n) - x[j]) < 1e-13);
}

TEST_CASE("grid validation") {
  CHECK_NOTHROW(circle_grid(1024).validate());
  CHECK_THROWS_AS((GridSpec{1, 1000, 1.0, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GridSpec{3, 16, 1.0, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GridSpec{1, 16, -1.0, 0.0}.validate()), std::invalid_argument);
  CHECK(periodic_lag(1, 15, 16) == 2);
  CHECK(circle_grid(8).coordinate(4)[0] == doctest::Approx(0.5));
}

TEST_CASE("seed covariance values") {
  const auto seed = seed_covariance_default(1);
  CHECK(seed.profile(0.0) == 1.0);
  CHECK(seed.profile(1.2) == 0.0);
  // Reference values from an independent 30-digit quadrature of the bump self-convolution.
  CHECK(seed.profile(0.1) == doctest::Approx(0.94265674579521762).epsilon(1e-11));
  CHECK(seed.profile(0.25) == doctest::Approx(0.71187514314335431).epsilon(1e-11));
  CHECK(seed.profile(0.5) == doctest::Approx(0.25448009084824564).epsilon(1e-11));
  CHECK(seed.profile(0.75) == doctest::Approx(0.014901393522564474).epsilon(1e-9));
  CHECK(seed.fourier_profile(0.0) == doctest::Approx(0.74061257306121613).epsilon(1e-12));
  CHECK(seed.fourier_profile(1.0) == doctest::Approx(0.71182625670772191).epsilon(1e-12));
  CHECK(seed.fourier_profile(30.0) == doctest::Approx(0.0001232747124753903).epsilon(1e-9));
  CHECK(std::abs(seed.fourier_profile(10.0) - 1.6925140612972955e-7) < 1e-15);
  CHECK_THROWS_AS(seed_covariance_default(3), std::invalid_argument);
}

TEST_CASE("seed covariance audit passes in both dimensions") {
  for (int d : {1, 2}) {
    const auto report = audit_seed_covariance(seed_covariance_default(d));
    INFO("d = " << d << " mismatch " << report.transform_mismatch);
    CHECK(report.ok);
  }
}
