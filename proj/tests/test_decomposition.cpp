#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chaoslab/covariance.hpp"
#include "chaoslab/decomposition.hpp"
#include "json.hpp"

using namespace chaoslab;

namespace {

std::vector<double> decades(double lo_exp, double hi_exp, int per_decade) {
  std::vector<double> xi;
  const int n = static_cast<int>((hi_exp - lo_exp) * per_decade);
  for (int i = 0; i <= n; ++i) xi.push_back(std::pow(10.0, lo_exp + static_cast<double>(i) / per_decade));
  return xi;
}

double drift(const std::vector<Bracket>& b) {
  double lo_min = INFINITY, lo_max = 0, hi_min = INFINITY, hi_max = 0;
  for (const auto& x : b) {
    lo_min = std::min(lo_min, x.c_low);
    lo_max = std::max(lo_max, x.c_low);
    hi_min = std::min(hi_min, x.c_high);
    hi_max = std::max(hi_max, x.c_high);
  }
  return std::max(lo_max / lo_min, hi_max / hi_min);
}

DecompositionScanOptions small_scan(GTildeKind kind) {
  DecompositionScanOptions o;
  o.points = 256;
  o.gtilde = kind;
  o.alphas = {0.05, 0.2, 0.5, 1.0, 2.0, 4.0};
  return o;
}

}  // namespace

TEST_CASE("symbols at the origin") {
  for (int d : {1, 2}) {
    const auto seed = SeedCovariance::bump_self_convolution(d);
    const std::vector<double> zero{0.0};
    const double k0 = seed.fourier_profile(0.0);
    CHECK(symbol_K_hat(zero, seed)[0] == doctest::Approx(k0 / d).epsilon(1e-15));
    for (double a : {0.1, 1.0, 3.0})
      CHECK(symbol_u_alpha(zero, seed, a)[0] == doctest::Approx(k0 / (d + a)).epsilon(1e-15));
    // continuity into the origin
    const std::vector<double> tiny{1e-6};
    CHECK(symbol_u_alpha(tiny, seed, 0.5)[0] == doctest::Approx(k0 / (d + 0.5)).epsilon(1e-9));
  }
}

TEST_CASE("alpha = 0 reproduces K-hat") {
  for (int d : {1, 2}) {
    const auto seed = SeedCovariance::bump_self_convolution(d);
    const auto xi = decades(-2, 4, 5);
    const auto k = symbol_K_hat(xi, seed);
    const auto u = symbol_u_alpha(xi, seed, 0.0);
    for (std::size_t i = 0; i < xi.size(); ++i) CHECK(std::abs(u[i] - k[i]) <= 1e-10 * k[i]);
  }
}

TEST_CASE("two quadrature routes agree") {
  for (int d : {1, 2}) {
    const auto seed = SeedCovariance::bump_self_convolution(d);
    const std::vector<double> xi{0.3, 2.0, 17.0, 150.0, 599.0, 601.0, 5e3, 1e5};
    for (double a : {0.0, 0.3, 1.0}) {
      const auto u = symbol_u_alpha(xi, seed, a);
      for (std::size_t i = 0; i < xi.size(); ++i) {
        const double direct = symbol_u_alpha_direct(xi[i], seed, a);
        CHECK(std::abs(direct - u[i]) <= 1e-8 * std::abs(direct));
      }
    }
  }
}

TEST_CASE("large-frequency tails") {
  // xi^d K-hat -> int_0^inf v^{d-1} k-hat = (2 pi)^d k(0) / |S^{d-1}|, i.e. pi and 2 pi.
  const std::vector<double> big{1e6};
  for (int d : {1, 2}) {
    const auto seed = SeedCovariance::bump_self_convolution(d);
    const double expected = d == 1 ? M_PI * seed.profile(0.0) : 2.0 * M_PI * seed.profile(0.0);
    CHECK(symbol_K_hat(big, seed)[0] * std::pow(1e6, d) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("symbols are positive and eventually monotone") {
  for (int d : {1, 2}) {
    const auto seed = SeedCovariance::bump_self_convolution(d);
    const auto xi = decades(-2, 4, 10);
    for (double a : {0.1, 0.3, 1.0}) {
      const auto t = symbol_table(xi, seed, a);
      for (std::size_t i = 0; i < xi.size(); ++i) {
        CHECK(t.k_hat[i] > 0.0);
        CHECK(t.u_alpha_hat[i] > 0.0);
        CHECK(t.k_alpha_hat[i] >= 0.0);
      }
      CHECK(monotone_from(xi, t.k_hat) == xi.front());
      CHECK(monotone_from(xi, t.u_alpha_hat) == xi.front());
    }
  }
}

TEST_CASE("bracketing over six decades") {
  const auto xi = decades(-2, 4, 10);
  for (int d : {1, 2}) {
    const auto seed = SeedCovariance::bump_self_convolution(d);
    const auto bk = fit_bracket(xi, symbol_K_hat(xi, seed), d);
    // the band runs from the value at the origin to the large-xi limit
    CHECK(bk.c_low == doctest::Approx(seed.fourier_profile(0.0) / d).epsilon(1e-3));
    CHECK(bk.c_high == doctest::Approx(d == 1 ? M_PI : 2.0 * M_PI).epsilon(1e-3));
    for (double a : {0.1, 0.3, 1.0}) {
      const auto b = fit_bracket(xi, symbol_u_alpha(xi, seed, a), d + a);
      CHECK(b.c_low > 0.0);
      CHECK(std::isfinite(b.c_high));
    }
  }
}

TEST_CASE("bracket drift across alpha in d = 1") {
  const auto seed = SeedCovariance::bump_self_convolution(1);
  const auto xi = decades(-2, 4, 10);
  std::vector<Bracket> b;
  for (double a : {0.1, 0.3, 1.0}) b.push_back(fit_bracket(xi, symbol_u_alpha(xi, seed, a), 1.0 + a));
  CHECK(drift(b) < 4.0);
}

TEST_CASE("upper bracket in d = 2 follows the Mellin moments of k-hat") {
  // c_high(alpha) sits just above the xi -> inf limit int_0^inf v^{1+alpha} k-hat(v) dv, so
  // its drift over alpha is a property of the seed, not of the quadrature.
  const auto seed = SeedCovariance::bump_self_convolution(2);
  const auto xi = decades(-2, 4, 10);
  const std::vector<double> far{1e9};
  for (double a : {0.1, 0.3, 1.0}) {
    const auto b = fit_bracket(xi, symbol_u_alpha(xi, seed, a), 2.0 + a);
    const double moment = symbol_u_alpha(far, seed, a)[0] * std::pow(1e9, 2.0 + a);
    CHECK(b.c_high >= moment * (1.0 - 1e-9));
    CHECK(b.c_high <= moment * 1.01);
  }
}

TEST_CASE("inverse transform of K-hat") {
  const auto seed = SeedCovariance::bump_self_convolution(1);
  for (double r : {1e-4, 0.003, 0.05, 0.3, 0.7, 0.99})
    CHECK(star_kernel_from_symbol(r, seed) == doctest::Approx(star_cov(r, seed)).epsilon(1e-9));
  CHECK(std::abs(star_kernel_from_symbol(1.5, seed)) < 1e-10);
  // C_X + log r stays bounded on (0, 1]
  double lo = INFINITY, hi = -INFINITY;
  for (double r = 1e-8; r <= 1.0; r *= 1.5) {
    const double g = star_kernel_from_symbol(r, seed) + std::log(r);
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  CHECK(std::isfinite(lo));
  CHECK(hi - lo < 2.0);
  CHECK_THROWS(star_kernel_from_symbol(0.0, seed));
  CHECK_THROWS(star_kernel_from_symbol(0.5, SeedCovariance::bump_self_convolution(2)));
}

TEST_CASE("smoothstep") {
  for (int order : {1, 3, 5, 7, 9}) {
    CHECK(smoothstep(0.0, order) == 0.0);
    CHECK(smoothstep(1.0, order) == 1.0);
    CHECK(smoothstep(0.5, order) == doctest::Approx(0.5).epsilon(1e-14));
    for (double t = 0.05; t < 1.0; t += 0.1)
      CHECK(smoothstep(t, order) + smoothstep(1.0 - t, order) == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK(smoothstep(0.3, 1) == doctest::Approx(0.3));
  CHECK(smoothstep(0.3, 3) == doctest::Approx(3 * 0.09 - 2 * 0.027));
  // order 7 has three vanishing derivatives at 0
  CHECK(smoothstep(1e-3, 7) == doctest::Approx(35e-12).epsilon(1e-3));
  CHECK_THROWS(smoothstep(0.5, 4));
}

TEST_CASE("partition of unity") {
  struct Case {
    Box v, w;
    int d;
    std::size_t points;
  };
  for (const auto& c : {Case{{-0.25, 0.25}, {-0.5, 0.5}, 1, 1024}, Case{{0.0, 0.1}, {-0.2, 0.5}, 1, 512},
                        Case{{-0.3, 0.3}, {-0.4, 0.4}, 2, 64}}) {
    const GridSpec grid = interval_grid(-1.0, 1.0, c.points, c.d);
    for (int order : {3, 7}) {
      const auto p = partition_of_unity(c.v, c.w, grid, order);
      double worst = 0.0;
      for (std::size_t i = 0; i < grid.total_points(); ++i) {
        worst = std::max(worst, std::abs(p.a[i] * p.a[i] + p.b[i] * p.b[i] - 1.0));
        const Point x = grid.coordinate(i);
        auto inside = [&](const Box& b) {
          bool in = x[0] >= b.lo && x[0] <= b.hi;
          if (c.d == 2) in = in && x[1] >= b.lo && x[1] <= b.hi;
          return in;
        };
        if (inside(c.v)) CHECK(p.b[i] == 0.0);
        if (!inside(c.w)) CHECK(p.a[i] == 0.0);
        CHECK(p.a[i] >= 0.0);
        CHECK(p.b[i] >= 0.0);
      }
      CHECK(worst <= 1e-12);
    }
  }
  const GridSpec grid = interval_grid(-1.0, 1.0, 64);
  CHECK_THROWS(partition_of_unity({-0.5, 0.5}, {-0.5, 0.6}, grid));
  CHECK_THROWS(partition_of_unity({-0.6, 0.5}, {-0.5, 0.6}, grid));
}

TEST_CASE("interval grid and kernel matrices") {
  const GridSpec grid = interval_grid(-1.0, 1.0, 64);
  CHECK(grid.coordinate(0)[0] == doctest::Approx(-1.0 + 1.0 / 64));
  CHECK(grid.coordinate(63)[0] == doctest::Approx(1.0 - 1.0 / 64));
  CHECK_THROWS(interval_grid(1.0, 1.0, 64));
  CHECK_THROWS(interval_grid(0.0, 1.0, 60));

  const auto seed = SeedCovariance::bump_self_convolution(1);
  const auto cx = star_kernel_matrix(grid, seed);
  const double h = grid.spacing();
  CHECK(cx.matrix(3, 10) == doctest::Approx(h * star_cov(7 * h, seed)).epsilon(1e-14));
  CHECK(cx.matrix(5, 5) == doctest::Approx(h * (1.5 - std::log(h) + star_cov(1e-9, seed) + std::log(1e-9))).epsilon(1e-9));
  CHECK(cx.matrix == cx.matrix.transpose());

  const auto u = u_alpha_matrix(grid, seed, 0.5);
  CHECK(u.matrix(0, 0) == doctest::Approx(h / 0.5));
  CHECK(u.matrix(2, 9) == doctest::Approx(h * star_minus_almost_star_cov(7 * h, 0.5, seed)).epsilon(1e-14));
  CHECK_THROWS(u_alpha_matrix(grid, seed, 0.0));
  CHECK_THROWS(star_kernel_matrix(interval_grid(-1, 1, 8, 2), seed));

  const GridSpec g2 = interval_grid(-1.0, 1.0, 8, 2);
  const auto seed2 = SeedCovariance::bump_self_convolution(2);
  const auto c2 = star_kernel_matrix(g2, seed2);
  // points (0,0) and (2,1) in grid units
  const double r = g2.spacing() * std::sqrt(5.0);
  CHECK(c2.matrix(0, 2 * 8 + 1) == doctest::Approx(g2.cell_volume() * star_cov(r, seed2)).epsilon(1e-14));
  CHECK(c2.matrix == c2.matrix.transpose());
}

TEST_CASE("assemble R") {
  const auto seed = SeedCovariance::bump_self_convolution(1);
  const GridSpec grid = interval_grid(-1.0, 1.0, 128);
  const Box v{-0.25, 0.25}, w{-0.5, 0.5};
  const auto pair = partition_of_unity(v, w, grid);
  const auto cx = star_kernel_matrix(grid, seed);
  for (auto kind : {GTildeKind::Zero, GTildeKind::Bump, GTildeKind::CircleRemainder}) {
    const auto g = gtilde_matrix(kind, grid, seed, w, cx);
    const auto r = assemble_R(pair, cx, g);
    CHECK(r.matrix == r.matrix.transpose());
    for (std::size_t i = 0; i < grid.total_points(); ++i)
      for (std::size_t j = 0; j < grid.total_points(); ++j) {
        const double xi = grid.coordinate(i)[0], xj = grid.coordinate(j)[0];
        const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
        if (std::abs(xi) < 0.25 && std::abs(xj) < 0.25) CHECK(r.matrix(ii, jj) == g.matrix(ii, jj));
        if (std::abs(xi) > 0.5 && std::abs(xj) > 0.5) CHECK(r.matrix(ii, jj) == 0.0);
      }
  }
  CHECK_THROWS(assemble_R(pair, star_kernel_matrix(interval_grid(-1, 1, 64), seed), cx));
}

TEST_CASE("g-tilde rungs") {
  const auto seed = SeedCovariance::bump_self_convolution(1);
  const GridSpec grid = interval_grid(-1.0, 1.0, 128);
  const Box w{-0.5, 0.5};
  const auto cx = star_kernel_matrix(grid, seed);
  CHECK(gtilde_matrix(GTildeKind::Zero, grid, seed, w, cx).matrix.isZero(0.0));
  // the bump sits at the given fraction of the positivity limit of C_X + g
  for (double strength : {0.5, 0.9}) {
    const auto g = gtilde_matrix(GTildeKind::Bump, grid, seed, w, cx, strength);
    CHECK(min_eigenvalue({"", grid, cx.matrix + g.matrix}) > 0.0);
    const auto over = gtilde_matrix(GTildeKind::Bump, grid, seed, w, cx, 1.0 + strength);
    CHECK(min_eigenvalue({"", grid, cx.matrix + over.matrix}) < 0.0);
  }
  // circle remainder: C_X + g is the log kernel of the circle of length 2
  const auto g = gtilde_matrix(GTildeKind::CircleRemainder, grid, seed, w, cx);
  const double h = grid.spacing();
  CHECK(cx.matrix(1, 40) + g.matrix(1, 40) ==
        doctest::Approx(-h * std::log(2.0 * std::sin(M_PI * 39 * h / 2))).epsilon(1e-12));
  CHECK(std::abs(g.matrix(0, 0) - g.matrix(0, 1)) < 0.01 * h);
  CHECK_THROWS(gtilde_matrix(GTildeKind::CircleRemainder, interval_grid(-1, 1, 8, 2),
                             SeedCovariance::bump_self_convolution(2), w,
                             star_kernel_matrix(interval_grid(-1, 1, 8, 2), SeedCovariance::bump_self_convolution(2))));
  for (auto k : {GTildeKind::None, GTildeKind::Zero, GTildeKind::Bump, GTildeKind::CircleRemainder})
    CHECK(gtilde_from_string(to_string(k)) == k);
  CHECK_THROWS(gtilde_from_string("sinc"));
}

TEST_CASE("scan without remainder is positive for every alpha") {
  const auto seed = SeedCovariance::bump_self_convolution(1);
  auto o = small_scan(GTildeKind::None);
  const auto scan = min_eig_scan(o, seed);
  CHECK(scan.base_min_eig > 0.0);
  for (const auto& e : scan.entries) CHECK(e.min_eig > e.resolution);
  CHECK(scan.alpha_star == o.alphas.back());
  CHECK(scan.nonincreasing);
}

TEST_CASE("scan over the g-tilde ladder") {
  const auto seed = SeedCovariance::bump_self_convolution(1);
  for (auto kind : {GTildeKind::Zero, GTildeKind::Bump, GTildeKind::CircleRemainder}) {
    const auto scan = min_eig_scan(small_scan(kind), seed);
    CHECK(scan.base_min_eig > 0.0);
    CHECK(scan.nonincreasing);
    CHECK(scan.alpha_star > 0.0);
    // adversarial enough to cross zero inside the list
    CHECK(scan.entries.back().min_eig < 0.0);
    for (std::size_t i = 1; i < scan.entries.size(); ++i)
      CHECK(scan.entries[i].min_eig <= scan.entries[i - 1].min_eig);
  }
}

TEST_CASE("scan in d = 2") {
  const auto seed = SeedCovariance::bump_self_convolution(2);
  DecompositionScanOptions o;
  o.dimension = 2;
  o.points = 16;
  o.v = {-0.3, 0.3};
  o.w = {-0.6, 0.6};
  o.gtilde = GTildeKind::Bump;
  o.alphas = {0.1, 0.5, 1.0, 2.0, 5.0};
  const auto scan = min_eig_scan(o, seed);
  CHECK(scan.grid_points == 256);
  CHECK(scan.base_min_eig > 0.0);
  CHECK(scan.nonincreasing);
  CHECK(scan.alpha_star > 0.0);
  o.gtilde = GTildeKind::CircleRemainder;
  CHECK_THROWS(min_eig_scan(o, seed));
}

TEST_CASE("scan validation, determinism and output") {
  const auto seed = SeedCovariance::bump_self_convolution(1);
  auto o = small_scan(GTildeKind::Bump);
  o.points = 64;
  const auto a = min_eig_scan(o, seed);
  const auto b = min_eig_scan(o, seed);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) CHECK(a.entries[i].min_eig == b.entries[i].min_eig);

  std::ostringstream out;
  write_json(out, a);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["scan"].size() == o.alphas.size());
  for (const char* key : {"alpha", "min-eig", "grid-points", "kernel-id"}) CHECK(j["scan"][0].contains(key));
  CHECK(j["alpha-star"].get<double>() == a.alpha_star);

  o.alphas = {0.5, 0.1};
  CHECK_THROWS(min_eig_scan(o, seed));
  o.alphas = {};
  CHECK_THROWS(min_eig_scan(o, seed));

  OperatorMatrix bad{"", interval_grid(-1, 1, 4), Eigen::MatrixXd::Identity(4, 4)};
  bad.matrix(0, 1) = 1.0;
  CHECK_THROWS_AS(min_eigenvalue(bad), std::logic_error);
}

TEST_CASE("symbol table CSV") {
  const auto seed = SeedCovariance::bump_self_convolution(1);
  const std::vector<double> xi{0.0, 1.0, 10.0};
  const auto t = symbol_table(xi, seed, 0.3);
  std::ostringstream out;
  write_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "xi,K_hat,K_alpha_hat,u_alpha_hat");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
  for (std::size_t i = 0; i < xi.size(); ++i)
    CHECK(t.k_alpha_hat[i] == doctest::Approx(t.k_hat[i] - t.u_alpha_hat[i]));
}
