#include "chaoslab/decomposition.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <limits>
#include <stdexcept>
#include <utility>

#include "chaoslab/covariance.hpp"
#include "chaoslab/errors.hpp"
#include "chaoslab/parallel.hpp"
#include "json.hpp"

namespace chaoslab {

namespace {

constexpr double kPi = std::numbers::pi;
// k-hat is below 1e-19 k-hat(0) past this frequency for the bump seeds.
constexpr double kCutoff = 600.0;
constexpr int kPanels = 600;
constexpr int kOrder = 20;

// k-hat at Gauss-Legendre nodes of unit panels on [0, kCutoff], with
// barycentric interpolation inside a panel.
struct KhatTable {
  std::array<double, kOrder> x{};   // ascending nodes on [-1, 1]
  std::array<double, kOrder> w{};   // quadrature weights
  std::array<double, kOrder> bary{};
  std::vector<std::array<double, kOrder>> values;
  double at_zero = 0.0;

  double node(int p, int k) const { return p + 0.5 * (x[static_cast<std::size_t>(k)] + 1.0); }

  double interpolate(double v) const {
    int p = static_cast<int>(v);
    if (p >= kPanels) return 0.0;
    const double t = 2.0 * (v - p) - 1.0;
    const auto& f = values[static_cast<std::size_t>(p)];
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < kOrder; ++k) {
      const double diff = t - x[k];
      if (diff == 0.0) return f[k];
      const double c = bary[k] / diff;
      num += c * f[k];
      den += c;
    }
    return num / den;
  }
};

std::shared_ptr<const KhatTable> khat_table(const SeedCovariance& seed) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const KhatTable>> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(seed.dimension()); it != cache.end()) return it->second;
  auto t = std::make_shared<KhatTable>();
  const auto& abs = boost::math::quadrature::gauss<double, kOrder>::abscissa();
  const auto& wts = boost::math::quadrature::gauss<double, kOrder>::weights();
  const std::size_t half = kOrder / 2;
  for (std::size_t k = 0; k < half; ++k) {
    t->x[half - 1 - k] = -abs[k];
    t->x[half + k] = abs[k];
    t->w[half - 1 - k] = wts[k];
    t->w[half + k] = wts[k];
  }
  for (std::size_t k = 0; k < kOrder; ++k)
    t->bary[k] = (k % 2 == 0 ? 1.0 : -1.0) * std::sqrt((1.0 - t->x[k] * t->x[k]) * t->w[k]);
  t->values.resize(kPanels);
  for (int p = 0; p < kPanels; ++p)
    for (int k = 0; k < kOrder; ++k) t->values[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)] = seed.fourier_profile(t->node(p, k));
  t->at_zero = seed.fourier_profile(0.0);
  cache.emplace(seed.dimension(), t);
  return t;
}

// int_0^xi v^e k-hat(v) dv for every xi, sharing panel sums.
class MomentIntegrator {
 public:
  MomentIntegrator(std::shared_ptr<const KhatTable> table, double e) : t_(std::move(table)), e_(e) {
    prefix_.assign(kPanels + 1, 0.0);
    prefix_[1] = first_panel(1.0);
    for (int p = 1; p < kPanels; ++p) {
      double s = 0.0;
      for (int k = 0; k < kOrder; ++k) {
        const double v = t_->node(p, k);
        s += 0.5 * t_->w[static_cast<std::size_t>(k)] * std::pow(v, e_) * t_->values[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)];
      }
      prefix_[static_cast<std::size_t>(p) + 1] = prefix_[static_cast<std::size_t>(p)] + s;
    }
  }

  double operator()(double xi) const {
    if (xi >= kCutoff) return prefix_.back();
    if (xi <= 1.0) return first_panel(xi);
    const int p = static_cast<int>(xi);
    // Partial panel [p, xi] by Gauss-Legendre on interpolated values.
    const double a = p, half = 0.5 * (xi - a);
    double s = 0.0;
    for (std::size_t k = 0; k < kOrder; ++k) {
      const double v = a + half * (t_->x[k] + 1.0);
      s += t_->w[k] * std::pow(v, e_) * t_->interpolate(v);
    }
    return prefix_[static_cast<std::size_t>(p)] + half * s;
  }

  double total() const { return prefix_.back(); }

 private:
  // v^e may be non-smooth at 0; tanh-sinh absorbs the endpoint.
  double first_panel(double xi) const {
    if (xi <= 0.0) return 0.0;
    thread_local boost::math::quadrature::tanh_sinh<double> ts;
    const auto* t = t_.get();
    const double e = e_;
    return ts.integrate([t, e](double v) { return std::pow(v, e) * t->interpolate(v); }, 0.0, xi);
  }

  std::shared_ptr<const KhatTable> t_;
  double e_;
  std::vector<double> prefix_;
};

std::vector<double> symbol_values(std::span<const double> xi, const SeedCovariance& seed, double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("symbol: alpha must be nonnegative");
  const int d = seed.dimension();
  const auto table = khat_table(seed);
  const MomentIntegrator moment(table, d - 1 + alpha);
  std::vector<double> out;
  out.reserve(xi.size());
  for (double x : xi) {
    x = std::abs(x);
    if (x == 0.0) {
      out.push_back(table->at_zero / (d + alpha));
      continue;
    }
    out.push_back(moment(x) * std::pow(x, -(d + alpha)));
  }
  return out;
}

// h^d f(|x_i - x_j|) for a uniform grid, evaluating f once per index offset.
// `diagonal` replaces f(0).
Eigen::MatrixXd toeplitz_matrix(const GridSpec& grid, const std::function<double(double)>& f, double diagonal) {
  const std::size_t n = grid.points_per_axis, total = grid.total_points();
  const double h = grid.spacing(), w = grid.cell_volume();
  Eigen::MatrixXd m(total, total);
  if (grid.dimension == 1) {
    std::vector<double> lag(n);
    lag[0] = w * diagonal;
    for (std::size_t k = 1; k < n; ++k) lag[k] = w * f(h * static_cast<double>(k));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = lag[i > j ? i - j : j - i];
    return m;
  }
  std::vector<double> lag(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      lag[a * n + b] = (a == 0 && b == 0) ? w * diagonal : w * f(h * std::hypot(double(a), double(b)));
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = 0; j < total; ++j) {
      const std::size_t i0 = i / n, i1 = i % n, j0 = j / n, j1 = j % n;
      m(i, j) = lag[(i0 > j0 ? i0 - j0 : j0 - i0) * n + (i1 > j1 ? i1 - j1 : j1 - i1)];
    }
  return m;
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

double star_remainder_at_zero(const SeedCovariance& seed) {
  // lim_{r -> 0} star_cov(r) + log r = int_0^1 (k(v) - 1) / v dv; the
  // neglected piece near 0 is O(r^2).
  const double r = 1e-9;
  return star_cov(r, seed) + std::log(r);
}

}  // namespace

std::vector<double> symbol_K_hat(std::span<const double> xi, const SeedCovariance& seed) {
  return symbol_values(xi, seed, 0.0);
}

std::vector<double> symbol_u_alpha(std::span<const double> xi, const SeedCovariance& seed, double alpha) {
  return symbol_values(xi, seed, alpha);
}

double symbol_u_alpha_direct(double xi, const SeedCovariance& seed, double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("symbol: alpha must be nonnegative");
  const double e = seed.dimension() + alpha;
  xi = std::abs(xi);
  const double top = std::max(0.0, std::log(std::max(xi, 1.0))) + 36.0 / e;
  auto f = [&](double u) { return std::exp(-e * u) * seed.fourier_profile(std::exp(-u) * xi); };
  // Split where the argument crosses the seed's main lobe.
  const double knee = std::clamp(std::log(std::max(xi, 1.0) / 20.0), 0.0, top);
  using boost::math::quadrature::gauss_kronrod;
  double s = gauss_kronrod<double, 61>::integrate(f, knee, top, 15, 1e-13);
  if (knee > 0.0) s += gauss_kronrod<double, 61>::integrate(f, 0.0, knee, 15, 1e-13);
  return s;
}

SymbolTable symbol_table(std::span<const double> xi, const SeedCovariance& seed, double alpha) {
  SymbolTable t;
  t.dimension = seed.dimension();
  t.alpha = alpha;
  t.xi.assign(xi.begin(), xi.end());
  t.k_hat = symbol_K_hat(xi, seed);
  t.u_alpha_hat = symbol_u_alpha(xi, seed, alpha);
  t.k_alpha_hat.resize(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) t.k_alpha_hat[i] = t.k_hat[i] - t.u_alpha_hat[i];
  return t;
}

Bracket fit_bracket(std::span<const double> xi, std::span<const double> values, double exponent) {
  if (xi.size() != values.size() || xi.empty()) throw std::invalid_argument("fit_bracket: size mismatch");
  Bracket b{INFINITY, -INFINITY};
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const double r = values[i] * std::pow(1.0 + xi[i] * xi[i], 0.5 * exponent);
    b.c_low = std::min(b.c_low, r);
    b.c_high = std::max(b.c_high, r);
  }
  return b;
}

double monotone_from(std::span<const double> xi, std::span<const double> values) {
  if (xi.size() != values.size() || xi.empty()) throw std::invalid_argument("monotone_from: size mismatch");
  std::size_t start = values.size() - 1;
  while (start > 0 && values[start - 1] >= values[start]) --start;
  return xi[start];
}

double star_kernel_from_symbol(double r, const SeedCovariance& seed) {
  if (seed.dimension() != 1) throw std::invalid_argument("star_kernel_from_symbol: d = 1 only");
  r = std::abs(r);
  if (!(r > 0.0)) throw NumericError("star_kernel_from_symbol: singular at r = 0");
  const auto table = khat_table(seed);
  const MomentIntegrator moment(table, 0.0);
  // Remainder K-hat(xi) - pi (1 - e^{-xi}) / xi on unit panels; beyond the
  // cutoff it is (total - pi) / xi, a rounding-level term.
  auto residual = [&](double xi) {
    const double model = kPi * (xi < 1e-8 ? 1.0 - 0.5 * xi : -std::expm1(-xi) / xi);
    return moment(xi) / xi - model;
  };
  double s = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    for (std::size_t k = 0; k < kOrder; ++k) {
      const double xi = table->node(p, static_cast<int>(k));
      s += 0.5 * table->w[k] * residual(xi) * std::cos(xi * r);
    }
  }
  return -std::log(r) + 0.5 * std::log1p(r * r) + s / kPi;
}

// ---------------------------------------------------------------------------

double smoothstep(double t, int order) {
  if (order < 1 || order % 2 == 0) throw std::invalid_argument("smoothstep: order must be odd and positive");
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const int n = (order - 1) / 2;
  auto binom = [](int a, int b) {
    double c = 1.0;
    for (int i = 1; i <= b; ++i) c = c * (a - b + i) / i;
    return c;
  };
  double s = 0.0;
  for (int k = 0; k <= n; ++k) s += binom(n + k, k) * binom(2 * n + 1, n - k) * std::pow(-t, k);
  return std::pow(t, n + 1) * s;
}

PartitionPair partition_of_unity(const Box& v, const Box& w, const GridSpec& grid, int order) {
  if (!(w.lo < v.lo && v.lo < v.hi && v.hi < w.hi))
    throw std::invalid_argument("partition_of_unity: V must lie compactly inside W");
  auto axis = [&](double x) {
    if (x <= w.lo || x >= w.hi) return 0.0;
    if (x < v.lo) return smoothstep((x - w.lo) / (v.lo - w.lo), order);
    if (x > v.hi) return smoothstep((w.hi - x) / (w.hi - v.hi), order);
    return 1.0;
  };
  PartitionPair p;
  p.grid = grid;
  const std::size_t n = grid.total_points();
  p.u.resize(n);
  p.a.resize(n);
  p.b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point x = grid.coordinate(i);
    double u = axis(x[0]);
    if (grid.dimension == 2) u *= axis(x[1]);
    const double norm = std::hypot(u, 1.0 - u);
    p.u[i] = u;
    p.a[i] = u / norm;
    p.b[i] = (1.0 - u) / norm;
  }
  return p;
}

GridSpec interval_grid(double lo, double hi, std::size_t points, int dimension) {
  if (!(hi > lo)) throw std::invalid_argument("interval_grid: need lo < hi");
  GridSpec g{dimension, points, hi - lo, lo};
  g.validate();
  g.origin = lo + 0.5 * g.spacing();
  return g;
}

OperatorMatrix star_kernel_matrix(const GridSpec& grid, const SeedCovariance& seed) {
  if (grid.dimension != seed.dimension()) throw std::invalid_argument("star_kernel_matrix: dimension mismatch");
  const double diag = log_cell_average(grid.spacing(), grid.dimension) + star_remainder_at_zero(seed);
  return {"star", grid, toeplitz_matrix(grid, [&](double r) { return star_cov(r, seed); }, diag)};
}

OperatorMatrix u_alpha_matrix(const GridSpec& grid, const SeedCovariance& seed, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("u_alpha_matrix: alpha must be positive");
  if (grid.dimension != seed.dimension()) throw std::invalid_argument("u_alpha_matrix: dimension mismatch");
  return {"star-minus-almost-star", grid,
          toeplitz_matrix(grid, [&](double r) { return star_minus_almost_star_cov(r, alpha, seed); }, 1.0 / alpha)};
}

std::string to_string(GTildeKind kind) {
  switch (kind) {
    case GTildeKind::None: return "none";
    case GTildeKind::Zero: return "zero";
    case GTildeKind::Bump: return "bump";
    case GTildeKind::CircleRemainder: return "circle-remainder";
  }
  return "?";
}

GTildeKind gtilde_from_string(const std::string& s) {
  for (auto k : {GTildeKind::None, GTildeKind::Zero, GTildeKind::Bump, GTildeKind::CircleRemainder})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown g-tilde kind '" + s + "'");
}

OperatorMatrix gtilde_matrix(GTildeKind kind, const GridSpec& grid, const SeedCovariance& seed, const Box& w,
                             const OperatorMatrix& cx, double bump_strength) {
  require_same_grid(grid, cx.grid, "gtilde_matrix");
  const std::size_t n = grid.total_points();
  const double vol = grid.cell_volume();
  OperatorMatrix g{to_string(kind), grid, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
  switch (kind) {
    case GTildeKind::None:
    case GTildeKind::Zero:
      return g;
    case GTildeKind::Bump: {
      const double centre = 0.5 * (w.lo + w.hi), half = 0.5 * (w.hi - w.lo);
      auto bump1 = [&](double x) {
        const double t = (x - centre) / half;
        return std::abs(t) >= 1.0 ? 0.0 : std::exp(-1.0 / (1.0 - t * t));
      };
      Eigen::VectorXd phi(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        const Point x = grid.coordinate(i);
        phi(static_cast<Eigen::Index>(i)) = bump1(x[0]) * (grid.dimension == 2 ? bump1(x[1]) : 1.0);
      }
      // C_X + c h^d phi phi^T stays positive iff c > -1 / (h^d phi^T C_X^{-1} phi).
      const Eigen::VectorXd y = cx.matrix.ldlt().solve(phi);
      const double limit = 1.0 / (vol * phi.dot(y));
      // -s s^T with s = sqrt(h^d |c|) phi is symmetric to the bit.
      const Eigen::VectorXd s = std::sqrt(vol * bump_strength * limit) * phi;
      g.matrix = -(s * s.transpose());
      g.kernel_id = "bump(" + std::to_string(bump_strength) + ")";
      return g;
    }
    case GTildeKind::CircleRemainder: {
      if (grid.dimension != 1) throw std::invalid_argument("circle remainder: d = 1 only");
      // -log|2 sin(pi r / 2)| - star_cov(r), with the r -> 0 limit -log pi - g_0.
      const double at_zero = -std::log(kPi) - star_remainder_at_zero(seed);
      g.matrix = toeplitz_matrix(
          grid, [&](double r) { return circle_cov(0.5 * r, 0.0) - star_cov(r, seed); }, at_zero);
      return g;
    }
  }
  return g;
}

OperatorMatrix assemble_R(const PartitionPair& pair, const OperatorMatrix& cx, const OperatorMatrix& gtilde) {
  require_same_grid(pair.grid, cx.grid, "assemble_R");
  require_same_grid(pair.grid, gtilde.grid, "assemble_R");
  const auto n = static_cast<Eigen::Index>(pair.grid.total_points());
  OperatorMatrix r{"R[" + gtilde.kernel_id + "]", pair.grid, Eigen::MatrixXd(n, n)};
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i <= j; ++i) {
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      const double aa = pair.a[ui] * pair.a[uj];
      const double v = (aa + pair.b[ui] * pair.b[uj] - 1.0) * cx.matrix(i, j) + aa * gtilde.matrix(i, j);
      r.matrix(i, j) = v;
      r.matrix(j, i) = v;
    }
  return r;
}

std::pair<double, double> min_eigenvalue_with_resolution(const OperatorMatrix& m) {
  if (m.matrix.rows() != m.matrix.cols() || !(m.matrix.isApprox(m.matrix.transpose(), 0.0)))
    throw std::logic_error("min_eigenvalue: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.matrix, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("min_eigenvalue: eigen-solve failed");
  const auto& ev = solver.eigenvalues();
  const double norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  return {ev(0), static_cast<double>(ev.size()) * std::numeric_limits<double>::epsilon() * norm};
}

double min_eigenvalue(const OperatorMatrix& m) { return min_eigenvalue_with_resolution(m).first; }

DecompositionScan min_eig_scan(const DecompositionScanOptions& options, const SeedCovariance& seed) {
  if (options.alphas.empty()) throw std::invalid_argument("min_eig_scan: empty alpha list");
  if (!std::is_sorted(options.alphas.begin(), options.alphas.end()) || !(options.alphas.front() > 0.0))
    throw std::invalid_argument("min_eig_scan: alphas must be positive and ascending");
  const GridSpec grid = interval_grid(options.domain.lo, options.domain.hi, options.points, options.dimension);
  const OperatorMatrix cx = star_kernel_matrix(grid, seed);
  OperatorMatrix r{"none", grid, Eigen::MatrixXd::Zero(cx.matrix.rows(), cx.matrix.cols())};
  if (options.gtilde != GTildeKind::None) {
    const PartitionPair pair = partition_of_unity(options.v, options.w, grid, options.smoothstep_order);
    const OperatorMatrix g = gtilde_matrix(options.gtilde, grid, seed, options.w, cx, options.bump_strength);
    r = assemble_R(pair, cx, g);
  }
  DecompositionScan scan;
  scan.kernel_id = r.kernel_id;
  scan.grid_points = grid.total_points();
  scan.base_min_eig = min_eigenvalue({"C_X + R", grid, cx.matrix + r.matrix});

  ChainPlan plan;
  plan.chains = static_cast<int>(options.alphas.size());
  auto parts = run_chains<ScanEntry>(plan, plan.chains, [&](RngStream& rng, std::int64_t) {
    std::size_t c = 0;
    while (stream_id(plan.part, c) != rng.stream_index()) ++c;
    const double alpha = options.alphas[c];
    const OperatorMatrix u = u_alpha_matrix(grid, seed, alpha);
    const auto [low, resolution] = min_eigenvalue_with_resolution({"U + R", grid, u.matrix + r.matrix});
    return ScanEntry{alpha, low, resolution};
  });
  scan.entries = std::move(parts);
  for (std::size_t i = 0; i < scan.entries.size(); ++i) {
    if (scan.entries[i].min_eig > scan.entries[i].resolution) scan.alpha_star = scan.entries[i].alpha;
    if (i > 0 && scan.entries[i].min_eig > scan.entries[i - 1].min_eig) scan.nonincreasing = false;
  }
  return scan;
}

void write_json(std::ostream& out, const DecompositionScan& scan) {
  nlohmann::ordered_json j;
  j["kernel-id"] = scan.kernel_id;
  j["grid-points"] = scan.grid_points;
  j["base-min-eig"] = scan.base_min_eig;
  j["alpha-star"] = scan.alpha_star;
  j["nonincreasing"] = scan.nonincreasing;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& e : scan.entries) {
    nlohmann::ordered_json row;
    row["alpha"] = e.alpha;
    row["min-eig"] = e.min_eig;
    row["resolution"] = e.resolution;
    row["grid-points"] = scan.grid_points;
    row["kernel-id"] = scan.kernel_id;
    rows.push_back(row);
  }
  j["scan"] = rows;
  out << j.dump(2) << '\n';
}

void write_csv(std::ostream& out, const SymbolTable& table) {
  out << "xi,K_hat,K_alpha_hat,u_alpha_hat\n";
  out.precision(17);
  for (std::size_t i = 0; i < table.xi.size(); ++i)
    out << table.xi[i] << ',' << table.k_hat[i] << ',' << table.k_alpha_hat[i] << ',' << table.u_alpha_hat[i] << '\n';
}

}  // namespace chaoslab
