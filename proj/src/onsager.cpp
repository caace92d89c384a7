#include "chaoslab/onsager.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace chaoslab {

namespace {

constexpr double kPi = std::numbers::pi;

double chord(const Point& a, const Point& b) { return 2.0 * std::abs(std::sin(kPi * (a[0] - b[0]))); }

double euclid(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

double log_plus_inverse(double r) { return r >= 1.0 ? 0.0 : -std::log(r); }

// Mixture of uniform and clustered configurations in [0, extent)^d, N x's and N y's.
EnergyConfig random_config(RngStream& rng, int n_max, int dimension, double extent) {
  const int n = 1 + static_cast<int>(rng.uniform() * n_max);
  EnergyConfig cfg;
  std::vector<Point> pts(static_cast<std::size_t>(2 * n));
  auto uniform_point = [&] {
    Point p{extent * rng.uniform(), 0.0};
    if (dimension == 2) p[1] = extent * rng.uniform();
    return p;
  };
  if (rng.uniform() < 0.5) {
    for (auto& p : pts) p = uniform_point();
  } else {
    const int clusters = 1 + static_cast<int>(rng.uniform() * 2 * n);
    std::vector<Point> centers(static_cast<std::size_t>(clusters));
    for (auto& c : centers) c = uniform_point();
    for (auto& p : pts) {
      const Point& c = centers[static_cast<std::size_t>(rng.uniform() * clusters)];
      const double spread = extent * std::pow(10.0, -1.0 - 4.0 * rng.uniform());
      for (int a = 0; a < dimension; ++a) {
        const auto ax = static_cast<std::size_t>(a);
        double v = std::fmod(c[ax] + spread * rng.normal(), extent);
        p[ax] = v < 0.0 ? v + extent : v;
      }
    }
  }
  cfg.x.assign(pts.begin(), pts.begin() + n);
  cfg.y.assign(pts.begin() + n, pts.end());
  return cfg;
}

std::function<void(EnergyConfig&, RngStream&, double)> wrapping_perturb(int dimension, double extent) {
  return [dimension, extent](EnergyConfig& cfg, RngStream& rng, double scale) {
    auto move = [&](Point& p) {
      for (int a = 0; a < dimension; ++a) {
        const auto ax = static_cast<std::size_t>(a);
        double v = std::fmod(p[ax] + scale * extent * rng.normal(), extent);
        p[ax] = v < 0.0 ? v + extent : v;
      }
    };
    const std::size_t total = cfg.x.size() + cfg.y.size();
    const auto k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(total));
    move(k < cfg.x.size() ? cfg.x[k] : cfg.y[k - cfg.x.size()]);
  };
}

double sum_half_log(const std::vector<double>& d, double floor) {
  double s = 0.0;
  for (double v : d) s += log_plus_inverse(std::max(v, floor));
  return 0.5 * s;
}

}  // namespace

std::vector<double> nearest_distances(const EnergyConfig& cfg,
                                      const std::function<double(const Point&, const Point&)>& dist) {
  std::vector<Point> z(cfg.x);
  z.insert(z.end(), cfg.y.begin(), cfg.y.end());
  std::vector<double> d(z.size(), INFINITY);
  for (std::size_t j = 0; j < z.size(); ++j)
    for (std::size_t k = 0; k < j; ++k) {
      const double r = dist(z[j], z[k]);
      d[j] = std::min(d[j], r);
      d[k] = std::min(d[k], r);
    }
  return d;
}

OnsagerReport run_onsager_problem(const OnsagerProblem& problem, const OnsagerScanOptions& options, RngStream& rng) {
  OnsagerReport report;
  report.inequality_id = problem.id;
  const auto n_of = [](const EnergyConfig& cfg) { return static_cast<int>(cfg.x.size()); };
  double constant = problem.constant;
  if (!problem.fixed_constant) {
    auto ratio = [&](const EnergyConfig& cfg) {
      return (problem.lhs(cfg) - problem.base_bound(cfg)) / problem.constant_weight(n_of(cfg));
    };
    std::vector<std::pair<double, EnergyConfig>> best;
    double sup = -INFINITY;
    for (int t = 0; t < options.calibration_trials; ++t) {
      EnergyConfig cfg = problem.sample(rng);
      const double r = ratio(cfg);
      sup = std::max(sup, r);
      best.emplace_back(r, std::move(cfg));
      if (best.size() > static_cast<std::size_t>(4 * options.refine_starts)) {
        std::partial_sort(best.begin(), best.begin() + options.refine_starts, best.end(),
                          [](const auto& a, const auto& b) { return a.first > b.first; });
        best.resize(static_cast<std::size_t>(options.refine_starts));
      }
    }
    report.calibration_trials = options.calibration_trials;
    if (problem.perturb) {
      std::sort(best.begin(), best.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      if (best.size() > static_cast<std::size_t>(options.refine_starts)) best.resize(static_cast<std::size_t>(options.refine_starts));
      for (auto& [r, cfg] : best) {
        for (int s = 0; s < options.refine_steps; ++s) {
          const double scale = 0.1 * std::pow(1e-4, static_cast<double>(s) / options.refine_steps);
          EnergyConfig trial = cfg;
          problem.perturb(trial, rng, scale);
          const double rt = ratio(trial);
          if (std::isfinite(rt) && rt > r) {
            r = rt;
            cfg = std::move(trial);
          }
        }
        sup = std::max(sup, r);
        report.calibration_trials += options.refine_steps;
      }
    }
    constant = std::max(sup, 0.0);
  }
  report.fitted_constant = constant;
  report.trials = options.validation_trials;
  report.worst_margin = -INFINITY;
  for (int t = 0; t < options.validation_trials; ++t) {
    const EnergyConfig cfg = problem.sample(rng);
    const double slack = problem.constant_weight ? constant * problem.constant_weight(n_of(cfg)) : 0.0;
    const double margin = problem.lhs(cfg) - (problem.base_bound(cfg) + slack + options.tolerance);
    report.worst_margin = std::max(report.worst_margin, margin);
    if (margin > 0.0) ++report.violations;
  }
  return report;
}

OnsagerReport onsager_scan(const CovarianceOracle& oracle, const OnsagerScanOptions& options, RngStream& rng,
                           int dimension, double extent) {
  const bool circle = oracle.metric() == CovarianceOracle::Metric::CircleArc;
  if (circle) {
    dimension = 1;
    extent = 1.0;
  }
  const std::function<double(const Point&, const Point&)> dist = circle ? chord : euclid;
  OnsagerProblem p;
  p.id = "onsager-log:" + oracle.id();
  p.sample = [=](RngStream& r) { return random_config(r, options.n_max, dimension, extent); };
  p.lhs = [&oracle](const EnergyConfig& cfg) { return energy(oracle, cfg); };
  p.base_bound = [dist](const EnergyConfig& cfg) {
    double s = 0.0;
    for (double d : nearest_distances(cfg, dist)) s -= std::log(d);
    return 0.5 * s;
  };
  p.constant_weight = [](int n) { return static_cast<double>(n) * n; };
  p.perturb = wrapping_perturb(dimension, extent);
  return run_onsager_problem(p, options, rng);
}

OnsagerReport smooth_onsager_scan(const CovarianceOracle& oracle, double sup_variance,
                                  const OnsagerScanOptions& options, RngStream& rng, int dimension, double extent) {
  if (oracle.metric() == CovarianceOracle::Metric::CircleArc) {
    dimension = 1;
    extent = 1.0;
  }
  OnsagerProblem p;
  p.id = "onsager-smooth:" + oracle.id();
  p.sample = [=](RngStream& r) { return random_config(r, options.n_max, dimension, extent); };
  p.lhs = [&oracle](const EnergyConfig& cfg) { return energy(oracle, cfg); };
  p.base_bound = [](const EnergyConfig&) { return 0.0; };
  p.constant_weight = [](int n) { return static_cast<double>(n); };
  p.fixed_constant = true;
  p.constant = sup_variance;
  return run_onsager_problem(p, options, rng);
}

StarOnsagerReports star_onsager_scan(const LayeredNoiseParams& params, const SeedCovariance& seed,
                                     const OnsagerScanOptions& options, RngStream& rng, double extent) {
  params.validate();
  const int dimension = seed.dimension();
  const double eps = params.delta;
  const auto sample = [=](RngStream& r) { return random_config(r, options.n_max, dimension, extent); };
  StarOnsagerReports out;

  OnsagerProblem reg;
  reg.id = "onsager-star-regularized";
  reg.sample = sample;
  reg.lhs = [&](const EnergyConfig& cfg) {
    return energy([&](const Point& a, const Point& b) { return cov_Y_delta(euclid(a, b), params, seed); }, cfg);
  };
  reg.base_bound = [eps](const EnergyConfig& cfg) { return sum_half_log(nearest_distances(cfg, euclid), eps); };
  reg.fixed_constant = true;
  out.regularized = run_onsager_problem(reg, options, rng);

  OnsagerProblem tail;
  tail.id = "onsager-star-tail";
  tail.sample = sample;
  tail.lhs = [&](const EnergyConfig& cfg) {
    return energy([&](const Point& a, const Point& b) { return cov_tail_rescaled(euclid(a, b), params, seed); }, cfg);
  };
  tail.base_bound = [](const EnergyConfig& cfg) { return sum_half_log(nearest_distances(cfg, euclid), 0.0); };
  tail.fixed_constant = true;
  out.tail = run_onsager_problem(tail, options, rng);
  return out;
}

// ---------------------------------------------------------------------------

double min_dist_pair_closed_form(double a) {
  if (!(a < 1.0)) throw std::invalid_argument("min_dist_pair_closed_form: need a < 1");
  return std::pow(2.0, 3.0 - a) / ((1.0 - a) * (2.0 - a));
}

double min_dist_bound_profile(int n_points, double beta, int dimension) {
  const double b2 = beta * beta;
  return std::pow(dimension - b2, -static_cast<double>(n_points / 2)) * std::pow(n_points, n_points * b2 / (2.0 * dimension));
}

MomentResult min_dist_integral_mc(int n_points, double beta, int dimension, std::int64_t n_samples,
                                  const ChainPlan& plan, const MinDistOptions& options) {
  if (n_points < 2 || n_points > 8) throw std::invalid_argument("min_dist_integral: need 2 <= N <= 8");
  if (dimension != 1 && dimension != 2) throw std::invalid_argument("min_dist_integral: dimension must be 1 or 2");
  const double b2 = beta * beta;
  if (!(beta >= 0.0) || !(b2 < dimension) ) throw std::invalid_argument("min_dist_integral: need beta^2 < d");
  const double q = options.proposal_exponent >= 0.0 ? options.proposal_exponent : b2;
  if (!(q < dimension)) throw std::invalid_argument("min_dist_integral: proposal exponent must be below d");
  const double w = options.uniform_weight;
  if (!(w > 0.0 && w <= 1.0)) throw std::invalid_argument("min_dist_integral: uniform weight must lie in (0, 1]");
  const double ball_volume = dimension == 1 ? 2.0 : kPi;
  const double sphere = dimension == 1 ? 2.0 : 2.0 * kPi;
  const double jump_norm = sphere * std::pow(2.0, dimension - q) / (dimension - q);
  const auto n = static_cast<std::size_t>(n_points);

  auto parts = run_chains<std::vector<std::complex<double>>>(plan, n_samples, [&](RngStream& rng, std::int64_t count) {
    std::vector<std::complex<double>> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<Point> z(n), offset(n);
    std::vector<int> parent(n), root(n);
    auto uniform_in_ball = [&] {
      if (dimension == 1) return Point{2.0 * rng.uniform() - 1.0, 0.0};
      const double r = std::sqrt(rng.uniform()), t = 2.0 * kPi * rng.uniform();
      return Point{r * std::cos(t), r * std::sin(t)};
    };
    // Jumps can be far below the spacing of doubles near z[j], so distances
    // inside one jump tree are summed from the offsets, not from positions.
    auto distance = [&](std::size_t a, std::size_t b) {
      if (root[a] != root[b]) return euclid(z[a], z[b]);
      Point va{0.0, 0.0}, vb{0.0, 0.0};
      int ia = static_cast<int>(a), ib = static_cast<int>(b);
      while (ia != ib) {
        if (ia > ib) {
          va[0] += offset[ia][0], va[1] += offset[ia][1];
          ia = parent[ia];
        } else {
          vb[0] += offset[ib][0], vb[1] += offset[ib][1];
          ib = parent[ib];
        }
      }
      return euclid(va, vb);
    };
    auto jump_density = [&](double r) { return r <= 2.0 && r > 0.0 ? std::pow(r, -q) / jump_norm : 0.0; };
    for (std::int64_t s = 0; s < count; ++s) {
      double log_density = 0.0;
      bool inside = true;
      z[0] = uniform_in_ball();
      parent[0] = -1, root[0] = 0;
      log_density -= std::log(ball_volume);
      for (std::size_t i = 1; i < n; ++i) {
        if (rng.uniform() < w) {
          z[i] = uniform_in_ball();
          parent[i] = -1, root[i] = static_cast<int>(i);
        } else {
          const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
          const double rho = 2.0 * std::pow(rng.uniform(), 1.0 / (dimension - q));
          if (dimension == 1) {
            offset[i] = {rng.uniform() < 0.5 ? -rho : rho, 0.0};
          } else {
            const double t = 2.0 * kPi * rng.uniform();
            offset[i] = {rho * std::cos(t), rho * std::sin(t)};
          }
          z[i] = {z[j][0] + offset[i][0], z[j][1] + offset[i][1]};
          parent[i] = static_cast<int>(j), root[i] = root[j];
        }
        const double norm2 = z[i][0] * z[i][0] + z[i][1] * z[i][1];
        const bool in_ball = norm2 <= 1.0;
        inside = inside && in_ball;
        double mix = 0.0;
        for (std::size_t j = 0; j < i; ++j) mix += jump_density(distance(i, j));
        const double density = w * (in_ball ? 1.0 / ball_volume : 0.0) + (1.0 - w) * mix / static_cast<double>(i);
        log_density += std::log(density);
      }
      if (!inside) {
        out.emplace_back(0.0);
        continue;
      }
      double log_integrand = 0.0;
      bool zero = false;
      for (std::size_t i = 0; i < n; ++i) {
        double m = INFINITY;
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) m = std::min(m, distance(i, j));
        if (options.cap_at_one) m = std::min(m, 1.0);
        m = std::max(m, options.distance_floor);
        log_integrand -= 0.5 * b2 * std::log(m);
        if (options.log_power > 0.0) {
          const double l = std::abs(std::log(m));
          if (l == 0.0) zero = true;
          else log_integrand += options.log_power * std::log(l);
        }
      }
      out.emplace_back(zero ? 0.0 : std::exp(log_integrand - log_density));
    }
    return out;
  });
  const auto samples = concat(std::move(parts));
  return summarize(samples);
}

void write_json(std::ostream& out, const OnsagerReport& report) {
  nlohmann::ordered_json j;
  j["inequality-id"] = report.inequality_id;
  j["trials"] = report.trials;
  j["violations"] = report.violations;
  j["fitted-C"] = report.fitted_constant;
  j["worst-margin"] = report.worst_margin;
  j["calibration-trials"] = report.calibration_trials;
  out << j.dump(2) << '\n';
}

}  // namespace chaoslab
