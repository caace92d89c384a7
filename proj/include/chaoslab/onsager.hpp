#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "chaoslab/covariance.hpp"
#include "chaoslab/moments.hpp"

namespace chaoslab {

struct OnsagerReport {
  std::string inequality_id;
  int trials = 0;       // validation configurations
  int violations = 0;
  double fitted_constant = 0.0;
  // max over validation configurations of lhs - (bound + tolerance); <= 0 iff no violations.
  double worst_margin = 0.0;
  int calibration_trials = 0;
};

// Generic calibrate-then-validate scan of E(x; y) <= base(x, y) + C w(N).
// With a fixed constant the calibration batch is skipped.
struct OnsagerProblem {
  std::string id;
  std::function<EnergyConfig(RngStream&)> sample;
  std::function<double(const EnergyConfig&)> lhs;
  std::function<double(const EnergyConfig&)> base_bound;
  std::function<double(int n)> constant_weight;  // null: no constant
  std::function<void(EnergyConfig&, RngStream&, double scale)> perturb;  // hill-climb move, optional
  bool fixed_constant = false;
  double constant = 0.0;
};

struct OnsagerScanOptions {
  int n_max = 6;
  int calibration_trials = 10000;
  int validation_trials = 10000;
  int refine_starts = 16;
  int refine_steps = 300;
  double tolerance = 1e-9;
};

OnsagerReport run_onsager_problem(const OnsagerProblem& problem, const OnsagerScanOptions& options, RngStream& rng);

// Nearest-neighbour distances d_j over the 2N points z = (x, y).
std::vector<double> nearest_distances(const EnergyConfig& cfg, const std::function<double(const Point&, const Point&)>& dist);

// E(Gamma; x; y) <= 1/2 sum log 1/d_j + C N^2 for a log-correlated oracle.
// Circle kernels use the chord distance 2|sin pi(t - s)| and points on [0, 1);
// Euclidean kernels use points in [0, extent)^d.
OnsagerReport onsager_scan(const CovarianceOracle& oracle, const OnsagerScanOptions& options, RngStream& rng,
                           int dimension = 1, double extent = 1.0);
// E(R; x; y) <= N M for a bounded kernel with sup variance M.
OnsagerReport smooth_onsager_scan(const CovarianceOracle& oracle, double sup_variance,
                                  const OnsagerScanOptions& options, RngStream& rng, int dimension = 1,
                                  double extent = 1.0);

struct StarOnsagerReports {
  OnsagerReport regularized;  // E(Y_eps) <= 1/2 sum log^+ 1/(d_j v eps)
  OnsagerReport tail;         // E(Yhat_eps(eps .)) <= 1/2 sum log^+ 1/d_j
};
// Points in [0, extent)^d; eps = params.delta.
StarOnsagerReports star_onsager_scan(const LayeredNoiseParams& params, const SeedCovariance& seed,
                                     const OnsagerScanOptions& options, RngStream& rng, double extent = 2.0);

// Monte Carlo for int_{B(0,1)^N} prod_i m_i^{-beta^2/2} |log m_i|^p dz with
// m_i = min_{j != i} |z_i - z_j|, by sequential importance sampling: each new
// point is uniform in the ball or a |v|^{-q}-distributed jump from an earlier
// point. The proposal density is exact, so the estimator is unbiased.
struct MinDistOptions {
  double log_power = 0.0;
  bool cap_at_one = false;     // use min(m_i, 1)
  double distance_floor = 0.0; // use max(m_i, floor)
  double proposal_exponent = -1.0;  // q; negative means beta^2
  double uniform_weight = 0.3;
};
MomentResult min_dist_integral_mc(int n_points, double beta, int dimension, std::int64_t n_samples,
                                  const ChainPlan& plan, const MinDistOptions& options = {});
// int int_{[-1, 1]^2} |x - y|^{-a} dx dy
double min_dist_pair_closed_form(double a);
// (d - beta^2)^{-floor(N/2)} N^{N beta^2 / 2d}
double min_dist_bound_profile(int n_points, double beta, int dimension);

void write_json(std::ostream& out, const OnsagerReport& report);

}  // namespace chaoslab
