// Acceptance suite: one PASS/FAIL line per criterion, detail lines indented.
// Usage: acceptance [criterion ...]   (default: all ten)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chaoslab/config.hpp"
#include "chaoslab/decomposition.hpp"
#include "chaoslab/experiments.hpp"
#include "chaoslab/field.hpp"
#include "chaoslab/harness.hpp"
#include "chaoslab/malliavin.hpp"
#include "chaoslab/moments.hpp"
#include "chaoslab/onsager.hpp"
#include "chaoslab/parallel.hpp"
#include "chaoslab/seed_covariance.hpp"

using namespace chaoslab;
namespace fs = std::filesystem;

namespace {

constexpr double kZ95 = 1.6448536269514722;  // one-sided 95%

template <class... Args>
void detail(const char* fmt, Args... args) {
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
  std::fflush(stdout);
}

struct Verdict {
  bool pass = true;
  std::string summary;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      summary += (summary.empty() ? "" : "; ") + ("failed: " + what);
    }
  }
};

CircleSynthesizer circle(int modes) { return CircleSynthesizer(modes, circle_grid(2 * static_cast<std::size_t>(modes))); }

std::vector<std::complex<double>> circle_masses(const CircleSynthesizer& synth, double beta, std::int64_t n,
                                                const ChainPlan& plan) {
  const auto f = TestFunction::constant(synth.grid(), 1.0);
  return sample_chaos_integrals([&synth](RngStream& r) { return synth.sample(r); }, f, beta, n, plan);
}

// ---------------------------------------------------------------------------

Verdict covariance_fidelity() {
  Verdict v;
  const auto c = circle_covariance_check(1024, 2048, 100000, ChainPlan{101, 1, 8}, 20);
  detail("circle, 1024 modes, %zu separations: max|z| = %.2f", c.rows.size(), c.max_abs_z());
  v.require(c.rows.size() == 20 && c.max_abs_z() <= 5.0, "circle |z| <= 5");

  LayeredNoiseParams p;
  const auto s1 = star_covariance_check(p, 1, 2048, 100000, ChainPlan{101, 2, 8}, 20);
  detail("layered star field d=1, 2048 points: max|z| = %.2f over %zu separations", s1.max_abs_z(), s1.rows.size());
  v.require(s1.rows.size() == 20 && s1.max_abs_z() <= 5.0, "star d=1 |z| <= 5");

  const auto s2 = star_covariance_check(p, 2, 128, 100000, ChainPlan{101, 3, 8}, 20);
  detail("layered star field d=2, 128^2 points: max|z| = %.2f over %zu separations", s2.max_abs_z(),
         s2.rows.size());
  v.require(s2.max_abs_z() <= 5.0, "star d=2 |z| <= 5");

  char buf[160];
  std::snprintf(buf, sizeof buf, "max|z| circle %.2f, star d=1 %.2f, star d=2 %.2f", c.max_abs_z(), s1.max_abs_z(),
                s2.max_abs_z());
  if (v.pass) v.summary = buf;
  return v;
}

Verdict fb_moments() {
  Verdict v;
  const double beta = 0.7;
  const auto synth = circle(4096);
  const auto m = circle_masses(synth, beta, 100000, ChainPlan{102, 1, 8});
  const auto second = moment_from_samples(m, 2, 0), abs_second = moment_from_samples(m, 1, 1);
  const double e2 = circle_second_moment(beta), ea2 = circle_abs_second_moment(beta);
  const double z2 = z_score(second, e2), za2 = z_score(abs_second, ea2);
  detail("E M^2   = %.5f%+.5fi +- %.5f, closed form %.6f, |z| = %.2f", second.value.real(), second.value.imag(),
         second.std_error, e2, z2);
  detail("E |M|^2 = %.5f +- %.5f, closed form %.6f, |z| = %.2f", abs_second.value.real(), abs_second.std_error, ea2,
         za2);
  v.require(z2 <= 3.0, "E M^2 within 3 SE");
  v.require(za2 <= 3.0, "E|M|^2 within 3 SE");

  const auto one = [](double) { return 1.0; };
  const auto oracle = CovarianceOracle::circle_exact();
  const double q2 = second_moment_quadrature(beta, one, oracle, MomentSign::Minus);
  const double qa2 = second_moment_quadrature(beta, one, oracle, MomentSign::Plus);
  detail("quadrature: |E M^2 - q| = %.2e, |E|M|^2 - q| = %.2e", std::abs(e2 - q2), std::abs(ea2 - qa2));
  v.require(std::abs(e2 - q2) <= 1e-6 && std::abs(ea2 - qa2) <= 1e-6, "quadrature agreement 1e-6");
  char buf[160];
  std::snprintf(buf, sizeof buf, "|z| %.2f and %.2f, quadrature gap %.1e", z2, za2, std::max(std::abs(e2 - q2), std::abs(ea2 - qa2)));
  if (v.pass) v.summary = buf;
  return v;
}

Verdict negative_moment() {
  Verdict v;
  const double ladder[] = {0.6, 0.8, 0.9, 0.95};
  const double continuation = std::abs(fb_moment(-1.0, -1.0));
  detail("|analytic continuation| at p = -1, beta -> 1: %.6f", continuation);
  double value[4], se[4];
  for (int i = 0; i < 4; ++i) {
    const auto r = mc_negative_moment(ladder[i], 1024, 2048, 100000, ChainPlan{103, static_cast<std::uint64_t>(i + 1), 8});
    value[i] = std::abs(r.inverse.value);
    se[i] = r.inverse.std_error;
    detail("beta %.2f: |E M^-1| = %.4f +- %.4f   (E|M|^-1 = %.4f +- %.4f)", ladder[i], value[i], se[i],
           r.inverse_modulus.value.real(), r.inverse_modulus.std_error);
    if (ladder[i] >= 0.9) v.require(value[i] + kZ95 * se[i] < continuation, "below pi/2 at 95%");
  }
  double min_z = INFINITY;
  for (int i = 0; i + 1 < 4; ++i) {
    const double z = (value[i] - value[i + 1]) / std::hypot(se[i], se[i + 1]);
    min_z = std::min(min_z, z);
    detail("step %.2f -> %.2f: decrease z = %.2f", ladder[i], ladder[i + 1], z);
  }
  v.require(min_z > kZ95, "strict decrease at 95%");
  char buf[160];
  std::snprintf(buf, sizeof buf, "smallest decrease z %.2f, beta 0.95 value %.3f < %.4f", min_z, value[3], continuation);
  if (v.pass) v.summary = buf;
  return v;
}

Verdict onsager() {
  Verdict v;
  OnsagerScanOptions opt;
  opt.n_max = 6;
  opt.calibration_trials = 10000;
  opt.validation_trials = 10000;
  std::vector<OnsagerReport> reports;
  {
    RngStream rng(104, stream_id(1, 0));
    reports.push_back(onsager_scan(CovarianceOracle::circle_exact(), opt, rng));
  }
  {
    RngStream rng(104, stream_id(2, 0));
    reports.push_back(smooth_onsager_scan(CovarianceOracle::circle_truncated(16), circle_truncated_variance(16), opt, rng));
  }
  {
    auto star_opt = opt;
    star_opt.n_max = 5;
    RngStream rng(104, stream_id(3, 0));
    const auto s = star_onsager_scan(LayeredNoiseParams{}, SeedCovariance::bump_self_convolution(1), star_opt, rng);
    reports.push_back(s.regularized);
    reports.push_back(s.tail);
  }
  for (const auto& r : reports) {
    detail("%-28s validation %d, violations %d, constant %.4f, worst margin %.3e", r.inequality_id.c_str(), r.trials,
           r.violations, r.fitted_constant, r.worst_margin);
    v.require(r.violations == 0 && r.trials >= 10000, r.inequality_id);
  }
  if (v.pass) v.summary = std::to_string(reports.size()) + " inequalities, 0 violations";
  return v;
}

Verdict min_distance() {
  Verdict v;
  const double b2 = 0.5;
  const auto pair = min_dist_integral_mc(2, std::sqrt(b2), 1, 1000000, ChainPlan{105, 1, 8});
  const double closed = min_dist_pair_closed_form(b2);
  const double z = z_score(pair, closed);
  detail("N=2, beta^2=1/2: %.5f +- %.5f vs 16 sqrt2/3 = %.5f, |z| = %.2f", pair.value.real(), pair.std_error, closed, z);
  v.require(z <= 3.0, "N=2 closed form within 3 SE");

  // Ratios between rungs against the profile (d - beta^2)^{-2} N^{N beta^2/2}; the
  // lower reference drops one power of (d - beta^2).
  const int n = 4;
  const std::vector<double> ladder{0.8, 0.9, 0.95, 0.975};
  std::vector<double> est, se;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const auto r = min_dist_integral_mc(n, std::sqrt(ladder[i]), 1, 400000, ChainPlan{105, i + 2, 8});
    est.push_back(r.value.real());
    se.push_back(r.std_error);
    detail("N=4, beta^2=%.3f: %.2f +- %.2f, times (1-beta^2)^2: %.3f", ladder[i], est[i], se[i],
           est[i] * std::pow(1.0 - ladder[i], 2));
  }
  for (std::size_t i = 0; i + 1 < ladder.size(); ++i) {
    const double ratio = est[i + 1] / est[i];
    const double ratio_se = ratio * std::hypot(se[i + 1] / est[i + 1], se[i] / est[i]);
    const double upper = min_dist_bound_profile(n, std::sqrt(ladder[i + 1]), 1) / min_dist_bound_profile(n, std::sqrt(ladder[i]), 1);
    const double lower = upper * (1.0 - ladder[i + 1]) / (1.0 - ladder[i]);
    const double exponent = std::log(ratio) / std::log((1.0 - ladder[i]) / (1.0 - ladder[i + 1]));
    detail("ratio %.3f -> %.3f: %.3f +- %.3f, profile %.3f, one power lower %.3f, local exponent %.3f", ladder[i],
           ladder[i + 1], ratio, ratio_se, upper, lower, exponent);
    v.require(ratio <= upper + 3.0 * ratio_se, "ratio above the profile");
    v.require(ratio >= lower - 3.0 * ratio_se, "ratio below the next power");
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "N=2 |z| %.2f; N=4 ratios between the profile and one power below", z);
  if (v.pass) v.summary = buf;
  return v;
}

Verdict malliavin_invariants() {
  Verdict v;
  const double beta = 0.7;
  const GridSpec grid = circle_grid(2048);
  const CircleSynthesizer synth(1024, grid);
  const auto& cov = *synth.covariance();
  const auto f = TestFunction::constant(grid, 1.0);
  double worst_det = INFINITY, worst_im = 0.0, worst_margin = INFINITY;
  const auto parts = run_chains<std::vector<double>>(ChainPlan{106, 1, 8}, 1000, [&](RngStream& rng, std::int64_t count) {
    std::vector<double> out;
    for (std::int64_t t = 0; t < count; ++t) {
      const auto chaos = renormalized_exponential(synth.sample(rng), {beta, 1});
      const auto s = malliavin_stats(chaos, f, cov);
      const ChargeFunction df = charge_of_DM(chaos, f), dfbar = charge_of_DMbar(chaos, f);
      // A random direction with its DF, DFbar components removed: the rhs of
      // the first bound vanishes there, so only det >= 0 keeps it true.
      ChargeFunction orth{grid, std::vector<std::complex<double>>(grid.total_points())};
      for (auto& x : orth.values) x = {rng.normal(), rng.normal()};
      const auto g11 = h_inner(df, df, cov), g12 = h_inner(dfbar, df, cov), g22 = h_inner(dfbar, dfbar, cov);
      const auto r1 = h_inner(orth, df, cov), r2 = h_inner(orth, dfbar, cov);
      const auto det = g11 * g22 - g12 * std::conj(g12);
      const auto a = (r1 * g22 - r2 * g12) / det, b = (r2 * g11 - r1 * std::conj(g12)) / det;
      for (std::size_t i = 0; i < orth.values.size(); ++i) orth.values[i] -= a * df.values[i] + b * dfbar.values[i];
      double margin = INFINITY;
      for (const ChargeFunction* h : {&df, &dfbar, static_cast<const ChargeFunction*>(&orth)}) {
        const auto m = projection_bound_check(chaos, f, cov, *h);
        margin = std::min<double>({margin, m.first, m.second});
      }
      out.push_back(s.det_gamma / std::pow(s.i1.real(), 2));
      out.push_back(std::abs(s.i1.imag()) / s.i1.real());
      out.push_back(margin);
    }
    return out;
  });
  std::int64_t n = 0;
  for (const auto& p : parts)
    for (std::size_t i = 0; i < p.size(); i += 3, ++n) {
      worst_det = std::min(worst_det, p[i]);
      worst_im = std::max(worst_im, p[i + 1]);
      worst_margin = std::min(worst_margin, p[i + 2]);
    }
  detail("%lld realizations: min det/(Re I1)^2 = %.3e, max |Im I1|/Re I1 = %.2e, min projection margin = %.3e",
         static_cast<long long>(n), worst_det, worst_im, worst_margin);
  v.require(n == 1000, "1000 realizations");
  v.require(worst_det >= -1e-9, "det gamma >= -1e-9 (Re I1)^2");
  v.require(worst_im <= 1e-6, "Im I1 / Re I1 <= 1e-6");
  v.require(worst_margin >= -1e-9, "projection margins >= -1e-9");
  char buf[160];
  std::snprintf(buf, sizeof buf, "min det ratio %.2e, max Im/Re %.1e, min margin %.2e", worst_det, worst_im, worst_margin);
  if (v.pass) v.summary = buf;
  return v;
}

Verdict smallball() {
  Verdict v;
  const double beta = 0.7;
  const auto synth = circle(1024);
  const auto f = TestFunction::constant(synth.grid(), 1.0);
  const FieldSource source = [&synth](RngStream& r) { return synth.sample(r); };
  std::string summary;
  for (auto q : {SmallBallQuantity::DetGamma, SmallBallQuantity::SobolevNorm}) {
    auto values = sample_smallball_quantity(q, beta, f, source, 100000, ChainPlan{107, q == SmallBallQuantity::DetGamma ? 1u : 2u, 8});
    std::sort(values.begin(), values.end());
    const auto p = smallball_slopes(values);
    std::string line;
    bool increasing = p.decades >= 3;
    for (int k = 0; k < p.decades; ++k) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " P=%.0e: %.3f", p.level[k], p.slope[k]);
      line += buf;
      if (k > 0 && !(p.slope[k] > p.slope[k - 1])) increasing = false;
    }
    detail("%s: %d decades, slopes%s", to_string(q).c_str(), p.decades, line.c_str());
    v.require(p.decades >= 3, to_string(q) + " observes 3 decades");
    v.require(increasing, to_string(q) + " slopes increase toward small eps");
    summary += (summary.empty() ? "" : ", ") + to_string(q) + " " + std::to_string(p.decades) + " decades";
  }
  if (v.pass) v.summary = summary + ", slopes increasing";
  return v;
}

Verdict density() {
  Verdict v;
  const double ladder[] = {0.8, 0.9, 0.95};
  const int bins = 32;
  const double range = 3.0;
  double peak[2][3];
  for (int r = 0; r < 2; ++r) {
    const int modes = r == 0 ? 1024 : 2048;
    const auto synth = circle(modes);
    for (int i = 0; i < 3; ++i) {
      const auto m = circle_masses(synth, ladder[i], 100000, ChainPlan{108, static_cast<std::uint64_t>(i + 1), 8});
      peak[r][i] = histogram2d(m, range, bins).peak_density();
    }
    detail("%d modes, %zu points, %d^2 bins on [-3,3]^2: peaks %.4f %.4f %.4f", modes, synth.grid().points_per_axis,
           bins, peak[r][0], peak[r][1], peak[r][2]);
    v.require(peak[r][0] > peak[r][1] && peak[r][1] > peak[r][2], "peaks strictly decreasing");
  }
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(peak[1][i] / peak[0][i] - 1.0));
  detail("largest relative change under doubling: %.3f", worst);
  v.require(worst <= 0.10, "stable within 10% under doubling");
  char buf[160];
  std::snprintf(buf, sizeof buf, "peaks %.3f > %.3f > %.3f, doubling changes at most %.1f%%", peak[0][0], peak[0][1],
                peak[0][2], 100.0 * worst);
  if (v.pass) v.summary = buf;
  return v;
}

Verdict decomposition() {
  Verdict v;
  const auto seed = SeedCovariance::bump_self_convolution(1);
  DecompositionScanOptions o;
  o.points = 1024;
  std::string summary;
  for (auto kind : {GTildeKind::None, GTildeKind::Zero, GTildeKind::Bump, GTildeKind::CircleRemainder}) {
    o.gtilde = kind;
    const auto scan = min_eig_scan(o, seed);
    std::string eigs;
    for (const auto& e : scan.entries) {
      char buf[32];
      std::snprintf(buf, sizeof buf, " %.2e", e.min_eig);
      eigs += buf;
    }
    detail("%-16s alpha* %.2f, nonincreasing %s, min eig:%s", to_string(kind).c_str(), scan.alpha_star,
           scan.nonincreasing ? "yes" : "no", eigs.c_str());
    if (kind == GTildeKind::None) {
      bool positive = true;
      for (const auto& e : scan.entries) positive = positive && e.min_eig > e.resolution;
      v.require(positive, "U_alpha positive for every alpha");
    } else {
      v.require(scan.alpha_star > 0.0, to_string(kind) + " alpha* > 0");
      char buf[48];
      std::snprintf(buf, sizeof buf, "%s%s %.2f", summary.empty() ? "" : ", ", to_string(kind).c_str(), scan.alpha_star);
      summary += buf;
    }
    v.require(scan.nonincreasing, to_string(kind) + " nonincreasing");
  }

  std::vector<double> xi;
  for (int i = 0; i <= 60; ++i) xi.push_back(std::pow(10.0, -2.0 + 0.1 * i));
  double lo_min = INFINITY, lo_max = 0.0, hi_min = INFINITY, hi_max = 0.0;
  for (double a : {0.1, 0.3, 1.0}) {
    const auto b = fit_bracket(xi, symbol_u_alpha(xi, seed, a), 1.0 + a);
    detail("u-hat alpha %.1f: %.3f <= u-hat (1+xi^2)^{(1+alpha)/2} <= %.3f", a, b.c_low, b.c_high);
    lo_min = std::min(lo_min, b.c_low);
    lo_max = std::max(lo_max, b.c_low);
    hi_min = std::min(hi_min, b.c_high);
    hi_max = std::max(hi_max, b.c_high);
  }
  const double drift = std::max(lo_max / lo_min, hi_max / hi_min);
  detail("bracket drift across alpha: %.3f", drift);
  v.require(drift < 4.0, "bracket drift < 4");
  char buf[64];
  std::snprintf(buf, sizeof buf, "; bracket drift %.2f", drift);
  if (v.pass) v.summary = "alpha* " + summary + buf;
  return v;
}

// ---------------------------------------------------------------------------

std::map<std::string, std::string> artifact_bytes(const RunArtifact& a) {
  std::map<std::string, std::string> out;
  for (const auto& p : a.data_files) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[p.filename().string()] = s.str();
  }
  return out;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

Verdict reproducibility(const fs::path& root) {
  Verdict v;
  const std::vector<std::string> configs{
      "kind = fb-moments\nbeta-ladder = 0.5, 0.7\nn-modes = 512\nmc-samples = 5000\n",
      "kind = negative-moment\nbeta = 0.8\nn-modes = 256\nmc-samples = 5000\n",
      "kind = field-validate\nfield = star\nbeta = 0.5\ngrid-points = 512\nmc-samples = 2000\n",
      "kind = onsager\ntrials = 1000\nn-max = 4\n",
      "kind = min-dist-integral\nbeta = 0.8\nn-points = 3\nmc-samples = 20000\n",
      "kind = malliavin-smallball\nbeta = 0.7\nn-modes = 256\ngrid-points = 512\nmc-samples = 5000\n",
      "kind = sobolev-smallball\nbeta = 0.7\nn-modes = 256\ngrid-points = 512\nmc-samples = 5000\n",
      "kind = density\nbeta-ladder = 0.8, 0.9\nn-modes = 256\ngrid-points = 512\nmc-samples = 5000\nbins = 16\n",
      "kind = decomposition-scan\ngrid-points = 256\ngtilde = bump\n",
  };
  int identical = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    auto c = ExperimentConfig::parse_string("experiment-id = repro" + std::to_string(i) + "\nmaster-seed = 110\n" + configs[i]);
    c.output_dir = root / ("repro" + std::to_string(i) + "_a");
    const auto a = artifact_bytes(run(c));
    c.output_dir = root / ("repro" + std::to_string(i) + "_b");
    const auto b = artifact_bytes(run(c));
    const bool same = !a.empty() && a == b;
    identical += same;
    if (!same) detail("%s: data files differ between reruns", to_string(c.kind).c_str());
    v.require(same, to_string(c.kind) + " bit-identical");
  }
  detail("%d of %zu experiment kinds rerun bit-identically", identical, configs.size());

  // Chain-count invariance of the moment estimates.
  std::vector<std::vector<std::vector<std::string>>> tables;
  for (int chains : {1, 8, 64}) {
    auto c = ExperimentConfig::parse_string("experiment-id = chains" + std::to_string(chains) +
                                            "\nkind = fb-moments\nbeta = 0.7\nn-modes = 1024\nmc-samples = 20000\n"
                                            "master-seed = 110\nchains = " + std::to_string(chains) + "\n");
    c.output_dir = root / ("chains" + std::to_string(chains));
    tables.push_back(csv_rows(artifact_bytes(run(c))["moments.csv"]));
  }
  const auto& header = tables[0][0];
  const auto col = [&](const char* name) { return std::find(header.begin(), header.end(), name) - header.begin(); };
  const auto re = col("estimate_re"), im = col("estimate_im"), se = col("std_error");
  double worst = 0.0;
  for (std::size_t r = 1; r < tables[0].size(); ++r)
    for (int k = 1; k < 3; ++k) {
      const std::complex<double> x(std::stod(tables[0][r][re]), std::stod(tables[0][r][im]));
      const std::complex<double> y(std::stod(tables[k][r][re]), std::stod(tables[k][r][im]));
      const double z = std::abs(x - y) / std::hypot(std::stod(tables[0][r][se]), std::stod(tables[k][r][se]));
      detail("%-10s chains 1 vs %2d: |difference| / SE = %.2f", tables[0][r][0].c_str(), k == 1 ? 8 : 64, z);
      worst = std::max(worst, z);
    }
  v.require(worst <= 3.0, "chain-count invariance within 3 SE");
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d/%zu kinds bit-identical, chain counts 1/8/64 agree to %.2f SE", identical,
                configs.size(), worst);
  if (v.pass) v.summary = buf;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = fs::temp_directory_path() / "chaoslab_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);

  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Verdict()> body;
  };
  const std::vector<Criterion> all{
      {1, "covariance fidelity", 300, covariance_fidelity},
      {2, "integer moments", 600, fb_moments},
      {3, "negative moment decay", 900, negative_moment},
      {4, "Onsager suites", 300, onsager},
      {5, "min-distance integral", 600, min_distance},
      {6, "Malliavin invariants", 600, malliavin_invariants},
      {7, "small-ball signature", 1800, smallball},
      {8, "density decay", 900, density},
      {9, "decomposition positivity", 600, decomposition},
      {10, "reproducibility", 600, [&] { return reproducibility(root); }},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  std::printf("chaoslab %s acceptance, %zu worker thread(s)\n", code_version().c_str(), worker_count());
  int failed = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v.pass = false;
      v.summary = std::string("exception: ") + e.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt > c.budget_s) v.require(false, "runtime budget");
    std::printf("%s  criterion %2d  %-26s %7.1f s / %4.0f s  %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, dt,
                c.budget_s, v.summary.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  fs::remove_all(root);
  return failed == 0 ? 0 : 1;
}
