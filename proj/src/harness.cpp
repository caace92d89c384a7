#include "chaoslab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>

#include "chaoslab/decomposition.hpp"
#include "chaoslab/errors.hpp"
#include "chaoslab/experiments.hpp"
#include "chaoslab/malliavin.hpp"
#include "chaoslab/moments.hpp"
#include "chaoslab/onsager.hpp"
#include "chaoslab/plot.hpp"
#include "json.hpp"

#ifndef CHAOSLAB_VERSION
#define CHAOSLAB_VERSION "0.0.0"
#endif
#ifndef CHAOSLAB_REVISION
#define CHAOSLAB_REVISION "unknown"
#endif

namespace chaoslab {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string code_version() { return std::string(CHAOSLAB_VERSION) + "+" + CHAOSLAB_REVISION; }

namespace {

std::string format_beta(double b) {
  std::ostringstream o;
  o << b;
  return o.str();
}

// Collects the data files of one run; every file carries the seed.
class ArtifactWriter {
 public:
  ArtifactWriter(const ExperimentConfig& config, fs::path dir) : config_(config), dir_(std::move(dir)) {}

  template <class Body>
  void csv(const std::string& name, Body&& body) {
    std::ostringstream out;
    out << "# experiment-id=" << config_.experiment_id << " kind=" << to_string(config_.kind)
        << " master-seed=" << config_.master_seed << " chains=" << config_.chains << '\n';
    body(out);
    put(name, out.str());
  }

  void json(const std::string& name, ordered_json body) {
    ordered_json j;
    j["experiment-id"] = config_.experiment_id;
    j["kind"] = to_string(config_.kind);
    j["master-seed"] = config_.master_seed;
    j["chains"] = config_.chains;
    for (auto& [k, v] : body.items()) j[k] = v;
    put(name, j.dump(2) + "\n");
  }

  const std::vector<fs::path>& files() const { return files_; }

 private:
  void put(const std::string& name, const std::string& text) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw ConfigError("field 'output-dir': cannot write " + path.string());
    files_.push_back(path);
  }

  const ExperimentConfig& config_;
  fs::path dir_;
  std::vector<fs::path> files_;
};

ChainPlan plan_for(const ExperimentConfig& c, std::uint64_t part) {
  ChainPlan p;
  p.seed = c.master_seed;
  p.part = part;
  p.chains = c.chains;
  return p;
}

ordered_json parse_json_text(const std::function<void(std::ostream&)>& writer) {
  std::ostringstream out;
  writer(out);
  return ordered_json::parse(out.str());
}

void run_field_validate(const ExperimentConfig& c, ArtifactWriter& w) {
  CovarianceCheck check;
  if (c.field == "circle") {
    check = circle_covariance_check(c.n_modes, c.grid_points, c.mc_samples, plan_for(c, 1));
  } else {
    LayeredNoiseParams p;
    p.alpha = c.alpha;
    p.delta = c.delta;
    check = star_covariance_check(p, c.dimension, c.grid_points, c.mc_samples, plan_for(c, 1));
  }
  w.csv("covariance.csv", [&](std::ostream& o) { write_csv(o, check); });
}

void run_fb_moments(const ExperimentConfig& c, ArtifactWriter& w) {
  const CircleSynthesizer synth(c.n_modes, circle_grid(c.grid_points));
  const auto f = TestFunction::constant(synth.grid(), 1.0);
  const auto betas = c.betas();
  std::ostringstream rows, oracles;
  write_moment_csv_header(rows);
  oracles << "beta,quantity,closed_form,quadrature,abs_diff\n";
  oracles.precision(17);
  const auto circle = CovarianceOracle::circle_exact();
  const auto one = [](double) { return 1.0; };
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double b = betas[i];
    const auto m = sample_chaos_integrals([&synth](RngStream& r) { return synth.sample(r); }, f, b, c.mc_samples,
                                          plan_for(c, i + 1));
    const double second = circle_second_moment(b), abs_second = circle_abs_second_moment(b);
    write_moment_csv_row(rows, "mean", b, 1, 0, moment_from_samples(m, 1, 0), 1.0);
    write_moment_csv_row(rows, "second", b, 2, 0, moment_from_samples(m, 2, 0), second);
    write_moment_csv_row(rows, "abs-second", b, 1, 1, moment_from_samples(m, 1, 1), abs_second);
    const double q_minus = second_moment_quadrature(b, one, circle, MomentSign::Minus);
    const double q_plus = second_moment_quadrature(b, one, circle, MomentSign::Plus);
    oracles << b << ",second," << second << ',' << q_minus << ',' << std::abs(second - q_minus) << '\n';
    oracles << b << ",abs-second," << abs_second << ',' << q_plus << ',' << std::abs(abs_second - q_plus) << '\n';
  }
  w.csv("moments.csv", [&](std::ostream& o) { o << rows.str(); });
  w.csv("oracles.csv", [&](std::ostream& o) { o << oracles.str(); });
}

void run_negative_moment(const ExperimentConfig& c, ArtifactWriter& w) {
  const auto betas = c.betas();
  w.csv("negative_moments.csv", [&](std::ostream& o) {
    o << "beta,abs_mean_inverse,abs_mean_inverse_se,mean_inverse_re,mean_inverse_im,mean_inverse_modulus,"
         "mean_inverse_modulus_se,fb_continuation,n_samples\n";
    o.precision(17);
    for (std::size_t i = 0; i < betas.size(); ++i) {
      const double b = betas[i];
      const auto r = mc_negative_moment(b, c.n_modes, c.grid_points, c.mc_samples, plan_for(c, i + 1));
      const double fb = fb_moment(-b * b, -1.0).real();
      o << b << ',' << std::abs(r.inverse.value) << ',' << r.inverse.std_error << ',' << r.inverse.value.real() << ','
        << r.inverse.value.imag() << ',' << r.inverse_modulus.value.real() << ',' << r.inverse_modulus.std_error << ','
        << fb << ',' << r.inverse.n_samples << '\n';
    }
  });
}

void run_onsager(const ExperimentConfig& c, ArtifactWriter& w) {
  OnsagerScanOptions opt;
  opt.n_max = c.n_max;
  opt.calibration_trials = c.trials;
  opt.validation_trials = c.trials;
  auto reports = ordered_json::array();
  auto add = [&](const OnsagerReport& r) { reports.push_back(parse_json_text([&](std::ostream& o) { write_json(o, r); })); };
  if (c.dimension == 1) {
    RngStream rng(c.master_seed, stream_id(1, 0));
    add(onsager_scan(CovarianceOracle::circle_exact(), opt, rng));
    const int modes = 16;
    RngStream rng2(c.master_seed, stream_id(2, 0));
    add(smooth_onsager_scan(CovarianceOracle::circle_truncated(modes), circle_truncated_variance(modes), opt, rng2));
  }
  LayeredNoiseParams p;
  p.alpha = c.alpha;
  p.delta = c.delta;
  RngStream rng3(c.master_seed, stream_id(3, 0));
  const auto star = star_onsager_scan(p, SeedCovariance::bump_self_convolution(c.dimension), opt, rng3);
  add(star.regularized);
  add(star.tail);
  ordered_json body;
  body["reports"] = reports;
  w.json("onsager.json", body);
}

void run_min_dist(const ExperimentConfig& c, ArtifactWriter& w) {
  const auto betas = c.betas();
  w.csv("min_dist.csv", [&](std::ostream& o) {
    o << "n_points,dimension,beta,beta2,estimate,std_error,batch_std_error,profile,closed_form,z\n";
    o.precision(17);
    for (std::size_t i = 0; i < betas.size(); ++i) {
      const double b = betas[i];
      const auto r = min_dist_integral_mc(c.n_points, b, c.dimension, c.mc_samples, plan_for(c, i + 1));
      double closed = std::nan("");
      if (c.n_points == 2 && c.dimension == 1) closed = min_dist_pair_closed_form(b * b);
      const double z = std::isnan(closed) ? std::nan("") : z_score(r, closed);
      o << c.n_points << ',' << c.dimension << ',' << b << ',' << b * b << ',' << r.value.real() << ',' << r.std_error
        << ',' << r.batch_std_error << ',' << min_dist_bound_profile(c.n_points, b, c.dimension) << ',' << closed
        << ',' << z << '\n';
    }
  });
}

void run_smallball(const ExperimentConfig& c, ArtifactWriter& w, SmallBallQuantity q) {
  const CircleSynthesizer synth(c.n_modes, circle_grid(c.grid_points));
  const auto f = TestFunction::constant(synth.grid(), 1.0);
  const auto betas = c.betas();
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double b = betas[i];
    auto values = sample_smallball_quantity(q, b, f, [&synth](RngStream& r) { return synth.sample(r); }, c.mc_samples,
                                            plan_for(c, i + 1), c.sobolev_index);
    std::sort(values.begin(), values.end());
    double hi = c.eps_max.value_or(values.back());
    double lo = 0.0;
    if (c.eps_min) {
      lo = *c.eps_min;
    } else {
      const auto pos = std::upper_bound(values.begin(), values.end(), 0.0);
      lo = pos == values.end() ? hi * 1e-4 : std::min(*pos, hi * 1e-4);
    }
    if (!(hi > 0.0)) throw NumericError("small-ball: no positive samples");
    if (hi < 1e4 * lo) hi = 1e4 * lo;
    const auto eps = log_spaced(lo, hi, 61);
    const auto curve = smallball_from_samples(values, eps, b, to_string(q));
    const auto slopes = smallball_slopes(values);
    const std::string suffix = betas.size() > 1 ? "_beta" + format_beta(b) : "";
    w.csv("smallball" + suffix + ".csv", [&](std::ostream& o) { write_csv(o, curve); });
    w.csv("slopes" + suffix + ".csv", [&](std::ostream& o) {
      o << "level,log_eps,slope\n";
      o.precision(17);
      for (std::size_t k = 0; k < slopes.slope.size(); ++k)
        o << slopes.level[k] << ',' << slopes.log_eps[k] << ',' << slopes.slope[k] << '\n';
    });
  }
}

void run_density(const ExperimentConfig& c, ArtifactWriter& w) {
  const CircleSynthesizer synth(c.n_modes, circle_grid(c.grid_points));
  const auto f = TestFunction::constant(synth.grid(), 1.0);
  const auto betas = c.betas();
  std::ostringstream peaks;
  peaks << "beta,peak_density,n_samples,outside,bins,range\n";
  peaks.precision(17);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double b = betas[i];
    const auto m = sample_chaos_integrals([&synth](RngStream& r) { return synth.sample(r); }, f, b, c.mc_samples,
                                          plan_for(c, i + 1));
    const auto h = histogram2d(m, c.hist_range, c.bins);
    w.csv("hist_beta" + format_beta(b) + ".csv", [&](std::ostream& o) { write_csv(o, h); });
    peaks << b << ',' << h.peak_density() << ',' << h.n_samples << ',' << h.outside << ',' << h.bins << ','
          << h.range << '\n';
  }
  w.csv("peaks.csv", [&](std::ostream& o) { o << peaks.str(); });
}

void run_decomposition(const ExperimentConfig& c, ArtifactWriter& w) {
  const auto seed = SeedCovariance::bump_self_convolution(c.dimension);
  DecompositionScanOptions o;
  o.alphas = c.alphas;
  o.points = c.grid_points;
  o.dimension = c.dimension;
  o.gtilde = gtilde_from_string(c.gtilde);
  o.bump_strength = c.bump_strength;
  o.smoothstep_order = c.smoothstep_order;
  const auto scan = min_eig_scan(o, seed);
  w.json("scan.json", parse_json_text([&](std::ostream& out) { write_json(out, scan); }));
  std::vector<double> xi{0.0};
  for (int i = 0; i <= 60; ++i) xi.push_back(std::pow(10.0, -2.0 + 0.1 * i));
  const auto table = symbol_table(xi, seed, c.alpha);
  w.csv("symbols.csv", [&](std::ostream& out) { write_csv(out, table); });
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunArtifact run(const ExperimentConfig& config) {
  config.validate();
  RunArtifact art;
  art.dir = config.output_dir.empty() ? fs::path("runs") / config.experiment_id : config.output_dir;
  std::error_code ec;
  fs::create_directories(art.dir, ec);
  if (ec || !fs::is_directory(art.dir))
    throw ConfigError("field 'output-dir': cannot create " + art.dir.string() + (ec ? ": " + ec.message() : ""));

  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  ArtifactWriter w(config, art.dir);
  try {
    switch (config.kind) {
      case ExperimentKind::FieldValidate: run_field_validate(config, w); break;
      case ExperimentKind::FbMoments: run_fb_moments(config, w); break;
      case ExperimentKind::NegativeMoment: run_negative_moment(config, w); break;
      case ExperimentKind::Onsager: run_onsager(config, w); break;
      case ExperimentKind::MinDistIntegral: run_min_dist(config, w); break;
      case ExperimentKind::MalliavinSmallball: run_smallball(config, w, SmallBallQuantity::DetGamma); break;
      case ExperimentKind::SobolevSmallball: run_smallball(config, w, SmallBallQuantity::SobolevNorm); break;
      case ExperimentKind::Density: run_density(config, w); break;
      case ExperimentKind::DecompositionScan: run_decomposition(config, w); break;
    }
  } catch (const std::invalid_argument& e) {
    // Preconditions the config validator cannot see (e.g. kernel support vs grid).
    throw ConfigError(std::string("invalid parameters: ") + e.what());
  }
  art.data_files = w.files();
  art.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  art.plots = plot(art.dir, "all");

  ordered_json m;
  m["experiment-id"] = config.experiment_id;
  m["kind"] = to_string(config.kind);
  m["master-seed"] = config.master_seed;
  m["chains"] = config.chains;
  m["threads"] = worker_count();
  m["code-version"] = code_version();
  m["started-utc"] = started;
  m["wall-seconds"] = art.wall_seconds;
  ordered_json echo;
  std::istringstream lines(config.echo());
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find(" = ");
    echo[line.substr(0, eq)] = line.substr(eq + 3);
  }
  m["config"] = echo;
  auto files = ordered_json::array();
  for (const auto& f : art.data_files) files.push_back(f.filename().string());
  m["data-files"] = files;
  auto plots = ordered_json::array();
  for (const auto& f : art.plots) plots.push_back(f.filename().string());
  m["plots"] = plots;
  art.manifest = art.dir / "manifest.json";
  std::ofstream out(art.manifest);
  out << m.dump(2) << '\n';
  if (!out) throw ConfigError("field 'output-dir': cannot write " + art.manifest.string());
  return art;
}

}  // namespace chaoslab
