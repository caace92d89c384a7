#include "chaoslab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "chaoslab/field.hpp"
#include "chaoslab/moments.hpp"

namespace chaoslab {

void NeumaierSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    carry_ += (sum_ - t) + x;
  else
    carry_ += (x - t) + sum_;
  sum_ = t;
}

double CovarianceCheck::max_abs_z() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, std::abs(r.z));
  return m;
}

std::vector<std::size_t> log_spaced_lags(std::size_t max_lag, int count) {
  if (count < 1 || max_lag < static_cast<std::size_t>(count)) throw std::invalid_argument("log_spaced_lags: too few lags");
  std::vector<std::size_t> lags;
  const double top = std::log(static_cast<double>(max_lag));
  for (int j = 0; j < count; ++j) {
    auto k = static_cast<std::size_t>(std::llround(std::exp(top * j / std::max(count - 1, 1))));
    if (!lags.empty()) k = std::max(k, lags.back() + 1);
    lags.push_back(k);
  }
  // Crowding at the bottom can push the tail past max_lag; pull it back.
  for (int j = count - 1; j >= 0; --j) {
    const std::size_t cap = max_lag - static_cast<std::size_t>(count - 1 - j);
    lags[static_cast<std::size_t>(j)] = std::min(lags[static_cast<std::size_t>(j)], cap);
  }
  return lags;
}

namespace {

struct LagMoments {
  std::vector<NeumaierSum> sum, sum_sq;
};

// Fans the per-sample lag products over chains; `offset` maps a lag to the
// flat-index shift, the field is periodic with `total` points.
CovarianceCheck lag_check(const std::string& name, const FieldSource& source, const std::vector<std::size_t>& lags,
                          const std::vector<std::size_t>& offsets, const std::vector<double>& separations,
                          const std::vector<double>& oracle, std::int64_t n_samples, const ChainPlan& plan) {
  const std::size_t nl = lags.size();
  auto parts = run_chains<LagMoments>(plan, n_samples, [&](RngStream& rng, std::int64_t count) {
    LagMoments m{std::vector<NeumaierSum>(nl), std::vector<NeumaierSum>(nl)};
    for (std::int64_t s = 0; s < count; ++s) {
      const FieldSample x = source(rng);
      const std::size_t total = x.values.size();
      for (std::size_t l = 0; l < nl; ++l) {
        double acc = 0.0;
        const std::size_t off = offsets[l] % total;
        for (std::size_t i = 0; i < total; ++i) {
          std::size_t j = i + off;
          if (j >= total) j -= total;
          acc += x.values[i] * x.values[j];
        }
        acc /= static_cast<double>(total);
        m.sum[l].add(acc);
        m.sum_sq[l].add(acc * acc);
      }
    }
    return m;
  });
  CovarianceCheck check;
  check.field = name;
  check.n_samples = n_samples;
  const double n = static_cast<double>(n_samples);
  for (std::size_t l = 0; l < nl; ++l) {
    NeumaierSum s, q;
    for (const auto& p : parts) {
      s.add(p.sum[l].value());
      q.add(p.sum_sq[l].value());
    }
    const double mean = s.value() / n;
    const double var = std::max(0.0, (q.value() - n * mean * mean) / (n - 1.0));
    CovarianceCheckRow row;
    row.separation = separations[l];
    row.lag = lags[l];
    row.empirical = mean;
    row.oracle = oracle[l];
    row.std_error = std::sqrt(var / n);
    row.z = row.std_error > 0.0 ? (mean - row.oracle) / row.std_error : 0.0;
    check.rows.push_back(row);
  }
  return check;
}

}  // namespace

CovarianceCheck circle_covariance_check(int n_modes, std::size_t grid_points, std::int64_t n_samples,
                                        const ChainPlan& plan, int separations) {
  const CircleSynthesizer synth(n_modes, circle_grid(grid_points));
  const auto lags = log_spaced_lags(grid_points / 2, separations);
  std::vector<double> sep, oracle;
  for (auto k : lags) {
    const double t = static_cast<double>(k) / static_cast<double>(grid_points);
    sep.push_back(t);
    oracle.push_back(circle_truncated_cov(n_modes, t, 0.0));
  }
  return lag_check("circle", [&synth](RngStream& rng) { return synth.sample(rng); }, lags, lags, sep, oracle,
                   n_samples, plan);
}

CovarianceCheck star_covariance_check(const LayeredNoiseParams& params, int dimension, std::size_t points_per_axis,
                                      std::int64_t n_samples, const ChainPlan& plan, int separations) {
  const auto seed = SeedCovariance::bump_self_convolution(dimension);
  const GridSpec grid{dimension, points_per_axis, 2.0, 0.0};
  const StarSynthesizer synth(grid, params, seed, 1.0);
  const auto oracle_kernel = CovarianceOracle::star_layered(params, seed);
  const double h = grid.spacing();
  // Stay inside the kernel's support so periodic images never contribute.
  const auto max_lag = static_cast<std::size_t>(std::floor(0.95 / h));
  const auto lags = log_spaced_lags(max_lag, separations);
  std::vector<std::size_t> offsets;
  std::vector<double> sep, oracle;
  for (auto k : lags) {
    offsets.push_back(dimension == 1 ? k : k * points_per_axis);
    sep.push_back(h * static_cast<double>(k));
    oracle.push_back(oracle_kernel.at_distance(h * static_cast<double>(k)));
  }
  return lag_check("star", [&synth](RngStream& rng) { return synth.sample(rng); }, lags, offsets, sep, oracle,
                   n_samples, plan);
}

void write_csv(std::ostream& out, const CovarianceCheck& check) {
  out << "separation,lag,empirical,oracle,std_error,z\n";
  out.precision(17);
  for (const auto& r : check.rows)
    out << r.separation << ',' << r.lag << ',' << r.empirical << ',' << r.oracle << ',' << r.std_error << ',' << r.z
        << '\n';
}

double Histogram2D::peak_density() const {
  if (counts.empty() || n_samples == 0) return 0.0;
  const auto peak = *std::max_element(counts.begin(), counts.end());
  return static_cast<double>(peak) / (static_cast<double>(n_samples) * bin_width() * bin_width());
}

Histogram2D histogram2d(std::span<const std::complex<double>> samples, double range, int bins) {
  if (!(range > 0.0) || bins < 1) throw std::invalid_argument("histogram2d: need range > 0 and bins >= 1");
  Histogram2D h;
  h.range = range;
  h.bins = bins;
  h.n_samples = static_cast<std::int64_t>(samples.size());
  h.counts.assign(static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins), 0);
  const double scale = bins / (2.0 * range);
  for (const auto& z : samples) {
    const double a = std::floor((z.real() + range) * scale), b = std::floor((z.imag() + range) * scale);
    if (!(a >= 0.0 && a < bins && b >= 0.0 && b < bins)) {
      ++h.outside;
      continue;
    }
    ++h.counts[static_cast<std::size_t>(a) * static_cast<std::size_t>(bins) + static_cast<std::size_t>(b)];
  }
  return h;
}

void write_csv(std::ostream& out, const Histogram2D& h) {
  out << "re_lo,re_hi,im_lo,im_hi,count,density\n";
  out.precision(17);
  const double w = h.bin_width();
  const double norm = h.n_samples ? 1.0 / (static_cast<double>(h.n_samples) * w * w) : 0.0;
  for (int i = 0; i < h.bins; ++i)
    for (int j = 0; j < h.bins; ++j) {
      const auto c = h.counts[static_cast<std::size_t>(i) * static_cast<std::size_t>(h.bins) + static_cast<std::size_t>(j)];
      out << -h.range + i * w << ',' << -h.range + (i + 1) * w << ',' << -h.range + j * w << ','
          << -h.range + (j + 1) * w << ',' << c << ',' << static_cast<double>(c) * norm << '\n';
    }
}

}  // namespace chaoslab
