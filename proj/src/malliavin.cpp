#include "chaoslab/malliavin.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace chaoslab {

namespace {

using cvec = std::vector<std::complex<double>>;

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

cvec conj_of(const cvec& v) {
  cvec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::conj(v[i]);
  return out;
}

}  // namespace

std::complex<double> h_inner(const ChargeFunction& a, const ChargeFunction& b, const GridCovariance& cov) {
  require_same_grid(a.grid, b.grid, "h_inner");
  require_same_grid(a.grid, cov.grid(), "h_inner");
  return cov.bilinear(a.values, b.values);
}

std::complex<double> h_inner(const ChargeFunction& a, const ChargeFunction& b, const CovarianceOracle& oracle) {
  return h_inner(a, b, *GridCovariance::from_oracle(oracle, a.grid));
}

MalliavinStats malliavin_stats(const ChaosGrid& chaos, const TestFunction& f) {
  if (!chaos.covariance) throw std::invalid_argument("malliavin_stats: chaos carries no covariance");
  return malliavin_stats(chaos, f, *chaos.covariance);
}

MalliavinStats malliavin_stats(const ChaosGrid& chaos, const TestFunction& f, const GridCovariance& cov) {
  require_same_grid(chaos.grid, f.grid, "malliavin_stats");
  require_same_grid(chaos.grid, cov.grid(), "malliavin_stats");
  const cvec g = weighted_chaos(chaos, f);
  MalliavinStats s;
  s.i1 = cov.bilinear(g, g);
  s.i2 = cov.bilinear_plain(g, g);
  const double b4 = std::pow(chaos.beta, 4);
  s.det_gamma = 0.25 * b4 * (std::norm(s.i1) - std::norm(s.i2));
  s.d2_norm2 = b4 * cov.squared()->bilinear(g, g).real();
  return s;
}

std::complex<double> delta_DM(const FieldSample& field, const ChaosGrid& chaos, const TestFunction& f, double beta) {
  if (chaos.field_fingerprint != field.fingerprint())
    throw std::invalid_argument("delta_DM: chaos was not built from this field");
  require_same_grid(chaos.grid, f.grid, "delta_DM");
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i < chaos.values.size(); ++i) {
    const std::complex<double> d(beta * field.truncation_variance(i), field.values[i]);
    sum += f.values[i] * d * chaos.values[i];
  }
  return beta * chaos.grid.cell_volume() * sum;
}

ChargeFunction charge_of_DM(const ChaosGrid& chaos, const TestFunction& f) {
  cvec g = weighted_chaos(chaos, f);
  for (auto& v : g) v *= std::complex<double>(0.0, chaos.beta);
  return {chaos.grid, std::move(g)};
}

ChargeFunction charge_of_DMbar(const ChaosGrid& chaos, const TestFunction& f) {
  ChargeFunction c = charge_of_DM(chaos, f);
  c.values = conj_of(c.values);
  return c;
}

ProjectionMargins projection_bound_check(const ChaosGrid& chaos, const TestFunction& f, const GridCovariance& cov,
                                         const ChargeFunction& h) {
  const double hh = h_inner(h, h, cov).real();
  if (!(hh > 0.0)) throw std::invalid_argument("projection_bound_check: h has zero norm");
  const ChargeFunction df = charge_of_DM(chaos, f);
  const ChargeFunction dfbar = charge_of_DMbar(chaos, f);
  const double norm_df = h_inner(df, df, cov).real();
  const std::complex<double> cross = h_inner(df, dfbar, cov);
  const double det = 0.25 * (norm_df * norm_df - std::norm(cross));
  const double gap = std::abs(h_inner(df, h, cov)) - std::abs(h_inner(dfbar, h, cov));
  ProjectionMargins m;
  m.first = (norm_df > 0.0 ? det / norm_df : 0.0) - 0.25 * gap * gap / hh;
  m.second = det - 0.25 * gap * gap * gap * gap / (hh * hh);
  return m;
}

double expected_d2_norm2(double beta, const TestFunction& f, const GridCovariance& cov) {
  require_same_grid(f.grid, cov.grid(), "expected_d2_norm2");
  const double b2 = beta * beta;
  const auto kernel = cov.map([b2](double c) { return std::exp(b2 * c) * c * c; });
  return b2 * b2 * kernel->bilinear(f.values, f.values).real();
}

std::string to_string(SmallBallQuantity q) {
  return q == SmallBallQuantity::DetGamma ? "det-gamma" : "sobolev-norm";
}

std::pair<double, double> wilson_interval(std::int64_t hits, std::int64_t n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
  const double half = z / (1.0 + z2 / nn) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return {hits == 0 ? 0.0 : std::max(0.0, centre - half), hits == n ? 1.0 : std::min(1.0, centre + half)};
}

std::vector<double> log_spaced(double lo, double hi, int points) {
  if (!(lo > 0.0 && hi > lo) || points < 2) throw std::invalid_argument("log_spaced: need 0 < lo < hi, points >= 2");
  std::vector<double> out(static_cast<std::size_t>(points));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (points - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

SmallBallCurve smallball_from_samples(std::vector<double> values, const std::vector<double>& eps, double beta,
                                      const std::string& quantity) {
  if (eps.size() < 2 || !std::is_sorted(eps.begin(), eps.end()) || !(eps.front() > 0.0))
    throw std::invalid_argument("smallball: eps grid must be positive and ascending");
  if (eps.back() / eps.front() < 1e4 * (1.0 - 1e-12))
    throw std::invalid_argument("smallball: eps grid must span at least 4 decades");
  std::sort(values.begin(), values.end());
  SmallBallCurve c;
  c.quantity = quantity;
  c.beta = beta;
  c.n_samples = static_cast<std::int64_t>(values.size());
  for (double e : eps) {
    const auto hits = static_cast<std::int64_t>(std::upper_bound(values.begin(), values.end(), e) - values.begin());
    const auto [lo, hi] = wilson_interval(hits, c.n_samples);
    c.eps.push_back(e);
    c.p_hat.push_back(c.n_samples ? static_cast<double>(hits) / static_cast<double>(c.n_samples) : 0.0);
    c.ci_low.push_back(lo);
    c.ci_high.push_back(hi);
    c.censored.push_back(hits < 10 ? 1 : 0);
  }
  return c;
}

std::vector<double> sample_smallball_quantity(SmallBallQuantity quantity, double beta, const TestFunction& f,
                                              const FieldSource& source, std::int64_t n, const ChainPlan& plan,
                                              double sobolev_index) {
  const ChaosParams params{beta, f.grid.dimension};
  params.validate();
  auto parts = run_chains<std::vector<double>>(plan, n, [&](RngStream& rng, std::int64_t count) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
      const ChaosGrid chaos = renormalized_exponential(source(rng), params);
      out.push_back(quantity == SmallBallQuantity::DetGamma ? malliavin_stats(chaos, f).det_gamma
                                                            : sobolev_norm(chaos, f, sobolev_index));
    }
    return out;
  });
  return concat(std::move(parts));
}

SmallBallCurve smallball_curve(SmallBallQuantity quantity, double beta, const TestFunction& f,
                               const FieldSource& source, const std::vector<double>& eps, std::int64_t n,
                               const ChainPlan& plan, double sobolev_index) {
  return smallball_from_samples(sample_smallball_quantity(quantity, beta, f, source, n, plan, sobolev_index), eps,
                                beta, to_string(quantity));
}

SlopeProfile smallball_slopes(const std::vector<double>& sorted_values, std::int64_t censor_count, double top) {
  if (!std::is_sorted(sorted_values.begin(), sorted_values.end()))
    throw std::invalid_argument("smallball_slopes: values must be sorted");
  const auto n = static_cast<double>(sorted_values.size());
  // Empirical quantile at level p: the k-th smallest value with k = p n.
  auto quantile = [&](double p) { return sorted_values[static_cast<std::size_t>(std::ceil(p * n)) - 1]; };
  SlopeProfile out;
  double level = top;
  if (!(level * n >= static_cast<double>(censor_count))) return out;
  double q_hi = quantile(level);
  while (level * 0.1 * n >= static_cast<double>(censor_count) * (1.0 - 1e-12)) {
    const double next = level * 0.1;
    const double q_lo = quantile(next);
    if (!(q_lo > 0.0) || !(q_hi > q_lo)) break;
    out.level.push_back(next);
    out.log_eps.push_back(0.5 * (std::log(q_lo) + std::log(q_hi)));
    out.slope.push_back(std::log(10.0) / (std::log(q_hi) - std::log(q_lo)));
    ++out.decades;
    level = next;
    q_hi = q_lo;
  }
  return out;
}

void write_csv(std::ostream& out, const SmallBallCurve& curve) {
  out << "eps,p_hat,ci_low,ci_high,censored\n";
  out.precision(17);
  for (std::size_t i = 0; i < curve.eps.size(); ++i)
    out << curve.eps[i] << ',' << curve.p_hat[i] << ',' << curve.ci_low[i] << ',' << curve.ci_high[i] << ','
        << static_cast<int>(curve.censored[i]) << '\n';
}

void write_stats_header(std::ostream& out) {
  out << "sample,i1_re,i1_im,i2_re,i2_im,det_gamma,d2_norm2,delta_dm_re,delta_dm_im\n";
}

void write_stats_row(std::ostream& out, std::int64_t index, const MalliavinStats& s) {
  out.precision(17);
  out << index << ',' << s.i1.real() << ',' << s.i1.imag() << ',' << s.i2.real() << ',' << s.i2.imag() << ','
      << s.det_gamma << ',' << s.d2_norm2 << ',' << s.delta_dm.real() << ',' << s.delta_dm.imag() << '\n';
}

}  // namespace chaoslab
