#include "chaoslab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "chaoslab/errors.hpp"
#include "chaoslab/grid.hpp"

namespace chaoslab {

namespace {

const std::vector<std::pair<ExperimentKind, std::string>>& kind_names() {
  static const std::vector<std::pair<ExperimentKind, std::string>> names{
      {ExperimentKind::FieldValidate, "field-validate"},
      {ExperimentKind::FbMoments, "fb-moments"},
      {ExperimentKind::NegativeMoment, "negative-moment"},
      {ExperimentKind::Onsager, "onsager"},
      {ExperimentKind::MinDistIntegral, "min-dist-integral"},
      {ExperimentKind::MalliavinSmallball, "malliavin-smallball"},
      {ExperimentKind::SobolevSmallball, "sobolev-smallball"},
      {ExperimentKind::Density, "density"},
      {ExperimentKind::DecompositionScan, "decomposition-scan"},
  };
  return names;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

[[noreturn]] void fail(const std::string& key, const std::string& msg) {
  throw ConfigError("field '" + key + "': " + msg);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) fail(key, "cannot parse '" + text + "' as a number");
  if constexpr (std::is_floating_point_v<T>)
    if (!std::isfinite(value)) fail(key, "must be finite");
  return value;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(key, trim(item)));
  if (out.empty()) fail(key, "empty list");
  return out;
}

std::string format(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string format_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format(v[i]);
  return s;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"experiment-id", [](auto& c, auto&, auto& v) { c.experiment_id = v; }},
      {"kind", [](auto& c, auto&, auto& v) { c.kind = kind_from_string(v); }},
      {"dimension", [](auto& c, auto& k, auto& v) { c.dimension = parse_number<int>(k, v); }},
      {"beta", [](auto& c, auto& k, auto& v) { c.beta = parse_number<double>(k, v); }},
      {"beta-ladder", [](auto& c, auto& k, auto& v) { c.beta_ladder = parse_list(k, v); }},
      {"alpha", [](auto& c, auto& k, auto& v) { c.alpha = parse_number<double>(k, v); }},
      {"delta", [](auto& c, auto& k, auto& v) { c.delta = parse_number<double>(k, v); }},
      {"n-modes", [](auto& c, auto& k, auto& v) { c.n_modes = parse_number<int>(k, v); }},
      {"grid-points", [](auto& c, auto& k, auto& v) { c.grid_points = parse_number<std::size_t>(k, v); }},
      {"mc-samples", [](auto& c, auto& k, auto& v) { c.mc_samples = parse_number<std::int64_t>(k, v); }},
      {"master-seed", [](auto& c, auto& k, auto& v) { c.master_seed = parse_number<std::uint64_t>(k, v); }},
      {"chains", [](auto& c, auto& k, auto& v) { c.chains = parse_number<int>(k, v); }},
      {"output-dir", [](auto& c, auto&, auto& v) { c.output_dir = v; }},
      {"field", [](auto& c, auto&, auto& v) { c.field = v; }},
      {"n-points", [](auto& c, auto& k, auto& v) { c.n_points = parse_number<int>(k, v); }},
      {"trials", [](auto& c, auto& k, auto& v) { c.trials = parse_number<int>(k, v); }},
      {"n-max", [](auto& c, auto& k, auto& v) { c.n_max = parse_number<int>(k, v); }},
      {"alphas", [](auto& c, auto& k, auto& v) { c.alphas = parse_list(k, v); }},
      {"gtilde", [](auto& c, auto&, auto& v) { c.gtilde = v; }},
      {"bump-strength", [](auto& c, auto& k, auto& v) { c.bump_strength = parse_number<double>(k, v); }},
      {"smoothstep-order", [](auto& c, auto& k, auto& v) { c.smoothstep_order = parse_number<int>(k, v); }},
      {"sobolev-index", [](auto& c, auto& k, auto& v) { c.sobolev_index = parse_number<double>(k, v); }},
      {"eps-min", [](auto& c, auto& k, auto& v) { c.eps_min = parse_number<double>(k, v); }},
      {"eps-max", [](auto& c, auto& k, auto& v) { c.eps_max = parse_number<double>(k, v); }},
      {"bins", [](auto& c, auto& k, auto& v) { c.bins = parse_number<int>(k, v); }},
      {"hist-range", [](auto& c, auto& k, auto& v) { c.hist_range = parse_number<double>(k, v); }},
  };
  return table;
}

bool needs_beta(ExperimentKind k) {
  return k != ExperimentKind::FieldValidate && k != ExperimentKind::Onsager && k != ExperimentKind::DecompositionScan;
}

bool circle_only(ExperimentKind k) {
  return k == ExperimentKind::FbMoments || k == ExperimentKind::NegativeMoment ||
         k == ExperimentKind::MalliavinSmallball || k == ExperimentKind::SobolevSmallball ||
         k == ExperimentKind::Density;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kind_names())
    if (k == kind) return name;
  return "?";
}

ExperimentKind kind_from_string(const std::string& s) {
  for (const auto& [k, name] : kind_names())
    if (name == s) return k;
  fail("kind", "unknown experiment kind '" + s + "'");
}

std::vector<double> ExperimentConfig::betas() const {
  if (!beta_ladder.empty()) return beta_ladder;
  if (beta) return {*beta};
  return {};
}

void ExperimentConfig::validate() const {
  if (experiment_id.empty()) fail("experiment-id", "required");
  if (experiment_id.find_first_of("/\\ \t") != std::string::npos) fail("experiment-id", "must not contain '/' or blanks");
  if (dimension != 1 && dimension != 2) fail("dimension", "must be 1 or 2");
  if (circle_only(kind) && dimension != 1) fail("dimension", to_string(kind) + " runs on the circle (dimension 1)");
  if (beta && !beta_ladder.empty()) fail("beta", "give either beta or beta-ladder, not both");
  if (needs_beta(kind) && betas().empty()) fail("beta", "required for kind " + to_string(kind));
  const double beta_max = (kind == ExperimentKind::FbMoments || kind == ExperimentKind::NegativeMoment ||
                           kind == ExperimentKind::Density || kind == ExperimentKind::MalliavinSmallball ||
                           kind == ExperimentKind::SobolevSmallball)
                              ? 1.0
                              : std::sqrt(static_cast<double>(dimension));
  for (double b : betas())
    if (!(b > 0.0 && b < beta_max)) fail(beta ? "beta" : "beta-ladder", "each value must lie in (0, " + format(beta_max) + ")");
  if (!(alpha > 0.0)) fail("alpha", "must be positive");
  if (!(delta > 0.0 && delta < 1.0)) fail("delta", "must lie in (0, 1)");
  if (n_modes < 1) fail("n-modes", "must be at least 1");
  if (!is_power_of_two(grid_points) || grid_points < 2) fail("grid-points", "must be a power of two >= 2");
  if (mc_samples < 2) fail("mc-samples", "must be at least 2");
  if (chains < 1 || chains > 4096) fail("chains", "must lie in [1, 4096]");
  if (field != "circle" && field != "star") fail("field", "must be 'circle' or 'star'");
  if (kind == ExperimentKind::FieldValidate && field == "circle" && dimension != 1)
    fail("dimension", "the circle field is one-dimensional");
  if (n_points < 2 || n_points > 12) fail("n-points", "must lie in [2, 12]");
  if (trials < 1) fail("trials", "must be positive");
  if (n_max < 1 || n_max > 12) fail("n-max", "must lie in [1, 12]");
  if (alphas.empty() || !std::is_sorted(alphas.begin(), alphas.end()) || !(alphas.front() > 0.0) ||
      std::adjacent_find(alphas.begin(), alphas.end()) != alphas.end())
    fail("alphas", "must be positive and strictly ascending");
  static const std::set<std::string> gtildes{"none", "zero", "bump", "circle-remainder"};
  if (!gtildes.count(gtilde)) fail("gtilde", "must be one of none, zero, bump, circle-remainder");
  if (gtilde == "circle-remainder" && dimension != 1) fail("gtilde", "circle-remainder needs dimension 1");
  if (!(bump_strength > 0.0)) fail("bump-strength", "must be positive");
  if (smoothstep_order < 1 || smoothstep_order % 2 == 0) fail("smoothstep-order", "must be odd and positive");
  if (kind == ExperimentKind::DecompositionScan) {
    const std::size_t cap = dimension == 1 ? 2048 : 64;
    if (grid_points > cap) fail("grid-points", "at most " + std::to_string(cap) + " per axis for a dense eigen-solve");
  }
  if (eps_min && !(*eps_min > 0.0)) fail("eps-min", "must be positive");
  if (eps_min && eps_max && !(*eps_max >= 1e4 * *eps_min)) fail("eps-max", "the eps grid must span at least 4 decades");
  if (bins < 2 || bins > 4096) fail("bins", "must lie in [2, 4096]");
  if (!(hist_range > 0.0)) fail("hist-range", "must be positive");
}

std::string ExperimentConfig::echo() const {
  std::ostringstream o;
  o << "experiment-id = " << experiment_id << '\n';
  o << "kind = " << to_string(kind) << '\n';
  o << "dimension = " << dimension << '\n';
  if (beta) o << "beta = " << format(*beta) << '\n';
  if (!beta_ladder.empty()) o << "beta-ladder = " << format_list(beta_ladder) << '\n';
  o << "alpha = " << format(alpha) << '\n';
  o << "delta = " << format(delta) << '\n';
  o << "n-modes = " << n_modes << '\n';
  o << "grid-points = " << grid_points << '\n';
  o << "mc-samples = " << mc_samples << '\n';
  o << "master-seed = " << master_seed << '\n';
  o << "chains = " << chains << '\n';
  if (!output_dir.empty()) o << "output-dir = " << output_dir.string() << '\n';
  o << "field = " << field << '\n';
  o << "n-points = " << n_points << '\n';
  o << "trials = " << trials << '\n';
  o << "n-max = " << n_max << '\n';
  o << "alphas = " << format_list(alphas) << '\n';
  o << "gtilde = " << gtilde << '\n';
  o << "bump-strength = " << format(bump_strength) << '\n';
  o << "smoothstep-order = " << smoothstep_order << '\n';
  o << "sobolev-index = " << format(sobolev_index) << '\n';
  if (eps_min) o << "eps-min = " << format(*eps_min) << '\n';
  if (eps_max) o << "eps-max = " << format(*eps_max) << '\n';
  o << "bins = " << bins << '\n';
  o << "hist-range = " << format(hist_range) << '\n';
  return o.str();
}

ExperimentConfig ExperimentConfig::parse(std::istream& in, const std::string& source) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + ": unknown field '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + ": field '" + key + "' given twice");
    if (value.empty()) throw ConfigError(where + ": field '" + key + "' has no value");
    try {
      it->second(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  if (!seen.count("kind")) throw ConfigError(source + ": field 'kind': required");
  return c;
}

ExperimentConfig ExperimentConfig::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse(in, path.string());
}

}  // namespace chaoslab
