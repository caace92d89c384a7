#include "chaoslab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "chaoslab/errors.hpp"
#include "json.hpp"

namespace chaoslab {

namespace fs = std::filesystem;

namespace {

struct CsvTable {
  fs::path source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t index(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError(source.string() + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
  std::vector<double> column(const std::string& name) const {
    const std::size_t k = index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(k < r.size() ? std::strtod(r[k].c_str(), nullptr) : std::nan(""));
    return out;
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  CsvTable t;
  t.source = path;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (t.header.empty())
      t.header = split(line);
    else
      t.rows.push_back(split(line));
  }
  if (t.header.empty()) throw DataError(path.string() + ": no header row");
  return t;
}

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

std::string num(double x, int digits = 4) {
  std::ostringstream o;
  o.precision(digits);
  o << x;
  return o.str();
}

// Plot frame with linear data-to-pixel maps.
class Frame {
 public:
  Frame(double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
    if (!(x1_ > x0_)) x1_ = x0_ + 1.0;
    if (!(y1_ > y0_)) y1_ = y0_ + 1.0;
  }
  double px(double x) const { return kLeft + (x - x0_) / (x1_ - x0_) * kWidth; }
  double py(double y) const { return kTop + (y1_ - y) / (y1_ - y0_) * kHeight; }

  void axes(std::ostream& o, const std::string& xlabel, const std::string& ylabel, const std::string& title) const {
    o << "<rect x='" << kLeft << "' y='" << kTop << "' width='" << kWidth << "' height='" << kHeight
      << "' fill='none' stroke='#333'/>\n";
    for (int i = 0; i <= 5; ++i) {
      const double xv = x0_ + (x1_ - x0_) * i / 5.0, yv = y0_ + (y1_ - y0_) * i / 5.0;
      o << "<text x='" << px(xv) << "' y='" << kTop + kHeight + 16 << "' font-size='11' text-anchor='middle'>"
        << num(xv, 3) << "</text>\n";
      o << "<text x='" << kLeft - 6 << "' y='" << py(yv) + 4 << "' font-size='11' text-anchor='end'>" << num(yv, 3)
        << "</text>\n";
      o << "<line x1='" << kLeft << "' x2='" << kLeft + kWidth << "' y1='" << py(yv) << "' y2='" << py(yv)
        << "' stroke='#eee'/>\n";
    }
    o << "<text x='" << kLeft + kWidth / 2 << "' y='" << kTop + kHeight + 36
      << "' font-size='12' text-anchor='middle'>" << esc(xlabel) << "</text>\n";
    o << "<text transform='translate(16," << kTop + kHeight / 2 << ") rotate(-90)' font-size='12' text-anchor='middle'>"
      << esc(ylabel) << "</text>\n";
    o << "<text x='" << kLeft + kWidth / 2 << "' y='20' font-size='14' text-anchor='middle'>" << esc(title)
      << "</text>\n";
  }

  static constexpr double kLeft = 70, kTop = 34, kWidth = 520, kHeight = 340;

 private:
  double x0_, x1_, y0_, y1_;
};

void open_svg(std::ostream& o, double w, double h) {
  o << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "' viewBox='0 0 " << w << ' '
    << h << "' font-family='sans-serif'>\n<rect width='100%' height='100%' fill='white'/>\n";
}

fs::path write_svg(const fs::path& data, const std::string& body) {
  fs::path out = data;
  out.replace_extension(".svg");
  std::ofstream f(out);
  f << body;
  if (!f) throw DataError("cannot write " + out.string());
  return out;
}

std::string stem_title(const fs::path& p) { return p.stem().string(); }

// Perceptually ordered ramp from dark blue to yellow.
std::string ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  static const double stops[5][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  const double s = t * 4.0;
  const int i = std::min(3, static_cast<int>(s));
  const double f = s - i;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(stops[i][0] + f * (stops[i + 1][0] - stops[i][0])),
                static_cast<int>(stops[i][1] + f * (stops[i + 1][1] - stops[i][1])),
                static_cast<int>(stops[i][2] + f * (stops[i + 1][2] - stops[i][2])));
  return buf;
}

}  // namespace

fs::path plot_smallball(const fs::path& csv) {
  const CsvTable t = read_csv(csv);
  const auto eps = t.column("eps"), p = t.column("p_hat"), lo = t.column("ci_low"), hi = t.column("ci_high"),
             cens = t.column("censored");
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) continue;
    xmin = std::min(xmin, std::log10(eps[i]));
    xmax = std::max(xmax, std::log10(eps[i]));
    if (p[i] > 0.0) ymin = std::min(ymin, std::log10(p[i]));
    if (lo[i] > 0.0) ymin = std::min(ymin, std::log10(lo[i]));
  }
  if (!std::isfinite(xmin)) xmin = -4, xmax = 0;
  if (!std::isfinite(ymin)) ymin = -6;
  ymin = std::floor(ymin) - 0.5;
  const Frame fr(xmin, xmax, ymin, 0.0);
  std::ostringstream o;
  open_svg(o, 620, 420);
  fr.axes(o, "log10 eps", "log10 P(X <= eps)", stem_title(csv));
  // CI band: upper edge left to right, lower edge back.
  std::ostringstream band;
  int band_points = 0;
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (eps[i] > 0.0 && hi[i] > 0.0) {
      band << fr.px(std::log10(eps[i])) << ',' << fr.py(std::log10(hi[i])) << ' ';
      ++band_points;
    }
  for (std::size_t i = eps.size(); i-- > 0;)
    if (eps[i] > 0.0 && hi[i] > 0.0) band << fr.px(std::log10(eps[i])) << ',' << fr.py(std::max(ymin, lo[i] > 0 ? std::log10(lo[i]) : ymin)) << ' ';
  if (band_points > 1) o << "<polygon points='" << band.str() << "' fill='#9ecae1' fill-opacity='0.5' stroke='none'/>\n";
  std::ostringstream line;
  int line_points = 0;
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (eps[i] > 0.0 && p[i] > 0.0) {
      line << fr.px(std::log10(eps[i])) << ',' << fr.py(std::log10(p[i])) << ' ';
      ++line_points;
    }
  if (line_points > 1) o << "<polyline points='" << line.str() << "' fill='none' stroke='#08519c' stroke-width='2'/>\n";
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || cens[i] == 0.0) continue;
    const double y = p[i] > 0.0 ? std::log10(p[i]) : ymin;
    o << "<circle cx='" << fr.px(std::log10(eps[i])) << "' cy='" << fr.py(y)
      << "' r='3' fill='white' stroke='#d62728'/>\n";
  }
  o << "<text x='" << Frame::kLeft + 8 << "' y='" << Frame::kTop + 16
    << "' font-size='11' fill='#d62728'>open circles: censored (fewer than 10 hits)</text>\n</svg>\n";
  return write_svg(csv, o.str());
}

fs::path plot_density(const fs::path& csv) {
  const CsvTable t = read_csv(csv);
  const auto re_lo = t.column("re_lo"), re_hi = t.column("re_hi"), im_lo = t.column("im_lo"),
             im_hi = t.column("im_hi"), dens = t.column("density");
  if (dens.empty()) throw DataError(csv.string() + ": no histogram rows");
  const double x0 = *std::min_element(re_lo.begin(), re_lo.end()), x1 = *std::max_element(re_hi.begin(), re_hi.end());
  const double y0 = *std::min_element(im_lo.begin(), im_lo.end()), y1 = *std::max_element(im_hi.begin(), im_hi.end());
  const double peak = *std::max_element(dens.begin(), dens.end());
  const Frame fr(x0, x1, y0, y1);
  std::ostringstream o;
  open_svg(o, 700, 420);
  for (std::size_t i = 0; i < dens.size(); ++i) {
    if (dens[i] <= 0.0) continue;
    const double x = fr.px(re_lo[i]), y = fr.py(im_hi[i]);
    o << "<rect x='" << x << "' y='" << y << "' width='" << fr.px(re_hi[i]) - x + 0.3 << "' height='"
      << fr.py(im_lo[i]) - y + 0.3 << "' fill='" << ramp(peak > 0 ? dens[i] / peak : 0.0) << "'/>\n";
  }
  fr.axes(o, "Re", "Im", stem_title(csv) + " (peak density " + num(peak) + ")");
  for (int k = 0; k < 50; ++k)
    o << "<rect x='615' y='" << Frame::kTop + Frame::kHeight * (1.0 - (k + 1) / 50.0) << "' width='16' height='"
      << Frame::kHeight / 50.0 + 0.5 << "' fill='" << ramp((k + 0.5) / 50.0) << "'/>\n";
  o << "<text x='636' y='" << Frame::kTop + 8 << "' font-size='11'>" << num(peak, 3) << "</text>\n";
  o << "<text x='636' y='" << Frame::kTop + Frame::kHeight << "' font-size='11'>0</text>\n</svg>\n";
  return write_svg(csv, o.str());
}

fs::path plot_table(const fs::path& csv) {
  const CsvTable t = read_csv(csv);
  const std::size_t cols = t.header.size();
  const double cell = 112, row_h = 20;
  const double width = 20 + cell * static_cast<double>(cols), height = 60 + row_h * static_cast<double>(t.rows.size() + 1);
  std::set<std::size_t> zcols;
  for (std::size_t k = 0; k < cols; ++k)
    if (t.header[k] == "z" || t.header[k] == "z_score") zcols.insert(k);
  std::ostringstream o;
  open_svg(o, width, height);
  o << "<text x='10' y='22' font-size='14'>" << esc(stem_title(csv)) << "</text>\n";
  for (std::size_t k = 0; k < cols; ++k)
    o << "<text x='" << 10 + cell * k << "' y='48' font-size='11' font-weight='bold'>" << esc(t.header[k]) << "</text>\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double y = 48 + row_h * static_cast<double>(r + 1);
    for (std::size_t k = 0; k < cols && k < t.rows[r].size(); ++k) {
      const std::string& s = t.rows[r][k];
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      const bool numeric = end && *end == '\0' && !s.empty();
      std::string fill = "#000";
      if (zcols.count(k) && numeric) fill = std::abs(v) <= 3.0 ? "#1a7f37" : "#cf222e";
      o << "<text x='" << 10 + cell * k << "' y='" << y << "' font-size='11' fill='" << fill << "'>"
        << esc(numeric ? num(v, 6) : s) << "</text>\n";
    }
  }
  o << "</svg>\n";
  return write_svg(csv, o.str());
}

fs::path plot_scan(const fs::path& json) {
  std::ifstream in(json);
  if (!in) throw DataError("cannot read " + json.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(json.string() + ": " + e.what());
  }
  if (!j.contains("scan") || !j["scan"].is_array()) throw DataError(json.string() + ": missing 'scan' array");
  std::vector<double> a, m;
  for (const auto& row : j["scan"]) {
    if (!row.contains("alpha") || !row.contains("min-eig")) throw DataError(json.string() + ": scan row lacks alpha/min-eig");
    a.push_back(std::log10(row["alpha"].get<double>()));
    m.push_back(row["min-eig"].get<double>());
  }
  if (a.empty()) throw DataError(json.string() + ": empty scan");
  const double alpha_star = j.value("alpha-star", 0.0);
  double ymin = std::min(0.0, *std::min_element(m.begin(), m.end())), ymax = std::max(0.0, *std::max_element(m.begin(), m.end()));
  const double pad = 0.05 * (ymax - ymin + 1e-300);
  const double xpad = a.size() > 1 ? 0.5 * (a.back() - a.front()) / static_cast<double>(a.size() - 1) : 0.5;
  const Frame fr(a.front() - xpad, a.back() + xpad, ymin - pad, ymax + pad);
  std::ostringstream o;
  open_svg(o, 620, 420);
  fr.axes(o, "log10 alpha", "smallest eigenvalue", stem_title(json) + " [" + j.value("kernel-id", std::string("?")) + "]");
  o << "<line x1='" << Frame::kLeft << "' x2='" << Frame::kLeft + Frame::kWidth << "' y1='" << fr.py(0) << "' y2='"
    << fr.py(0) << "' stroke='#888' stroke-dasharray='4 3'/>\n";
  std::ostringstream path;
  path << "M" << fr.px(a.front() - xpad) << ',' << fr.py(m.front());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double right = i + 1 < a.size() ? 0.5 * (a[i] + a[i + 1]) : a[i] + xpad;
    path << " H" << fr.px(right);
    if (i + 1 < a.size()) path << " V" << fr.py(m[i + 1]);
  }
  o << "<path d='" << path.str() << "' fill='none' stroke='#08519c' stroke-width='2'/>\n";
  for (std::size_t i = 0; i < a.size(); ++i)
    o << "<circle cx='" << fr.px(a[i]) << "' cy='" << fr.py(m[i]) << "' r='3' fill='" << (m[i] > 0 ? "#1a7f37" : "#cf222e")
      << "'/>\n";
  if (alpha_star > 0.0) {
    const double x = fr.px(std::log10(alpha_star));
    o << "<line x1='" << x << "' x2='" << x << "' y1='" << Frame::kTop << "' y2='" << Frame::kTop + Frame::kHeight
      << "' stroke='#d62728' stroke-dasharray='6 3'/>\n";
    o << "<text x='" << x + 4 << "' y='" << Frame::kTop + 14 << "' font-size='12' fill='#d62728'>alpha* = "
      << num(alpha_star) << "</text>\n";
  } else {
    o << "<text x='" << Frame::kLeft + 8 << "' y='" << Frame::kTop + 14
      << "' font-size='12' fill='#d62728'>no positive alpha in the list</text>\n";
  }
  o << "</svg>\n";
  return write_svg(json, o.str());
}

std::vector<fs::path> plot(const fs::path& dir, const std::string& kind) {
  static const std::set<std::string> kinds{"all", "smallball", "density", "moments", "scan"};
  if (!kinds.count(kind)) throw DataError("unknown plot kind '" + kind + "' (all, smallball, density, moments, scan)");
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  static const std::set<std::string> tables{"moments.csv", "negative_moments.csv", "covariance.csv", "min_dist.csv",
                                            "peaks.csv"};
  std::vector<fs::path> entries;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) entries.push_back(e.path());
  std::sort(entries.begin(), entries.end());
  auto want = [&](const char* k) { return kind == "all" || kind == k; };
  std::vector<fs::path> out;
  for (const auto& p : entries) {
    const std::string name = p.filename().string();
    const bool csv = p.extension() == ".csv";
    if (csv && name.rfind("smallball", 0) == 0 && want("smallball")) out.push_back(plot_smallball(p));
    else if (csv && name.rfind("hist_", 0) == 0 && want("density")) out.push_back(plot_density(p));
    else if (tables.count(name) && want("moments")) out.push_back(plot_table(p));
    else if (name == "scan.json" && want("scan")) out.push_back(plot_scan(p));
  }
  if (out.empty() && kind != "all") throw DataError("no " + kind + " data in " + dir.string());
  return out;
}

}  // namespace chaoslab
