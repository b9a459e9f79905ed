#include "chemodecay/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace chemo {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 190, kTop = 40, kBottom = 60;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  bool log = true;
  double lo = 0.0, hi = 1.0;  // in transformed units

  double transform(double v) const { return log ? std::log10(v) : v; }
  bool shows(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
};

void fit_range(Axis& axis, const std::vector<double>& values) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values) {
    if (!axis.shows(v)) continue;
    lo = std::min(lo, axis.transform(v));
    hi = std::max(hi, axis.transform(v));
  }
  if (!(lo <= hi)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  if (axis.log) {
    lo = std::floor(lo);
    hi = std::ceil(hi);
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  axis.lo = lo;
  axis.hi = hi;
}

std::vector<double> ticks(const Axis& axis) {
  std::vector<double> out;
  if (axis.log) {
    const int step = std::max(1, static_cast<int>(std::ceil((axis.hi - axis.lo) / 8)));
    for (double e = axis.lo; e <= axis.hi + 1e-9; e += step) out.push_back(e);
    return out;
  }
  const double raw = (axis.hi - axis.lo) / 6;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {2.0, 5.0, 10.0}) {
    if (step >= raw) break;
    step = m * mag;
  }
  for (double v = std::ceil(axis.lo / step) * step; v <= axis.hi + 1e-9 * step; v += step) {
    out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return out;
}

std::string tick_label(const Axis& axis, double v) {
  std::ostringstream s;
  if (axis.log) {
    s << "1e" << static_cast<int>(std::lround(v));
  } else {
    s << v;
  }
  return s.str();
}

}  // namespace

std::string render_svg(const Plot& plot) {
  Axis ax{plot.log_x}, ay{plot.log_y};
  std::vector<double> xs, ys;
  for (const auto& c : plot.curves) {
    for (std::size_t i = 0; i < c.x.size() && i < c.y.size(); ++i) {
      if (ax.shows(c.x[i]) && ay.shows(c.y[i])) {
        xs.push_back(c.x[i]);
        ys.push_back(c.y[i]);
      }
    }
  }
  fit_range(ax, xs);
  fit_range(ay, ys);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (ax.transform(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double v) { return kTop + ph - (ay.transform(v) - ay.lo) / (ay.hi - ay.lo) * ph; };

  std::ostringstream s;
  s.precision(6);
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kLeft + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(plot.title) << "</text>\n";

  // Grid and ticks.
  for (double t : ticks(ax)) {
    const double x = kLeft + (t - ax.lo) / (ax.hi - ax.lo) * pw;
    s << "<line x1=\"" << x << "\" y1=\"" << kTop << "\" x2=\"" << x << "\" y2=\"" << kTop + ph
      << "\" stroke=\"#e0e0e0\"/>\n"
      << "<text x=\"" << x << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
      << tick_label(ax, t) << "</text>\n";
  }
  for (double t : ticks(ay)) {
    const double y = kTop + ph - (t - ay.lo) / (ay.hi - ay.lo) * ph;
    s << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kLeft + pw << "\" y2=\"" << y
      << "\" stroke=\"#e0e0e0\"/>\n"
      << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
      << tick_label(ay, t) << "</text>\n";
  }
  s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n"
    << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 18 << "\" text-anchor=\"middle\">"
    << escape(plot.x_label) << "</text>\n"
    << "<text transform=\"translate(18," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(plot.y_label) << "</text>\n";

  s << "<defs><clipPath id=\"plot-area\"><rect x=\"" << kLeft << "\" y=\"" << kTop
    << "\" width=\"" << pw << "\" height=\"" << ph << "\"/></clipPath></defs>\n"
    << "<g clip-path=\"url(#plot-area)\">\n";
  for (const auto& c : plot.curves) {
    std::ostringstream pts;
    pts.precision(7);
    int shown = 0;
    for (std::size_t i = 0; i < c.x.size() && i < c.y.size(); ++i) {
      if (!ax.shows(c.x[i]) || !ay.shows(c.y[i])) continue;
      pts << (shown++ ? " " : "") << px(c.x[i]) << ',' << py(c.y[i]);
    }
    if (shown == 0) continue;
    s << "<polyline fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\"1.6\"";
    if (c.dashed) s << " stroke-dasharray=\"6,4\"";
    s << " points=\"" << pts.str() << "\"/>\n";
    if (c.markers) {
      for (std::size_t i = 0; i < c.x.size() && i < c.y.size(); ++i) {
        if (!ax.shows(c.x[i]) || !ay.shows(c.y[i])) continue;
        s << "<circle cx=\"" << px(c.x[i]) << "\" cy=\"" << py(c.y[i]) << "\" r=\"1.8\" fill=\""
          << c.color << "\"/>\n";
      }
    }
  }
  s << "</g>\n";

  double ly = kTop + 10;
  for (const auto& c : plot.curves) {
    const double lx = kLeft + pw + 14;
    s << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24 << "\" y2=\"" << ly
      << "\" stroke=\"" << c.color << "\" stroke-width=\"1.6\""
      << (c.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n"
      << "<text x=\"" << lx + 30 << "\" y=\"" << ly + 4 << "\">" << escape(c.label) << "</text>\n";
    ly += 18;
  }
  s << "</svg>\n";
  return s.str();
}

std::vector<std::string> plot_kinds() { return {"norms", "ratios", "energy", "linfty", "c"}; }

namespace {

const DecayFit* find_fit(const AnalysisReport& r, const std::string& name) {
  for (const auto& [n, f] : r.fits) {
    if (n == name) return &f;
  }
  return nullptr;
}

// Fitted line and a reference line of the target slope through the fit's
// value at the window start.
void add_fit_lines(Plot& p, const DecayFit& f, const std::string& color, const std::string& what,
                   bool log_time) {
  if (f.x.empty()) return;
  const double x0 = f.x.front(), x1 = f.x.back();
  auto abscissa = [&](double x) { return log_time ? std::exp(x) : x; };
  Curve fit{what + " fit " + format_number(std::round(f.fit.slope * 1000) / 1000), {}, {}, color, true};
  Curve ref{what + " ref " + format_number(f.target), {}, {}, "#7f7f7f", true};
  const double y0 = f.fit.intercept + f.fit.slope * x0;
  for (double x : {x0, x1}) {
    fit.x.push_back(abscissa(x));
    ref.x.push_back(abscissa(x));
    const double yf = f.fit.intercept + f.fit.slope * x;
    const double yr = y0 + f.target * (x - x0);
    fit.y.push_back(log_time ? std::exp(yf) : yf);
    ref.y.push_back(log_time ? std::exp(yr) : yr);
  }
  p.curves.push_back(std::move(fit));
  p.curves.push_back(std::move(ref));
}

std::vector<double> one_plus_t(const NormSeries& s) {
  std::vector<double> x;
  for (const auto& r : s.rows) x.push_back(1.0 + r.t);
  return x;
}

Plot norms_plot(const NormSeries& s, const AnalysisReport& report) {
  Plot p{"L2 seminorms of (n, v)", "1 + t", "||grad^k (n, v)||", true, true, {}};
  for (int k = 0; k <= s.k_max; ++k) {
    const std::string name = "fit.joint.k" + std::to_string(k);
    const DecayFit* f = find_fit(report, name);
    if (!f) continue;
    const std::string color = kPalette[k % 6];
    Curve data{"k=" + std::to_string(k), one_plus_t(s), {}, color, false, true};
    for (const auto& r : s.rows) data.y.push_back(std::hypot(r.n_k[k], r.v_k[k]));
    p.curves.push_back(std::move(data));
    add_fit_lines(p, *f, color, "k=" + std::to_string(k), true);
  }
  return p;
}

Plot ratios_plot(const AnalysisReport& report) {
  Plot p{"Lower-bound ratios r(t) = value (1+t)^((d+2k)/4)", "1 + t", "r(t)", true, true, {}};
  int i = 0;
  for (const auto& [name, c] : report.lower_bounds) {
    const std::string color = kPalette[i++ % 6];
    Curve data{name.substr(6), {}, c.ratios, color, false, true};
    for (double t : c.times) data.x.push_back(1.0 + t);
    p.curves.push_back(std::move(data));
    if (!c.times.empty()) {
      Curve floor{"0.5 median", {1.0 + c.times.front(), 1.0 + c.times.back()},
                  {0.5 * c.ratio_median, 0.5 * c.ratio_median}, color, true};
      p.curves.push_back(std::move(floor));
    }
  }
  return p;
}

Plot energy_plot(const NormSeries& s) {
  Plot p{"Energies E_k", "1 + t", "E_k", true, true, {}};
  const int count = s.rows.empty() ? 0 : static_cast<int>(s.rows.front().energy.size());
  for (int k = 0; k < count; ++k) {
    Curve data{"E_" + std::to_string(k), one_plus_t(s), {}, kPalette[k % 6], false, false};
    for (const auto& r : s.rows) data.y.push_back(r.energy[k]);
    p.curves.push_back(std::move(data));
  }
  return p;
}

Plot linfty_plot(const NormSeries& s, const AnalysisReport& report) {
  Plot p{"Sup norm of n", "1 + t", "||n||_inf", true, true, {}};
  p.curves.push_back({"||n||_inf", one_plus_t(s), {}, kPalette[0], false, true});
  for (const auto& r : s.rows) p.curves.back().y.push_back(r.n_inf);
  if (const DecayFit* f = find_fit(report, "linfty")) add_fit_lines(p, *f, kPalette[0], "", true);
  return p;
}

Plot c_plot(const NormSeries& s, const AnalysisReport& report) {
  Plot p{"Chemical concentration", "t", "log ||c||_inf", false, false, {}};
  Curve data{"log ||c||_inf", {}, {}, kPalette[1], false, true};
  for (const auto& r : s.rows) {
    data.x.push_back(r.t);
    data.y.push_back(r.log_c_inf);
  }
  p.curves.push_back(std::move(data));
  if (const DecayFit* f = find_fit(report, "c")) add_fit_lines(p, *f, kPalette[1], "", false);
  return p;
}

}  // namespace

Plot make_plot(const std::string& kind, const NormSeries& series, const AnalysisReport& report) {
  if (kind == "norms") return norms_plot(series, report);
  if (kind == "ratios") return ratios_plot(report);
  if (kind == "energy") return energy_plot(series);
  if (kind == "linfty") return linfty_plot(series, report);
  if (kind == "c") return c_plot(series, report);
  throw std::invalid_argument("unknown plot kind '" + kind +
                              "' (expected norms, ratios, energy, linfty or c)");
}

std::vector<std::filesystem::path> plot_series(const NormSeries& series, const AnalysisReport& report,
                                               const std::filesystem::path& out_dir,
                                               const std::vector<std::string>& kinds) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& kind : kinds) {
    const std::string svg = render_svg(make_plot(kind, series, report));
    const auto path = out_dir / (kind + ".svg");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << svg;
    if (!out) throw std::runtime_error("write failed for " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace chemo
