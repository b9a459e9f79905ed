#include "chemodecay/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace chemo {

const char* quantity_name(Quantity q) {
  switch (q) {
    case Quantity::n: return "n";
    case Quantity::v: return "v";
    case Quantity::joint: return "joint";
    case Quantity::min_nv: return "min_nv";
    case Quantity::n_inf: return "n_inf";
    case Quantity::log_c: return "log_c_inf";
  }
  return "?";
}

Quantity parse_quantity(const std::string& name) {
  for (Quantity q : {Quantity::n, Quantity::v, Quantity::joint, Quantity::min_nv, Quantity::n_inf,
                     Quantity::log_c}) {
    if (name == quantity_name(q)) return q;
  }
  throw std::invalid_argument("unknown quantity '" + name + "'");
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  if (m != y.size() || m < 2) throw FitError("least_squares: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw FitError("least_squares: abscissae are all equal");
  LinearFit f;
  f.samples = m;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    rss += r * r;
  }
  if (m > 2) {
    f.residual_stderr = std::sqrt(rss / (m - 2));
    f.slope_stderr = f.residual_stderr / std::sqrt(sxx);
  }
  return f;
}

double heat_exponent(int dim, int k) { return -(dim + 2.0 * k) / 4.0; }

namespace {

double value_of(const NormSeries& s, const NormRow& r, Quantity q, int k) {
  const bool sobolev = q == Quantity::n || q == Quantity::v || q == Quantity::joint || q == Quantity::min_nv;
  if (sobolev && (k < 0 || k > s.k_max)) {
    std::ostringstream msg;
    msg << "derivative order " << k << " not recorded (k_max = " << s.k_max << ")";
    throw FitError(msg.str());
  }
  switch (q) {
    case Quantity::n: return r.n_k[k];
    case Quantity::v: return r.v_k[k];
    case Quantity::joint: return std::hypot(r.n_k[k], r.v_k[k]);
    case Quantity::min_nv: return std::min(r.n_k[k], r.v_k[k]);
    case Quantity::n_inf: return r.n_inf;
    case Quantity::log_c: return r.log_c_inf;
  }
  return 0.0;
}

std::string describe(Quantity q, int k, const Window& w) {
  std::ostringstream msg;
  msg << quantity_name(q) << " k=" << k << " window [" << w.t_min << ", " << w.t_max << "]";
  return msg.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

}  // namespace

std::vector<std::pair<double, double>> select(const NormSeries& s, Quantity q, int k,
                                              const Window& w) {
  std::vector<std::pair<double, double>> out;
  for (const auto& r : s.rows) {
    if (r.t < w.t_min || r.t > w.t_max) continue;
    out.emplace_back(r.t, value_of(s, r, q, k));
  }
  return out;
}

double box_time(double length) {
  const double scale = length / (2.0 * std::numbers::pi);
  return 0.5 * scale * scale;
}

Window default_window(const NormSeries& s) {
  const double last = s.rows.empty() ? 0.0 : s.rows.back().t;
  return Window{10.0, std::min(last, box_time(s.meta_number("length")))};
}

Window linfty_window(const NormSeries& s) {
  Window w = default_window(s);
  const double wrap = s.meta_number("length") / (2.0 * std::sqrt(s.meta_number("u_bar", 1.0)));
  w.t_max = std::min(w.t_max, wrap);
  return w;
}

DecayFit fit_decay(const NormSeries& s, Quantity q, int k, std::optional<Window> window,
                   double tolerance) {
  DecayFit f;
  f.quantity = q;
  f.k = k;
  f.window = window.value_or(default_window(s));
  f.tolerance = tolerance;
  f.target = q == Quantity::n_inf ? heat_exponent(s.dim, 1) : heat_exponent(s.dim, k);
  const auto pts = select(s, q, k, f.window);
  if (static_cast<int>(pts.size()) < kMinFitSamples) {
    throw FitError("insufficient window: " + std::to_string(pts.size()) + " samples for " +
                   describe(q, k, f.window) + ", need " + std::to_string(kMinFitSamples));
  }
  for (const auto& [t, v] : pts) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-positive value " << v << " at t = " << t << " for " << describe(q, k, f.window)
          << " (norm reached the floating-point floor; shrink the window)";
      throw FitError(msg.str());
    }
    f.x.push_back(std::log1p(t));
    f.y.push_back(std::log(v));
  }
  f.fit = least_squares(f.x, f.y);
  for (std::size_t i = 0; i < f.x.size(); ++i) {
    f.residuals.push_back(f.y[i] - (f.fit.intercept + f.fit.slope * f.x[i]));
  }
  f.passed = std::abs(f.fit.slope - f.target) <= tolerance;
  return f;
}

bool has_nonzero_mass(const NormSeries& s) {
  if (s.rows.empty()) return false;
  const auto& r = s.rows.front();
  const double scale = std::pow(s.meta_number("length"), s.dim / 2.0);
  constexpr double rel = 1e-8;
  if (std::abs(r.mass_n) > rel * scale * r.n_k.at(0)) return true;
  for (double m : r.mass_v) {
    if (std::abs(m) > rel * scale * r.v_k.at(0)) return true;
  }
  return false;
}

LowerBoundCheck lower_bound_ratio(const NormSeries& s, Quantity q, int k,
                                  std::optional<Window> window) {
  LowerBoundCheck c;
  c.quantity = q;
  c.k = k;
  c.window = window.value_or(default_window(s));
  if (!has_nonzero_mass(s)) {
    c.applicable = false;
    return c;
  }
  const double power = -heat_exponent(s.dim, k);
  const auto pts = select(s, q, k, c.window);
  if (static_cast<int>(pts.size()) < kMinFitSamples) {
    throw FitError("insufficient window: " + std::to_string(pts.size()) + " samples for " +
                   describe(q, k, c.window));
  }
  std::vector<double> x, y;
  for (const auto& [t, v] : pts) {
    if (!(v > 0.0)) {
      // A zero norm is the clearest failure of a lower bound.
      c.times.push_back(t);
      c.ratios.push_back(0.0);
      continue;
    }
    const double r = v * std::pow(1.0 + t, power);
    c.times.push_back(t);
    c.ratios.push_back(r);
    x.push_back(std::log1p(t));
    y.push_back(std::log(r));
  }
  c.ratio_min = *std::min_element(c.ratios.begin(), c.ratios.end());
  c.ratio_median = median(c.ratios);
  c.drift = x.size() >= 2 ? least_squares(x, y).slope : -std::numeric_limits<double>::infinity();
  c.passed = c.ratio_min >= 0.5 * c.ratio_median && std::abs(c.drift) <= 0.1;
  return c;
}

EnergyAudit energy_audit(const NormSeries& s) {
  EnergyAudit a;
  a.violations.assign(s.k_max, 0);
  a.worst_increase.assign(s.k_max, 0.0);
  for (int k = 0; k < s.k_max; ++k) {
    for (std::size_t i = 1; i < s.rows.size(); ++i) {
      const double prev = s.rows[i - 1].energy[k];
      const double cur = s.rows[i].energy[k];
      if (prev > 0.0) a.worst_increase[k] = std::max(a.worst_increase[k], cur / prev - 1.0);
      if (cur > prev * (1.0 + kEnergySlack)) ++a.violations[k];
    }
    if (a.violations[k] > 0) a.passed = false;
  }
  return a;
}

std::pair<double, double> fourier_split(const Spectral& sp, const StateHat& u, double radius,
                                        double t) {
  if (!(radius > 0.0)) throw std::invalid_argument("fourier_split: radius must be > 0");
  const auto& xi2 = sp.waves().xi2;
  Eigen::ArrayXd power = u.n.coeffs.abs2();
  for (const auto& c : u.v.components) power += c.abs2();
  const double cut = radius / (1.0 + t);
  const Eigen::ArrayXd inside = (xi2 <= cut).cast<double>();
  const double box = sp.grid().box_volume();
  const double low = pairwise_sum((power * inside).eval()) / box;
  const double high = pairwise_sum((power * (1.0 - inside)).eval()) / box;
  return {low, high};
}

ChemicalDecayCheck c_decay_check(const NormSeries& s, double u_bar, std::optional<Window> window) {
  ChemicalDecayCheck c;
  auto& f = c.fit;
  f.quantity = Quantity::log_c;
  f.window = window.value_or(default_window(s));
  f.target = -u_bar;
  f.tolerance = 0.1 * u_bar;
  if (s.rows.empty() || std::isnan(s.rows.front().log_c_inf)) {
    throw FitError("c was not recorded in this series");
  }
  c.bound_initial = s.rows.front().log_c_inf + u_bar * s.rows.front().t;
  c.bound_sup = -std::numeric_limits<double>::infinity();
  for (const auto& [t, lc] : select(s, Quantity::log_c, 0, f.window)) {
    if (!std::isfinite(lc)) throw FitError("non-finite log c at t = " + format_number(t));
    f.x.push_back(t);
    f.y.push_back(lc);
    c.bound_sup = std::max(c.bound_sup, lc + u_bar * t);
  }
  if (static_cast<int>(f.x.size()) < kMinFitSamples) {
    throw FitError("insufficient window: " + std::to_string(f.x.size()) + " samples for " +
                   describe(Quantity::log_c, 0, f.window));
  }
  f.fit = least_squares(f.x, f.y);
  for (std::size_t i = 0; i < f.x.size(); ++i) {
    f.residuals.push_back(f.y[i] - (f.fit.intercept + f.fit.slope * f.x[i]));
  }
  f.passed = f.fit.slope >= -1.1 * u_bar && f.fit.slope <= -0.9 * u_bar;
  c.bounded = c.bound_sup <= c.bound_initial + 1.0;
  c.passed = f.passed && c.bounded;
  return c;
}

DecayFit linfty_decay_check(const NormSeries& s, std::optional<Window> window, double tolerance) {
  return fit_decay(s, Quantity::n_inf, 1, window.value_or(linfty_window(s)), tolerance);
}

InterpolationCheck interpolation_check(const NormSeries& s) {
  InterpolationCheck c;
  constexpr double slack = 1e-12;
  for (const auto& r : s.rows) {
    ++c.rows;
    if (s.k_max < 2) continue;
    bool bad = false;
    auto record = [&](double lhs, double rhs) {
      const double excess = lhs - rhs;
      if (excess > slack) bad = true;
      c.worst_excess = std::max(c.worst_excess, excess);
    };
    record(r.n_k[1] * r.n_k[1], r.n_k[0] * r.n_k[2]);
    for (int k = 2; k <= s.k_max; ++k) {
      record(r.n_k[1], std::pow(r.n_k[0], 1.0 - 1.0 / k) * std::pow(r.n_k[k], 1.0 / k));
    }
    if (bad) ++c.violations;
  }
  c.passed = c.violations == 0;
  return c;
}

MassCheck mass_check(const NormSeries& s) {
  MassCheck c;
  if (s.rows.empty()) return c;
  const auto& first = s.rows.front();
  for (const auto& r : s.rows) {
    c.worst_drift = std::max(c.worst_drift, std::abs(r.mass_n - first.mass_n) /
                                                std::max(1.0, std::abs(first.mass_n)));
    for (std::size_t a = 0; a < r.mass_v.size(); ++a) {
      c.worst_drift = std::max(c.worst_drift, std::abs(r.mass_v[a] - first.mass_v[a]) /
                                                  std::max(1.0, std::abs(first.mass_v[a])));
    }
  }
  c.passed = c.worst_drift <= kMassTolerance;
  return c;
}

}  // namespace chemo
