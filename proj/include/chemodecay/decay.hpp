#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chemodecay/series.hpp"
#include "chemodecay/spectral.hpp"

namespace chemo {

enum class Quantity {
  n,      ///< ‖∇^k n‖
  v,      ///< ‖∇^k v‖
  joint,  ///< ‖∇^k (n, v)‖
  min_nv, ///< min(‖∇^k n‖, ‖∇^k v‖)
  n_inf,  ///< ‖n‖_∞
  log_c,  ///< log ‖c‖_∞, fitted against t
};

const char* quantity_name(Quantity q);
Quantity parse_quantity(const std::string& name);

/// Raised when a fit cannot be formed (too few samples, non-positive values).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Window {
  double t_min = 0.0;
  double t_max = 0.0;
};

inline constexpr int kMinFitSamples = 10;

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Residual standard error and standard error of the slope.
  double residual_stderr = 0.0;
  double slope_stderr = 0.0;
  std::size_t samples = 0;
};

/// Ordinary least squares y ≈ intercept + slope x; needs at least two distinct x.
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

struct DecayFit {
  Quantity quantity = Quantity::joint;
  int k = 0;
  double target = 0.0;
  Window window;
  LinearFit fit;
  double tolerance = 0.1;
  bool passed = false;
  /// Fitted points (x, log value) and residuals, for reporting.
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> residuals;
};

/// -(d + 2k)/4.
double heat_exponent(int dim, int k);

/// Samples of a quantity over a window as (t, value) pairs.
std::vector<std::pair<double, double>> select(const NormSeries& s, Quantity q, int k,
                                              const Window& w);

/// (L / 2π)² / 2, the time at which diffusion reaches the box scale.
double box_time(double length);

/// [10, min(last recorded t, box_time(L))].
Window default_window(const NormSeries& s);

/// Window for the sup-norm fit: default_window capped at the time L / (2 √u_bar)
/// when the damped wave fronts from a centred source reach the box boundary.
Window linfty_window(const NormSeries& s);

/// OLS of log(value) against log(1 + t); verdict |slope - target| <= tolerance
/// with target heat_exponent(d, k). Throws FitError on fewer than
/// kMinFitSamples samples or non-positive values.
DecayFit fit_decay(const NormSeries& s, Quantity q, int k, std::optional<Window> window = {},
                   double tolerance = 0.1);

struct LowerBoundCheck {
  Quantity quantity = Quantity::joint;
  int k = 0;
  bool applicable = true;
  Window window;
  double ratio_min = 0.0;
  double ratio_median = 0.0;
  double drift = 0.0;
  bool passed = false;
  std::vector<double> times;
  std::vector<double> ratios;
};

/// True when the first row carries nonzero mass in n or v, relative to what
/// the recorded L² norms allow (|M| <= L^{d/2} ‖·‖ by Cauchy-Schwarz).
bool has_nonzero_mass(const NormSeries& s);

/// r(t) = value (1+t)^{(d+2k)/4}; passes when min r >= 0.5 median r and the
/// OLS slope of log r against log(1 + t) lies in [-0.1, 0.1]. Reported as not
/// applicable (and not passed) without mass.
LowerBoundCheck lower_bound_ratio(const NormSeries& s, Quantity q, int k,
                                  std::optional<Window> window = {});

struct EnergyAudit {
  /// Per k: count of E_k(t_{i+1}) > E_k(t_i) (1 + 1e-10).
  std::vector<int> violations;
  std::vector<double> worst_increase;
  bool passed = true;
};

inline constexpr double kEnergySlack = 1e-10;

EnergyAudit energy_audit(const NormSeries& s);

/// Energies of the state inside and outside the ball |ξ|² <= R/(1+t).
std::pair<double, double> fourier_split(const Spectral& sp, const StateHat& u, double radius,
                                        double t);

struct ChemicalDecayCheck {
  DecayFit fit;
  /// sup over the window of log ‖c‖_∞ + u_bar t, and its value at t = 0.
  double bound_sup = 0.0;
  double bound_initial = 0.0;
  bool bounded = false;
  bool passed = false;
};

/// Slope of log ‖c‖_∞ against t inside [-1.1 u_bar, -0.9 u_bar], and
/// log ‖c‖_∞ + u_bar t staying below its initial value plus one over the window.
ChemicalDecayCheck c_decay_check(const NormSeries& s, double u_bar,
                                 std::optional<Window> window = {});

inline constexpr double kLinftyTolerance = 0.15;

/// ‖n‖_∞ against (1+t)^{-(d+2)/4}.
DecayFit linfty_decay_check(const NormSeries& s, std::optional<Window> window = {},
                            double tolerance = kLinftyTolerance);

struct InterpolationCheck {
  int rows = 0;
  int violations = 0;
  double worst_excess = 0.0;
  bool passed = true;
};

/// ‖∇n‖ <= ‖n‖^{1-1/k} ‖∇^k n‖^{1/k} + 1e-12 for k = 2..k_max and
/// ‖∇n‖² <= ‖n‖ ‖∇²n‖ + 1e-12, on every row.
InterpolationCheck interpolation_check(const NormSeries& s);

struct MassCheck {
  double worst_drift = 0.0;
  bool passed = true;
};

inline constexpr double kMassTolerance = 1e-10;

/// |M(t) - M(0)| <= 1e-10 max(1, |M(0)|) for n and each component of v.
MassCheck mass_check(const NormSeries& s);

}  // namespace chemo
