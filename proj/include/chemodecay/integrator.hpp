#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "chemodecay/model.hpp"
#include "chemodecay/propagator.hpp"
#include "chemodecay/series.hpp"

namespace chemo {

enum class Scheme { etd1, etd_trap };

const char* scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

struct IntegratorConfig {
  /// Step size; 0 selects default_dt.
  double dt = 0.0;
  double t_final = 1.0;
  Scheme scheme = Scheme::etd_trap;
  /// Explicit output times in [0, t_final]; empty selects a log-spaced grid.
  std::vector<double> output_times;
  int outputs_per_decade = 40;
  /// Drop the nonlinear sources.
  bool linear_only = false;
  /// Highest derivative order recorded.
  int k_max = 3;
  /// R of the Fourier-splitting ball.
  double split_radius = 8.0;
  /// Called after each recorded row (progress reporting).
  std::function<void(const NormRow&)> on_record;
};

/// min(0.1, 0.25 dx / max(1, sup|v0| + sup|n0|)).
double default_dt(const State& initial);

/// Output times (1+t) = 10^{j/per_decade}, plus 0 and t_final.
std::vector<double> log_spaced_times(double t_final, int per_decade);

/// Step count and the output steps for a run: dt is shrunk so that an integer
/// number of steps reaches t_final, and each output time is moved to the
/// nearest step (duplicates dropped).
struct StepPlan {
  double dt = 0.0;
  long steps = 0;
  std::vector<long> output_steps;
};

StepPlan plan_steps(const IntegratorConfig& config, double dt);

/// One exponential step of the Duhamel formula. Keeps Ŝ and the physical
/// fields of the current state so each source evaluation is used once.
class Stepper {
 public:
  Stepper(const Spectral& sp, const ModelParams& params, double dt, Scheme scheme,
          bool linear_only);

  /// Bind the state about to be stepped (evaluates its sources and fields).
  void reset(const StateHat& u);
  /// Advance the bound state by dt; afterwards fields() describe the new state.
  void step(StateHat& u);

  const PhysicalFields& fields() const { return fields_; }
  const PropagatorTable& table() const { return table_; }
  double dt() const { return table_.dt; }

 private:
  void evaluate(const StateHat& u, StateHat& s_out);

  const Spectral& sp_;
  ModelParams params_;
  Scheme scheme_;
  bool linear_only_;
  PropagatorTable table_;
  StateHat source_;
  StateHat predictor_;
  StateHat predictor_source_;
  PhysicalFields fields_;
  PhysicalFields scratch_fields_;
};

/// Diagnostics of one state. `n_real` may carry the real-space n to save a
/// transform; `log_c_sup` is recorded as given (NaN when c is not tracked).
NormRow measure(const Spectral& sp, const StateHat& u, double t, int k_max, double u_bar,
                double split_radius, const ScalarField* n_real = nullptr,
                double log_c_sup = std::numeric_limits<double>::quiet_NaN());

/// E_k = (‖∇^k n‖² + ‖∇^{k+1} n‖²) / u_bar + ‖∇^k v‖² + ‖∇^{k+1} v‖².
double lemma_energy(const NormRow& row, int k, double u_bar);

struct Trajectory {
  explicit Trajectory(const Grid& g) : final_state(g) {}
  NormSeries series;
  bool failed = false;
  std::string failure;
  double dt = 0.0;
  long steps_taken = 0;
  StateHat final_state;
  std::optional<ScalarField> final_ln_c;
};

/// Advance `initial` to t_final, recording a row at every output step and
/// integrating ln c alongside. Blow-up (non-finite values) stops the run and
/// returns the rows so far with `failed` set.
Trajectory run(const Spectral& sp, const InitialData& initial, const ModelParams& params,
               const IntegratorConfig& config);

/// Linear evolution by Ĝ(t) applied directly at each time (no stepping);
/// c is not tracked.
NormSeries linear_series(const Spectral& sp, const State& initial, const ModelParams& params,
                         const std::vector<double>& times, int k_max, double split_radius);

/// Metadata shared by every series: grid, parameters, k_max.
void describe_run(NormSeries& s, const Grid& grid, const ModelParams& params, int k_max);

}  // namespace chemo
