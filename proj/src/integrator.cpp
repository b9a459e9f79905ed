#include "chemodecay/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "chemodecay/decay.hpp"

namespace chemo {

const char* scheme_name(Scheme s) { return s == Scheme::etd1 ? "etd1" : "etd_trap"; }

Scheme parse_scheme(const std::string& name) {
  if (name == "etd1") return Scheme::etd1;
  if (name == "etd_trap") return Scheme::etd_trap;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected etd1 or etd_trap)");
}

double default_dt(const State& initial) {
  Eigen::ArrayXd speed2 = Eigen::ArrayXd::Zero(initial.n.values.size());
  for (const auto& c : initial.v.components) speed2 += c.square();
  const double sup = std::sqrt(speed2.maxCoeff()) + initial.n.values.abs().maxCoeff();
  return std::min(0.1, 0.25 * initial.n.grid.dx() / std::max(1.0, sup));
}

std::vector<double> log_spaced_times(double t_final, int per_decade) {
  if (per_decade <= 0) throw std::invalid_argument("outputs_per_decade must be positive");
  std::vector<double> times{0.0};
  for (int j = 1;; ++j) {
    const double t = std::pow(10.0, static_cast<double>(j) / per_decade) - 1.0;
    if (t >= t_final) break;
    times.push_back(t);
  }
  if (t_final > 0.0) times.push_back(t_final);
  return times;
}

StepPlan plan_steps(const IntegratorConfig& config, double dt) {
  if (!(config.t_final >= 0.0) || !std::isfinite(config.t_final)) {
    throw std::invalid_argument("t_final must be finite and >= 0");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  StepPlan plan;
  plan.steps = config.t_final == 0.0 ? 0 : static_cast<long>(std::ceil(config.t_final / dt - 1e-9));
  plan.dt = plan.steps == 0 ? dt : config.t_final / plan.steps;

  std::vector<double> times = config.output_times;
  if (times.empty()) {
    times = log_spaced_times(config.t_final, config.outputs_per_decade);
  } else {
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] < 0.0 || times[i] > config.t_final) {
        throw std::invalid_argument("output time " + format_number(times[i]) +
                                    " outside [0, t_final]");
      }
      if (i > 0 && !(times[i] > times[i - 1])) {
        throw std::invalid_argument("output times must be strictly increasing");
      }
    }
  }
  for (double t : times) {
    const long s = plan.steps == 0 ? 0 : std::lround(t / plan.dt);
    if (plan.output_steps.empty() || s > plan.output_steps.back()) plan.output_steps.push_back(s);
  }
  return plan;
}

Stepper::Stepper(const Spectral& sp, const ModelParams& params, double dt, Scheme scheme,
                 bool linear_only)
    : sp_(sp),
      params_(params),
      scheme_(scheme),
      linear_only_(linear_only),
      table_(build_propagator(sp, params.epsilon, params.u_bar, dt)),
      source_(sp.grid()),
      predictor_(sp.grid()),
      predictor_source_(sp.grid()),
      fields_(sp.grid()),
      scratch_fields_(sp.grid()) {}

void Stepper::evaluate(const StateHat& u, StateHat& s_out) {
  if (!linear_only_) {
    nonlinear_terms_hat(sp_, u, params_, s_out, fields_);
    return;
  }
  // Fields only; the sources stay zero.
  const double inv_box = 1.0 / u.grid().box_volume();
  Eigen::ArrayXcd work;
  auto to_real = [&](const Eigen::ArrayXcd& c, Eigen::ArrayXd& dst) {
    work = c;
    sp_.fft_backward(work.data());
    dst = work.real() * inv_box;
  };
  to_real(u.n.coeffs, fields_.n.values);
  fields_.speed2.values.setZero();
  for (std::size_t a = 0; a < u.v.components.size(); ++a) {
    to_real(u.v.components[a], fields_.v.components[a]);
    fields_.speed2.values += fields_.v.components[a].square();
  }
}

void Stepper::reset(const StateHat& u) { evaluate(u, source_); }

namespace {

void axpy(double alpha, const StateHat& x, StateHat& y) {
  y.n.coeffs += alpha * x.n.coeffs;
  for (std::size_t a = 0; a < y.v.components.size(); ++a) {
    y.v.components[a] += alpha * x.v.components[a];
  }
}

}  // namespace

void Stepper::step(StateHat& u) {
  const double dt = table_.dt;
  if (linear_only_) {
    apply_propagator_inplace(table_, sp_, u);
  } else if (scheme_ == Scheme::etd1) {
    axpy(dt, source_, u);
    apply_propagator_inplace(table_, sp_, u);
  } else {
    predictor_ = u;
    axpy(dt, source_, predictor_);
    apply_propagator_inplace(table_, sp_, predictor_);
    std::swap(fields_, scratch_fields_);
    nonlinear_terms_hat(sp_, predictor_, params_, predictor_source_, fields_);
    std::swap(fields_, scratch_fields_);
    axpy(0.5 * dt, source_, u);
    apply_propagator_inplace(table_, sp_, u);
    axpy(0.5 * dt, predictor_source_, u);
  }
  evaluate(u, source_);
}

NormRow measure(const Spectral& sp, const StateHat& u, double t, int k_max, double u_bar,
                double split_radius, const ScalarField* n_real, double log_c_sup) {
  NormRow r;
  r.t = t;
  const auto& xi2 = sp.waves().xi2;
  const double box = sp.grid().box_volume();
  Eigen::ArrayXd pn = u.n.coeffs.abs2();
  Eigen::ArrayXd pv = Eigen::ArrayXd::Zero(pn.size());
  for (const auto& c : u.v.components) pv += c.abs2();
  for (int k = 0; k <= k_max + 1; ++k) {
    if (k > 0) {
      pn *= xi2;
      pv *= xi2;
    }
    if (k > k_max) break;
    r.n_k.push_back(std::sqrt(pairwise_sum(pn) / box));
    r.v_k.push_back(std::sqrt(pairwise_sum(pv) / box));
  }
  r.n_inf = n_real ? linf_norm(*n_real) : linf_norm(inverse_dft(sp, u.n, HermitianCheck::skip));
  r.log_c_inf = log_c_sup;
  r.c_inf = std::exp(log_c_sup);
  const auto m = masses(u);
  r.mass_n = m.n;
  r.mass_v = m.v;
  for (int k = 0; k < k_max; ++k) r.energy.push_back(lemma_energy(r, k, u_bar));
  std::tie(r.e_low, r.e_high) = fourier_split(sp, u, split_radius, t);
  return r;
}

double lemma_energy(const NormRow& row, int k, double u_bar) {
  auto sq = [](double x) { return x * x; };
  return (sq(row.n_k.at(k)) + sq(row.n_k.at(k + 1))) / u_bar + sq(row.v_k.at(k)) +
         sq(row.v_k.at(k + 1));
}

void describe_run(NormSeries& s, const Grid& grid, const ModelParams& params, int k_max) {
  s.dim = grid.dim();
  s.k_max = k_max;
  s.meta["dim"] = std::to_string(grid.dim());
  s.meta["k_max"] = std::to_string(k_max);
  s.meta["points"] = std::to_string(grid.points());
  s.meta["length"] = format_number(grid.length());
  s.meta["epsilon"] = format_number(params.epsilon);
  s.meta["u_bar"] = format_number(params.u_bar);
}

namespace {

bool finite(const StateHat& u) {
  if (!u.n.coeffs.allFinite()) return false;
  for (const auto& c : u.v.components) {
    if (!c.allFinite()) return false;
  }
  return true;
}

}  // namespace

Trajectory run(const Spectral& sp, const InitialData& initial, const ModelParams& params,
               const IntegratorConfig& config) {
  params.validate();
  if (config.k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  if (config.k_max > sp.grid().points() / 3) {
    throw std::invalid_argument("k_max exceeds N/3");
  }
  const double requested = config.dt > 0.0 ? config.dt : default_dt(initial.state);
  const StepPlan plan = plan_steps(config, requested);

  Trajectory traj(sp.grid());
  traj.dt = plan.dt;
  auto& series = traj.series;
  describe_run(series, sp.grid(), params, config.k_max);
  series.meta["scheme"] = scheme_name(config.scheme);
  series.meta["dt"] = format_number(plan.dt);
  series.meta["t_final"] = format_number(config.t_final);
  series.meta["linear_only"] = config.linear_only ? "true" : "false";
  series.meta["split_radius"] = format_number(config.split_radius);
  series.meta["evolution"] = "stepped";

  StateHat u = to_spectral(sp, initial.state);
  Stepper stepper(sp, params, plan.dt, config.scheme, config.linear_only);
  stepper.reset(u);
  ChemAccumulator acc(chem_integrand(sp, u.v, stepper.fields(), params), 0.0);

  auto record = [&](double t) {
    const double log_c =
        (initial.ln_c0.values + acc.integral().values).maxCoeff() - params.u_bar * t;
    series.rows.push_back(measure(sp, u, t, config.k_max, params.u_bar, config.split_radius,
                                  &stepper.fields().n, log_c));
    if (config.on_record) config.on_record(series.rows.back());
  };

  std::size_t next_output = 0;
  if (!plan.output_steps.empty() && plan.output_steps.front() == 0) {
    record(0.0);
    ++next_output;
  }
  for (long s = 1; s <= plan.steps; ++s) {
    stepper.step(u);
    const double t = s == plan.steps ? config.t_final : s * plan.dt;
    if (!finite(u)) {
      std::ostringstream msg;
      msg << "non-finite state after step " << s << " (t = " << t << ", dt = " << plan.dt
          << "); last recorded t = " << (series.rows.empty() ? 0.0 : series.rows.back().t);
      traj.failed = true;
      traj.failure = msg.str();
      break;
    }
    acc.advance(chem_integrand(sp, u.v, stepper.fields(), params), t);
    traj.steps_taken = s;
    if (next_output < plan.output_steps.size() && plan.output_steps[next_output] == s) {
      record(t);
      ++next_output;
    }
  }
  traj.final_state = u;
  if (!traj.failed) {
    traj.final_ln_c = reconstruct_ln_c_at(initial.ln_c0, acc, acc.time(), params);
  }
  return traj;
}

NormSeries linear_series(const Spectral& sp, const State& initial, const ModelParams& params,
                         const std::vector<double>& times, int k_max, double split_radius) {
  params.validate();
  NormSeries series;
  describe_run(series, sp.grid(), params, k_max);
  series.meta["evolution"] = "direct";
  series.meta["linear_only"] = "true";
  series.meta["t_final"] = format_number(times.empty() ? 0.0 : times.back());
  series.meta["split_radius"] = format_number(split_radius);
  const StateHat u0 = to_spectral(sp, initial);
  for (double t : times) {
    const auto table = build_propagator(sp, params.epsilon, params.u_bar, t);
    const StateHat u = apply_propagator(table, sp, u0);
    series.rows.push_back(measure(sp, u, t, k_max, params.u_bar, split_radius));
  }
  return series;
}

}  // namespace chemo
