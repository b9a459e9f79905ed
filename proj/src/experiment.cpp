#include "chemodecay/experiment.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "chemodecay/snapshot.hpp"

#ifndef CHEMODECAY_VERSION
#define CHEMODECAY_VERSION "unknown"
#endif

namespace chemo {

const char* version() { return CHEMODECAY_VERSION; }

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::not_applicable: return "not_applicable";
    case CheckStatus::insufficient_window: return "insufficient_window";
    case CheckStatus::report_only: return "report_only";
    case CheckStatus::not_recorded: return "not_recorded";
  }
  return "?";
}

bool AnalysisReport::passed() const { return failures().empty(); }

std::vector<std::string> AnalysisReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.counted) continue;
    if (c.status == CheckStatus::fail || c.status == CheckStatus::insufficient_window) {
      out.push_back(c.name);
    }
  }
  return out;
}

namespace {

std::string num(double x) { return format_number(x); }

std::string window_text(const Window& w) { return "[" + num(w.t_min) + ", " + num(w.t_max) + "]"; }

class ReportBuilder {
 public:
  explicit ReportBuilder(AnalysisReport& r) : r_(r) {}

  void set(const std::string& key, const std::string& value) { r_.values[key] = value; }
  void set(const std::string& key, double value) { r_.values[key] = num(value); }

  void check(const std::string& name, CheckStatus status, bool counted, std::string note = {}) {
    r_.checks.push_back({name, status, counted, note});
    set(name + ".verdict", status_name(status));
    if (!note.empty()) set(name + ".note", note);
  }

  void fit(const std::string& name, const DecayFit& f) {
    set(name + ".slope", f.fit.slope);
    set(name + ".target", f.target);
    set(name + ".tolerance", f.tolerance);
    set(name + ".intercept", f.fit.intercept);
    set(name + ".stderr", f.fit.slope_stderr);
    set(name + ".residual_stderr", f.fit.residual_stderr);
    set(name + ".samples", static_cast<double>(f.fit.samples));
    set(name + ".window", window_text(f.window));
    r_.fits.emplace_back(name, f);
  }

 private:
  AnalysisReport& r_;
};

// Every fit in the report goes through here, so FitError always ends as
// "insufficient_window" (or a fail for non-positive values) rather than an abort.
template <typename F>
void guarded(ReportBuilder& b, const std::string& name, bool counted, F&& body) {
  try {
    body();
  } catch (const FitError& e) {
    const std::string what = e.what();
    const bool window = what.rfind("insufficient window", 0) == 0;
    b.check(name, window ? CheckStatus::insufficient_window : CheckStatus::fail, counted, what);
  }
}

}  // namespace

AnalysisReport analyze_series(const NormSeries& s, const AnalysisConfig& a) {
  AnalysisReport report;
  ReportBuilder b(report);
  const double u_bar = s.meta_number("u_bar", 1.0);
  const double epsilon = s.meta_number("epsilon", 1.0);
  const Window window = a.window.value_or(default_window(s));
  b.set("series.rows", static_cast<double>(s.rows.size()));
  b.set("series.dim", static_cast<double>(s.dim));
  b.set("series.k_max", static_cast<double>(s.k_max));
  b.set("window", window_text(window));

  if (const auto it = s.meta.find("failure"); it != s.meta.end()) {
    b.check("run", CheckStatus::fail, true, it->second);
  }

  const bool mass = has_nonzero_mass(s);
  b.set("mass.nonzero", mass ? "true" : "false");

  // Upper bounds on the joint norm; n and v alone are reported alongside.
  // Without mass the heat rate is only an upper bound, so faster decay passes.
  for (int k : a.fit_orders) {
    if (k > s.k_max) continue;
    for (Quantity q : {Quantity::joint, Quantity::n, Quantity::v}) {
      const std::string name = std::string("fit.") + quantity_name(q) + ".k" + std::to_string(k);
      const bool counted = q == Quantity::joint;
      guarded(b, name, counted, [&] {
        const DecayFit f = fit_decay(s, q, k, window, a.tolerance);
        b.fit(name, f);
        if (!counted) {
          b.check(name, CheckStatus::report_only, false);
        } else if (mass) {
          b.check(name, f.passed ? CheckStatus::pass : CheckStatus::fail, true);
        } else {
          const bool below = f.fit.slope <= f.target + f.tolerance;
          b.check(name, below ? CheckStatus::pass : CheckStatus::fail, true,
                  "no mass: one-sided, slope <= target + tolerance");
        }
      });
    }
  }
  for (int k : a.lower_bound_orders) {
    if (k > s.k_max) continue;
    for (Quantity q : a.lower_bound_quantities) {
      const std::string name = std::string("lower.") + quantity_name(q) + ".k" + std::to_string(k);
      guarded(b, name, true, [&] {
        const LowerBoundCheck c = lower_bound_ratio(s, q, k, window);
        if (!c.applicable) {
          b.check(name, CheckStatus::not_applicable, true, "initial data carries no mass");
          return;
        }
        b.set(name + ".ratio_min", c.ratio_min);
        b.set(name + ".ratio_median", c.ratio_median);
        b.set(name + ".drift", c.drift);
        b.set(name + ".window", window_text(c.window));
        report.lower_bounds.emplace_back(name, c);
        b.check(name, c.passed ? CheckStatus::pass : CheckStatus::fail, true);
      });
    }
  }

  {
    const EnergyAudit e = energy_audit(s);
    const bool enforce = a.energy == EnergyPolicy::enforce ||
                         (a.energy == EnergyPolicy::automatic && epsilon > 0.0);
    for (std::size_t k = 0; k < e.violations.size(); ++k) {
      b.set("energy.k" + std::to_string(k) + ".violations", static_cast<double>(e.violations[k]));
      b.set("energy.k" + std::to_string(k) + ".worst_increase", e.worst_increase[k]);
    }
    const CheckStatus st = enforce ? (e.passed ? CheckStatus::pass : CheckStatus::fail)
                                   : CheckStatus::report_only;
    b.check("energy", st, enforce,
            enforce ? std::string() : std::string("monotonicity ") + (e.passed ? "held" : "violated"));
  }

  {
    const MassCheck m = mass_check(s);
    b.set("mass.worst_drift", m.worst_drift);
    b.check("mass", m.passed ? CheckStatus::pass : CheckStatus::fail, true);
  }

  {
    const InterpolationCheck c = interpolation_check(s);
    b.set("interpolation.rows", static_cast<double>(c.rows));
    b.set("interpolation.violations", static_cast<double>(c.violations));
    b.set("interpolation.worst_excess", c.worst_excess);
    b.check("interpolation", c.passed ? CheckStatus::pass : CheckStatus::fail, true);
  }

  // With check_linfty off the fit is still formed and reported.
  guarded(b, "linfty", a.check_linfty, [&] {
    const DecayFit f = linfty_decay_check(s, a.linfty_window.value_or(linfty_window(s)),
                                          a.linfty_tolerance);
    b.fit("linfty", f);
    if (a.check_linfty) {
      b.check("linfty", f.passed ? CheckStatus::pass : CheckStatus::fail, true);
    } else {
      b.check("linfty", CheckStatus::report_only, false);
    }
  });

  if (a.check_c) {
    if (s.rows.empty() || std::isnan(s.rows.front().log_c_inf)) {
      b.check("c", CheckStatus::not_recorded, false, "series has no c column");
    } else {
      guarded(b, "c", true, [&] {
        const ChemicalDecayCheck c = c_decay_check(s, u_bar, window);
        b.fit("c", c.fit);
        b.set("c.bound_sup", c.bound_sup);
        b.set("c.bound_initial", c.bound_initial);
        b.set("c.bounded", c.bounded ? "true" : "false");
        b.check("c", c.passed ? CheckStatus::pass : CheckStatus::fail, true);
      });
    }
  }

  // Fourier splitting diagnostic: share of the energy outside the shrinking ball.
  {
    int rows = 0, increases = 0;
    double first = std::nan(""), last = std::nan(""), prev = std::nan("");
    for (const auto& r : s.rows) {
      if (r.t < window.t_min || r.t > window.t_max || !(r.e_low > 0.0)) continue;
      const double ratio = r.e_high / r.e_low;
      if (rows == 0) first = ratio;
      if (rows > 0 && ratio > prev) ++increases;
      prev = last = ratio;
      ++rows;
    }
    b.set("split.radius", s.meta_number("split_radius", 8.0));
    b.set("split.ratio_first", first);
    b.set("split.ratio_last", last);
    b.set("split.increases", static_cast<double>(increases));
    b.check("split", CheckStatus::report_only, false,
            rows == 0 ? "no rows in window" : std::to_string(rows) + " rows");
  }

  b.set("overall", report.passed() ? "pass" : "fail");
  std::string failed;
  for (const auto& f : report.failures()) failed += (failed.empty() ? "" : ";") + f;
  b.set("failed", failed);
  return report;
}

void write_report(const std::filesystem::path& path, const AnalysisReport& report) {
  write_key_values(path, kReportSchema, report.values);
}

void write_residuals(const std::filesystem::path& path, const AnalysisReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# schema: " << kResidualSchema << "\n";
  out << "fit,x,y,fitted,residual\n";
  for (const auto& [name, f] : report.fits) {
    for (std::size_t i = 0; i < f.x.size(); ++i) {
      out << name << ',' << num(f.x[i]) << ',' << num(f.y[i]) << ','
          << num(f.y[i] - f.residuals[i]) << ',' << num(f.residuals[i]) << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void print_summary(std::ostream& out, const AnalysisReport& report) {
  for (const auto& c : report.checks) {
    out << std::left << std::setw(22) << c.name << ' ' << std::setw(20) << status_name(c.status);
    auto value = [&](const std::string& key) { return std::stod(report.values.at(c.name + key)); };
    if (report.values.count(c.name + ".slope")) {
      out << std::setprecision(4) << " slope " << value(".slope") << " target " << value(".target");
    }
    if (report.values.count(c.name + ".drift")) {
      out << std::setprecision(3) << " drift " << value(".drift") << " min/median "
          << value(".ratio_min") / value(".ratio_median");
    }
    if (!c.note.empty()) out << " (" << c.note << ")";
    out << '\n';
  }
  out << "overall " << (report.passed() ? "pass" : "fail") << '\n';
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

struct Simulation {
  NormSeries series;
  InitialData initial;
  State final_state;
  std::optional<ScalarField> final_ln_c;
  bool failed = false;
  std::string failure;
};

Simulation simulate_full(const ExperimentConfig& c, std::ostream* log) {
  const Spectral sp(c.make_grid());
  Simulation sim{NormSeries{}, make_initial(sp, c.initial, c.params), State(sp.grid()), std::nullopt,
                 false, {}};
  IntegratorConfig ic = c.integrator;
  ic.k_max = c.analysis.k_max;
  ic.split_radius = c.analysis.split_radius;
  if (c.evolution == Evolution::direct) {
    const auto times = ic.output_times.empty()
                           ? log_spaced_times(ic.t_final, ic.outputs_per_decade)
                           : ic.output_times;
    sim.series = linear_series(sp, sim.initial.state, c.params, times, ic.k_max, ic.split_radius);
    const auto table = build_propagator(sp, c.params.epsilon, c.params.u_bar, ic.t_final);
    sim.final_state = to_physical(sp, apply_propagator(table, sp, to_spectral(sp, sim.initial.state)), ic.t_final);
  } else {
    const double report_every = std::max(1.0, ic.t_final / 10.0);
    double next_report = report_every;
    if (log) {
      ic.on_record = [&](const NormRow& r) {
        if (r.t >= next_report || r.t == ic.t_final) {
          *log << "  t = " << r.t << "  |n| = " << r.n_k[0] << "  |v| = " << r.v_k[0] << std::endl;
          while (next_report <= r.t) next_report += report_every;
        }
      };
    }
    Trajectory traj = run(sp, sim.initial, c.params, ic);
    sim.series = std::move(traj.series);
    sim.final_state = to_physical(sp, traj.final_state, sim.series.rows.empty() ? 0.0 : sim.series.rows.back().t);
    sim.final_ln_c = std::move(traj.final_ln_c);
    sim.failed = traj.failed;
    sim.failure = traj.failure;
    if (traj.failed) sim.series.meta["failure"] = traj.failure;
  }
  auto& m = sim.series.meta;
  m["name"] = c.name;
  m["seed"] = std::to_string(c.initial.seed);
  m["initial"] = initial_kind_name(c.initial.kind);
  m["amplitude"] = num(c.initial.amplitude);
  store_analysis(sim.series, c.analysis);
  return sim;
}

}  // namespace

NormSeries simulate(const ExperimentConfig& config, std::ostream* log) {
  return simulate_full(config, log).series;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                std::ostream* log) {
  const std::string started = utc_now();
  std::filesystem::create_directories(out_dir);
  if (log) {
    *log << "run " << config.name << ": d=" << config.grid.dim << " N=" << config.grid.points
         << " L=" << config.grid.length << " eps=" << config.params.epsilon
         << " u_bar=" << config.params.u_bar << " t_final=" << config.integrator.t_final << " ("
         << evolution_name(config.evolution) << ")" << std::endl;
  }
  Simulation sim = simulate_full(config, log);

  ExperimentResult result;
  result.run_failed = sim.failed;
  result.failure = sim.failure;
  auto& f = result.files;
  f.series = out_dir / "series.csv";
  f.report = out_dir / "report.txt";
  f.residuals = out_dir / "residuals.csv";
  f.manifest = out_dir / "manifest.json";
  write_series_csv(f.series, sim.series);

  // Analyse what was written, so `analyze` on the CSV reproduces the report.
  result.series = read_series_csv(f.series);
  result.report = analyze_series(result.series, load_analysis(result.series));
  write_report(f.report, result.report);
  write_residuals(f.residuals, result.report);

  if (config.snapshots) {
    const double t_end = sim.series.rows.empty() ? 0.0 : sim.series.rows.back().t;
    auto snap = [&](const std::string& file, const ScalarField& field, double t,
                    const std::string& name) {
      f.snapshots.push_back(out_dir / file);
      write_snapshot(f.snapshots.back(), field, t, name);
    };
    snap("n_initial.snap", sim.initial.state.n, 0.0, "n");
    snap("lnc_initial.snap", sim.initial.ln_c0, 0.0, "ln_c");
    if (!sim.failed) snap("n_final.snap", sim.final_state.n, t_end, "n");
    if (sim.final_ln_c) snap("lnc_final.snap", *sim.final_ln_c, t_end, "ln_c");
  }

  std::vector<std::filesystem::path> files{f.series, f.report, f.residuals};
  files.insert(files.end(), f.snapshots.begin(), f.snapshots.end());
  write_manifest(f.manifest, config, started, utc_now(), files, result.report);
  return result;
}

AnalysisReport analyze_file(const std::filesystem::path& series_csv,
                            const std::filesystem::path& out_dir) {
  const NormSeries s = read_series_csv(series_csv);
  AnalysisReport report = analyze_series(s, load_analysis(s));
  std::filesystem::create_directories(out_dir);
  write_report(out_dir / "report.txt", report);
  write_residuals(out_dir / "residuals.csv", report);
  return report;
}

void write_manifest(const std::filesystem::path& path, const ExperimentConfig& config,
                    const std::string& started, const std::string& finished,
                    const std::vector<std::filesystem::path>& files, const AnalysisReport& report) {
  nlohmann::json inventory = nlohmann::json::array();
  for (const auto& p : files) {
    inventory.push_back({{"path", p.filename().string()}, {"bytes", std::filesystem::file_size(p)}});
  }
  nlohmann::json checks = nlohmann::json::object();
  for (const auto& c : report.checks) {
    checks[c.name] = {{"status", status_name(c.status)}, {"counted", c.counted}};
  }
  const nlohmann::json manifest{
      {"schema", kManifestSchema},
      {"version", version()},
      {"started", started},
      {"finished", finished},
      {"config", config_to_json(config)},
      {"files", inventory},
      {"verdict", {{"overall", report.passed() ? "pass" : "fail"},
                   {"failed", report.failures()},
                   {"checks", checks}}},
  };
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << manifest.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace chemo
