// chemodecay: run decay experiments, oracle suites, plots and re-analysis.
//
// Exit codes: 0 all checks pass, 1 a verdict failed, 2 configuration or
// runtime error.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "chemodecay/experiment.hpp"
#include "chemodecay/oracle_suites.hpp"
#include "chemodecay/svg_plot.hpp"

#ifndef CHEMODECAY_PRESET_DIR
#define CHEMODECAY_PRESET_DIR "presets"
#endif

namespace fs = std::filesystem;
using namespace chemo;

namespace {

constexpr int kExitPass = 0, kExitFail = 1, kExitError = 2;

struct Options {
  std::string config;
  std::string preset;
  std::string out;
  std::string series;
  std::string suite = "all";
  std::vector<std::string> kinds = plot_kinds();
  int threads = 0;
  bool linear_only = false;
  bool quiet = false;
};

fs::path preset_dir() {
  if (const char* env = std::getenv("CHEMODECAY_PRESETS")) return env;
  return CHEMODECAY_PRESET_DIR;
}

fs::path find_preset(const std::string& name) {
  const fs::path dir = preset_dir();
  const fs::path path = dir / (name + ".cfg");
  if (fs::exists(path)) return path;
  std::ostringstream msg;
  msg << "unknown preset '" << name << "' in " << dir.string();
  if (fs::is_directory(dir)) {
    msg << " (available:";
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.path().extension() == ".cfg") names.push_back(e.path().stem().string());
    }
    std::sort(names.begin(), names.end());
    for (const auto& n : names) msg << ' ' << n;
    msg << ")";
  }
  throw ConfigError(msg.str());
}

// --out, then the config's output directory, then $CHEMODECAY_OUT/<name>, then runs/<name>.
fs::path output_dir(const Options& o, const ExperimentConfig& c) {
  if (!o.out.empty()) return o.out;
  if (!c.output_dir.empty()) return c.output_dir;
  if (const char* root = std::getenv("CHEMODECAY_OUT")) return fs::path(root) / c.name;
  return fs::path("runs") / c.name;
}

int cmd_run(const Options& o) {
  if (o.config.empty() == o.preset.empty()) {
    throw ConfigError("run needs exactly one of --config or --preset");
  }
  const fs::path path = o.preset.empty() ? fs::path(o.config) : find_preset(o.preset);
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  ExperimentConfig config = load_config(path);
  if (o.linear_only) config.integrator.linear_only = true;
  const fs::path out = output_dir(o, config);
  const auto result = run_experiment(config, out, o.quiet ? nullptr : &std::cout);
  if (!o.quiet) {
    if (result.run_failed) std::cout << "run stopped: " << result.failure << "\n";
    print_summary(std::cout, result.report);
    std::cout << "wrote " << out.string() << "\n";
  }
  return result.report.passed() ? kExitPass : kExitFail;
}

int cmd_oracle(const Options& o) {
  bool all = true;
  for (const auto& r : run_suites(o.suite)) {
    all = all && r.passed;
    if (!o.quiet) {
      std::cout << r.name << ": " << (r.passed ? "pass" : "fail") << "  " << r.metric << " = "
                << r.value << "  (" << r.detail << ")\n";
    }
  }
  return all ? kExitPass : kExitFail;
}

fs::path series_output(const Options& o) {
  if (!o.out.empty()) return o.out;
  const fs::path parent = fs::path(o.series).parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

int cmd_analyze(const Options& o) {
  const auto report = analyze_file(o.series, series_output(o));
  if (!o.quiet) print_summary(std::cout, report);
  return report.passed() ? kExitPass : kExitFail;
}

int cmd_plot(const Options& o) {
  const NormSeries s = read_series_csv(fs::path(o.series));
  const auto report = analyze_series(s, load_analysis(s));
  const auto files = plot_series(s, report, series_output(o), o.kinds);
  if (!o.quiet) {
    for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decay-rate experiments for the chemotaxis perturbation system"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--threads", o.threads, "worker threads, 0 = automatic")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", o.quiet, "print nothing but errors");

  auto* run = app.add_subcommand("run", "simulate a configuration and write series, report and manifest");
  run->add_option("--config", o.config, "JSON config file");
  run->add_option("--preset", o.preset, "bundled preset name (see presets/)");
  run->add_option("--out", o.out, "output directory (default $CHEMODECAY_OUT/<name> or runs/<name>)");
  run->add_flag("--linear-only", o.linear_only, "drop the nonlinear terms");

  auto* oracle = app.add_subcommand("oracle", "run the closed-form propagator oracle suites");
  oracle->add_option("suite", o.suite, "semigroup, projector, generator or all")
      ->check(CLI::IsMember({"all", "semigroup", "projector", "generator"}));

  auto* plot = app.add_subcommand("plot", "render SVG plots from a series CSV");
  plot->add_option("series", o.series, "series CSV")->required();
  plot->add_option("--out", o.out, "output directory (default: next to the series)");
  plot->add_option("--kinds", o.kinds, "plots to draw")
      ->delimiter(',')
      ->check(CLI::IsMember(plot_kinds()));

  auto* analyze = app.add_subcommand("analyze", "recompute the verdict report from a series CSV");
  analyze->add_option("series", o.series, "series CSV")->required();
  analyze->add_option("--out", o.out, "output directory (default: next to the series)");

  for (auto* sub : {run, oracle, plot, analyze}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitError;
  }

#ifdef _OPENMP
  if (o.threads > 0) omp_set_num_threads(o.threads);
#endif

  try {
    if (*run) return cmd_run(o);
    if (*oracle) return cmd_oracle(o);
    if (*plot) return cmd_plot(o);
    if (*analyze) return cmd_analyze(o);
  } catch (const std::exception& e) {
    std::cerr << "chemodecay: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
