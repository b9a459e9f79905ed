#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "chemodecay/config.hpp"
#include "chemodecay/decay.hpp"

namespace chemo {

enum class CheckStatus {
  pass,
  fail,
  not_applicable,       ///< lower bound without mass
  insufficient_window,  ///< too few rows to fit
  report_only,          ///< computed but excluded from the verdict
  not_recorded,         ///< the series lacks the column (c in direct runs)
};

const char* status_name(CheckStatus s);

struct CheckOutcome {
  std::string name;
  CheckStatus status = CheckStatus::fail;
  /// Whether the status enters the aggregate verdict.
  bool counted = true;
  std::string note;
};

/// Verdicts derived from a series alone.
struct AnalysisReport {
  /// Flat key=value report, written sorted.
  std::map<std::string, std::string> values;
  std::vector<CheckOutcome> checks;
  /// Every fit that was formed, in report order, keyed by its report prefix.
  std::vector<std::pair<std::string, DecayFit>> fits;
  std::vector<std::pair<std::string, LowerBoundCheck>> lower_bounds;

  /// True when every counted check passed.
  bool passed() const;
  std::vector<std::string> failures() const;
};

inline constexpr const char* kReportSchema = "chemodecay.report/1";
inline constexpr const char* kResidualSchema = "chemodecay.residuals/1";
inline constexpr const char* kManifestSchema = "chemodecay.manifest/1";

AnalysisReport analyze_series(const NormSeries& series, const AnalysisConfig& analysis);

void write_report(const std::filesystem::path& path, const AnalysisReport& report);
/// fit,x,y,fitted,residual per fitted point.
void write_residuals(const std::filesystem::path& path, const AnalysisReport& report);

/// Human summary, one line per check.
void print_summary(std::ostream& out, const AnalysisReport& report);

struct RunArtifacts {
  std::filesystem::path series;
  std::filesystem::path report;
  std::filesystem::path residuals;
  std::filesystem::path manifest;
  std::vector<std::filesystem::path> snapshots;
};

struct ExperimentResult {
  NormSeries series;
  AnalysisReport report;
  RunArtifacts files;
  bool run_failed = false;
  std::string failure;
};

/// make_initial, evolution (stepped or direct), analyses, and every artifact
/// under `out_dir`: series.csv, report.txt, residuals.csv, snapshots and
/// manifest.json. `log` receives progress lines unless null.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                std::ostream* log = nullptr);

/// The series a config produces, without analyses or files.
NormSeries simulate(const ExperimentConfig& config, std::ostream* log = nullptr);

/// Re-analysis of a written series; the settings come from its metadata.
/// Writes report.txt and residuals.csv under `out_dir`.
AnalysisReport analyze_file(const std::filesystem::path& series_csv,
                            const std::filesystem::path& out_dir);

/// The manifest JSON: config echo, version, timestamps, file sizes, verdicts.
void write_manifest(const std::filesystem::path& path, const ExperimentConfig& config,
                    const std::string& started, const std::string& finished,
                    const std::vector<std::filesystem::path>& files, const AnalysisReport& report);

/// Build version string.
const char* version();

}  // namespace chemo
