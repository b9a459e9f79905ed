#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "chemodecay/experiment.hpp"

namespace chemo {

struct Curve {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
  bool markers = false;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = true;
  bool log_y = true;
  std::vector<Curve> curves;
};

/// Self-contained SVG document. Points that cannot be shown on a log axis are
/// dropped; with nothing left the axes are drawn over a unit decade.
std::string render_svg(const Plot& plot);

/// Plot kinds produced by plot_series.
std::vector<std::string> plot_kinds();

/// The plot of one kind ("norms", "ratios", "energy", "linfty", "c").
Plot make_plot(const std::string& kind, const NormSeries& series, const AnalysisReport& report);

/// Writes <kind>.svg under `out_dir` for each requested kind ("norms",
/// "ratios", "energy", "linfty", "c"); fitted and reference slope lines come
/// from `report`. Returns the files written.
std::vector<std::filesystem::path> plot_series(const NormSeries& series, const AnalysisReport& report,
                                               const std::filesystem::path& out_dir,
                                               const std::vector<std::string>& kinds);

}  // namespace chemo
