#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chemodecay/decay.hpp"
#include "chemodecay/integrator.hpp"
#include "chemodecay/model.hpp"

namespace chemo {

struct GridConfig {
  int dim = 2;
  int points = 128;
  double length = 100.0;
};

enum class Evolution { stepped, direct };

enum class EnergyPolicy {
  automatic,  ///< enforced when epsilon > 0, reported otherwise
  enforce,
  report,
};

struct AnalysisConfig {
  int k_max = 3;
  std::vector<int> fit_orders{0, 1, 2};
  std::vector<int> lower_bound_orders{0, 1};
  std::vector<Quantity> lower_bound_quantities{Quantity::min_nv};
  double tolerance = 0.1;
  double linfty_tolerance = kLinftyTolerance;
  double split_radius = 8.0;
  std::optional<Window> window;
  std::optional<Window> linfty_window;
  EnergyPolicy energy = EnergyPolicy::automatic;
  /// Off: the sup-norm fit is still reported but left out of the verdict.
  bool check_linfty = true;
  bool check_c = true;
};

struct ExperimentConfig {
  std::string name = "run";
  std::uint64_t seed = 0;
  GridConfig grid;
  ModelParams params;
  InitialDataSpec initial;
  Evolution evolution = Evolution::stepped;
  /// Integrator settings; k_max and split_radius are taken from `analysis`.
  IntegratorConfig integrator;
  AnalysisConfig analysis;
  std::filesystem::path output_dir;
  bool snapshots = true;

  Grid make_grid() const { return Grid(grid.dim, grid.points, grid.length); }
};

inline constexpr const char* kConfigSchema = "chemodecay.config/1";

/// Raised for schema violations; the message names the source and field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the JSON config format. Unknown keys are rejected. When
/// integrator.t_final is absent it defaults to box_time(L). Relative file
/// paths in `initial` resolve against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& j, const std::string& source,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// The config as JSON, suitable for echoing and reloading.
nlohmann::json config_to_json(const ExperimentConfig& c);

/// Analysis settings round-trip through series metadata under "analysis.*",
/// so a CSV carries everything needed to re-run its verdicts.
void store_analysis(NormSeries& s, const AnalysisConfig& a);
AnalysisConfig load_analysis(const NormSeries& s);

const char* evolution_name(Evolution e);
const char* initial_kind_name(InitialKind k);
const char* energy_policy_name(EnergyPolicy p);

}  // namespace chemo
