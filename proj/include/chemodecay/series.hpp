#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace chemo {

/// Diagnostics of one recorded state.
struct NormRow {
  double t = 0.0;
  /// ‖∇^k n‖ and ‖∇^k v‖ for k = 0..k_max.
  std::vector<double> n_k;
  std::vector<double> v_k;
  double n_inf = 0.0;
  /// sup c and sup ln c; NaN when c is not tracked.
  double c_inf = 0.0;
  double log_c_inf = 0.0;
  double mass_n = 0.0;
  std::vector<double> mass_v;
  /// E_k for k = 0..k_max-1.
  std::vector<double> energy;
  double e_low = 0.0;
  double e_high = 0.0;
};

/// A recorded trajectory plus the run facts the analyses need.
struct NormSeries {
  int dim = 2;
  int k_max = 0;
  /// Ordered key/value pairs echoed into the CSV header (length, u_bar, ...).
  std::map<std::string, std::string> meta;
  std::vector<NormRow> rows;

  double meta_number(const std::string& key) const;
  double meta_number(const std::string& key, double fallback) const;
};

inline constexpr const char* kSeriesSchema = "chemodecay.series/1";

/// CSV layout:
///
///   # schema: chemodecay.series/1
///   # <key>=<value>            (dim and k_max first, then the rest sorted by key)
///   t,n_0,v_0,...,n_K,v_K,n_inf,c_inf,log_c_inf,M_n,M_v0..,E_0..E_{K-1},e_low,e_high
///
/// Numbers use the shortest round-trip form, so a reload is exact.
void write_series_csv(std::ostream& out, const NormSeries& series);
void write_series_csv(const std::filesystem::path& path, const NormSeries& series);

/// Throws std::runtime_error naming the line and column on malformed input.
NormSeries read_series_csv(std::istream& in, const std::string& source = "<stream>");
NormSeries read_series_csv(const std::filesystem::path& path);

std::vector<std::string> series_columns(int dim, int k_max);

/// `key=value` lines, sorted by key, first line `# schema: <schema>`.
void write_key_values(const std::filesystem::path& path, const std::string& schema,
                      const std::map<std::string, std::string>& values);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double ("nan", "inf", "-inf" for non-finite).
std::string format_number(double x);

}  // namespace chemo
