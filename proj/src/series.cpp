#include "chemodecay/series.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace chemo {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& where) {
  const std::string s = trim(text);
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw std::runtime_error(where + ": cannot parse number '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

double NormSeries::meta_number(const std::string& key) const {
  const auto it = meta.find(key);
  if (it == meta.end()) throw std::runtime_error("series metadata lacks '" + key + "'");
  return parse_double(it->second, "series metadata '" + key + "'");
}

double NormSeries::meta_number(const std::string& key, double fallback) const {
  return meta.count(key) ? meta_number(key) : fallback;
}

std::vector<std::string> series_columns(int dim, int k_max) {
  std::vector<std::string> cols{"t"};
  for (int k = 0; k <= k_max; ++k) {
    cols.push_back("n_" + std::to_string(k));
    cols.push_back("v_" + std::to_string(k));
  }
  for (const char* c : {"n_inf", "c_inf", "log_c_inf", "M_n"}) cols.emplace_back(c);
  for (int a = 0; a < dim; ++a) cols.push_back("M_v" + std::to_string(a));
  for (int k = 0; k < k_max; ++k) cols.push_back("E_" + std::to_string(k));
  cols.emplace_back("e_low");
  cols.emplace_back("e_high");
  return cols;
}

void write_series_csv(std::ostream& out, const NormSeries& series) {
  out << "# schema: " << kSeriesSchema << "\n";
  out << "# dim=" << series.dim << "\n# k_max=" << series.k_max << "\n";
  for (const auto& [k, v] : series.meta) {
    if (k == "dim" || k == "k_max") continue;
    out << "# " << k << "=" << v << "\n";
  }
  const auto cols = series_columns(series.dim, series.k_max);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& r : series.rows) {
    out << format_number(r.t);
    for (int k = 0; k <= series.k_max; ++k) {
      out << ',' << format_number(r.n_k.at(k)) << ',' << format_number(r.v_k.at(k));
    }
    for (double x : {r.n_inf, r.c_inf, r.log_c_inf, r.mass_n}) out << ',' << format_number(x);
    for (int a = 0; a < series.dim; ++a) out << ',' << format_number(r.mass_v.at(a));
    for (int k = 0; k < series.k_max; ++k) out << ',' << format_number(r.energy.at(k));
    out << ',' << format_number(r.e_low) << ',' << format_number(r.e_high) << "\n";
  }
}

void write_series_csv(const std::filesystem::path& path, const NormSeries& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_series_csv(out, series);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

NormSeries read_series_csv(std::istream& in, const std::string& source) {
  NormSeries s;
  std::string line;
  int lineno = 0;
  auto where = [&] { return source + ":" + std::to_string(lineno); };

  if (!std::getline(in, line)) throw std::runtime_error(source + ": empty file");
  ++lineno;
  if (trim(line) != std::string("# schema: ") + kSeriesSchema) {
    throw std::runtime_error(where() + ": expected '# schema: " + kSeriesSchema + "'");
  }
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.rfind("#", 0) == 0) {
      const auto body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw std::runtime_error(where() + ": metadata line lacks '='");
      s.meta[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    header = split(trim(line), ',');
    break;
  }
  if (header.empty()) throw std::runtime_error(source + ": missing column header");
  s.dim = static_cast<int>(s.meta_number("dim"));
  s.k_max = static_cast<int>(s.meta_number("k_max"));
  const auto expect = series_columns(s.dim, s.k_max);
  if (header != expect) {
    for (std::size_t i = 0; i < std::max(header.size(), expect.size()); ++i) {
      if (i >= header.size() || i >= expect.size() || header[i] != expect[i]) {
        throw std::runtime_error(where() + ": column " + std::to_string(i + 1) + " should be '" +
                                 (i < expect.size() ? expect[i] : std::string("<none>")) + "'");
      }
    }
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != expect.size()) {
      throw std::runtime_error(where() + ": expected " + std::to_string(expect.size()) +
                               " columns, found " + std::to_string(cells.size()));
    }
    std::size_t c = 0;
    auto next = [&] {
      const std::string w = where() + " column " + std::to_string(c + 1) + " (" + expect[c] + ")";
      return parse_double(cells[c++], w);
    };
    // Norms and energies cannot be negative.
    auto norm = [&] {
      const std::size_t col = c;
      const double v = next();
      if (v < 0.0) {
        throw std::runtime_error(where() + " column " + std::to_string(col + 1) + " (" + expect[col] +
                                 "): negative value");
      }
      return v;
    };
    NormRow r;
    r.t = next();
    for (int k = 0; k <= s.k_max; ++k) {
      r.n_k.push_back(norm());
      r.v_k.push_back(norm());
    }
    r.n_inf = norm();
    r.c_inf = norm();
    r.log_c_inf = next();
    r.mass_n = next();
    for (int a = 0; a < s.dim; ++a) r.mass_v.push_back(next());
    for (int k = 0; k < s.k_max; ++k) r.energy.push_back(norm());
    r.e_low = norm();
    r.e_high = norm();
    if (!s.rows.empty() && !(r.t > s.rows.back().t)) {
      throw std::runtime_error(where() + ": times must be strictly increasing");
    }
    s.rows.push_back(std::move(r));
  }
  return s;
}

NormSeries read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open series file " + path.string());
  return read_series_csv(in, path.string());
}

void write_key_values(const std::filesystem::path& path, const std::string& schema,
                      const std::map<std::string, std::string>& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# schema: " << schema << "\n";
  for (const auto& [k, v] : values) out << k << "=" << v << "\n";
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error(path.string() + ": line without '='");
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

}  // namespace chemo
