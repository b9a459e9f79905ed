#include "chemodecay/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace chemo {

using nlohmann::json;

const char* evolution_name(Evolution e) { return e == Evolution::stepped ? "stepped" : "direct"; }

const char* initial_kind_name(InitialKind k) {
  switch (k) {
    case InitialKind::gaussian_bump: return "gaussian_bump";
    case InitialKind::mean_zero_dipole: return "mean_zero_dipole";
    case InitialKind::from_file: return "from_file";
  }
  return "?";
}

const char* energy_policy_name(EnergyPolicy p) {
  switch (p) {
    case EnergyPolicy::automatic: return "auto";
    case EnergyPolicy::enforce: return "enforce";
    case EnergyPolicy::report: return "report";
  }
  return "?";
}

namespace {

// One JSON object being consumed; leftover keys are reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path, const std::string& source)
      : j_(j), path_(std::move(path)), source_(source) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    std::string field = path_;
    if (!key.empty()) field += (field.empty() ? "" : ".") + key;
    throw ConfigError(source_ + ": " + (field.empty() ? "<root>" : field) + ": " + what);
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  long integer(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<long>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    std::vector<double> out;
    if (!has(key)) return out;
    const auto& v = j_.at(key);
    if (!v.is_array()) fail(key, "expected an array of numbers");
    for (const auto& x : v) {
      if (!x.is_number()) fail(key, "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<int> integers(const std::string& key, std::vector<int> fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_array()) fail(key, "expected an array of integers");
    std::vector<int> out;
    for (const auto& x : v) {
      if (!x.is_number_integer()) fail(key, "expected an array of integers");
      out.push_back(x.get<int>());
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_array()) fail(key, "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& x : v) {
      if (!x.is_string()) fail(key, "expected an array of strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }

  std::optional<Section> child(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return Section(j_.at(key), path_.empty() ? key : path_ + "." + key, source_);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) fail(k, "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> seen_;
};

std::optional<Window> read_window(Section& parent, const std::string& key) {
  auto s = parent.child(key);
  if (!s) return std::nullopt;
  Window w{s->number("t_min", 10.0), s->number("t_max", 0.0)};
  if (!(w.t_max > w.t_min)) s->fail("t_max", "must exceed t_min");
  s->finish();
  return w;
}

json window_json(const Window& w) { return json{{"t_min", w.t_min}, {"t_max", w.t_max}}; }

}  // namespace

ExperimentConfig parse_config(const json& j, const std::string& source,
                              const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  Section root(j, "", source);
  const auto schema = root.text("schema", kConfigSchema);
  if (schema != kConfigSchema) {
    root.fail("schema", "unsupported schema '" + schema + "', expected '" + kConfigSchema + "'");
  }
  c.name = root.text("name", c.name);
  c.seed = static_cast<std::uint64_t>(root.integer("seed", 0));

  if (auto g = root.child("grid")) {
    c.grid.dim = static_cast<int>(g->integer("dim", c.grid.dim));
    c.grid.points = static_cast<int>(g->integer("points", c.grid.points));
    c.grid.length = g->number("length", c.grid.length);
    g->finish();
  }
  try {
    c.make_grid();
  } catch (const std::invalid_argument& e) {
    root.fail("grid", e.what());
  }

  if (auto p = root.child("params")) {
    c.params.epsilon = p->number("epsilon", c.params.epsilon);
    c.params.u_bar = p->number("u_bar", c.params.u_bar);
    p->finish();
  }
  try {
    c.params.validate();
  } catch (const std::invalid_argument& e) {
    root.fail("params", e.what());
  }

  c.initial.seed = c.seed;
  if (auto s = root.child("initial")) {
    const auto kind = s->text("kind", "gaussian_bump");
    if (kind == "gaussian_bump") {
      c.initial.kind = InitialKind::gaussian_bump;
    } else if (kind == "mean_zero_dipole") {
      c.initial.kind = InitialKind::mean_zero_dipole;
    } else if (kind == "from_file") {
      c.initial.kind = InitialKind::from_file;
    } else {
      s->fail("kind", "unknown kind '" + kind + "'");
    }
    c.initial.amplitude = s->number("amplitude", c.initial.amplitude);
    if (s->has("sigma")) {
      c.initial.sigma = s->number("sigma", 0.0);
      if (!(*c.initial.sigma > 0.0)) s->fail("sigma", "must be > 0");
    }
    if (s->has("center")) {
      c.initial.center = s->numbers("center");
      if (static_cast<int>(c.initial.center->size()) != c.grid.dim) {
        s->fail("center", "needs " + std::to_string(c.grid.dim) + " entries");
      }
    }
    if (s->has("chem_amplitude")) c.initial.chem_amplitude = s->number("chem_amplitude", 0.0);
    c.initial.seed = static_cast<std::uint64_t>(s->integer("seed", static_cast<long>(c.seed)));
    auto path_of = [&](const std::string& key) {
      const std::filesystem::path p = s->text(key, "");
      return p.empty() || p.is_absolute() ? p : base_dir / p;
    };
    c.initial.n_file = path_of("n_file");
    c.initial.lnc_file = path_of("lnc_file");
    if (c.initial.kind == InitialKind::from_file && c.initial.n_file.empty()) {
      s->fail("n_file", "required for kind from_file");
    }
    s->finish();
  }

  c.integrator.t_final = box_time(c.grid.length);
  if (auto s = root.child("integrator")) {
    const auto evo = s->text("evolution", "stepped");
    if (evo == "stepped") {
      c.evolution = Evolution::stepped;
    } else if (evo == "direct") {
      c.evolution = Evolution::direct;
    } else {
      s->fail("evolution", "expected 'stepped' or 'direct'");
    }
    c.integrator.dt = s->number("dt", 0.0);
    if (c.integrator.dt < 0.0) s->fail("dt", "must be >= 0 (0 selects the default)");
    c.integrator.t_final = s->number("t_final", c.integrator.t_final);
    if (!(c.integrator.t_final >= 0.0)) s->fail("t_final", "must be >= 0");
    try {
      c.integrator.scheme = parse_scheme(s->text("scheme", "etd_trap"));
    } catch (const std::invalid_argument& e) {
      s->fail("scheme", e.what());
    }
    c.integrator.outputs_per_decade =
        static_cast<int>(s->integer("outputs_per_decade", c.integrator.outputs_per_decade));
    if (c.integrator.outputs_per_decade <= 0) s->fail("outputs_per_decade", "must be positive");
    c.integrator.output_times = s->numbers("output_times");
    for (std::size_t i = 0; i < c.integrator.output_times.size(); ++i) {
      const double t = c.integrator.output_times[i];
      if (t < 0.0 || t > c.integrator.t_final) s->fail("output_times", "entries must lie in [0, t_final]");
      if (i > 0 && !(t > c.integrator.output_times[i - 1])) {
        s->fail("output_times", "must be strictly increasing");
      }
    }
    c.integrator.linear_only = s->boolean("linear_only", false);
    s->finish();
  }

  auto& a = c.analysis;
  if (auto s = root.child("analysis")) {
    a.k_max = static_cast<int>(s->integer("k_max", a.k_max));
    a.fit_orders = s->integers("fit_orders", a.fit_orders);
    a.lower_bound_orders = s->integers("lower_bound_orders", a.lower_bound_orders);
    std::vector<std::string> qnames;
    for (Quantity q : a.lower_bound_quantities) qnames.emplace_back(quantity_name(q));
    a.lower_bound_quantities.clear();
    for (const auto& name : s->strings("lower_bound_quantities", qnames)) {
      if (name != "n" && name != "v" && name != "joint" && name != "min_nv") {
        s->fail("lower_bound_quantities", "unknown quantity '" + name + "'");
      }
      a.lower_bound_quantities.push_back(parse_quantity(name));
    }
    a.tolerance = s->number("tolerance", a.tolerance);
    a.linfty_tolerance = s->number("linfty_tolerance", a.linfty_tolerance);
    a.split_radius = s->number("split_radius", a.split_radius);
    a.window = read_window(*s, "window");
    a.linfty_window = read_window(*s, "linfty_window");
    const auto energy = s->text("energy_audit", "auto");
    if (energy == "auto") {
      a.energy = EnergyPolicy::automatic;
    } else if (energy == "enforce") {
      a.energy = EnergyPolicy::enforce;
    } else if (energy == "report") {
      a.energy = EnergyPolicy::report;
    } else {
      s->fail("energy_audit", "expected 'auto', 'enforce' or 'report'");
    }
    a.check_linfty = s->boolean("check_linfty", a.check_linfty);
    a.check_c = s->boolean("check_c", a.check_c);
    if (!(a.tolerance > 0.0)) s->fail("tolerance", "must be > 0");
    if (!(a.linfty_tolerance > 0.0)) s->fail("linfty_tolerance", "must be > 0");
    if (!(a.split_radius > 0.0)) s->fail("split_radius", "must be > 0");
    if (a.k_max < 1 || a.k_max > c.grid.points / 3) {
      s->fail("k_max", "must lie in [1, points/3 = " + std::to_string(c.grid.points / 3) + "]");
    }
    for (int k : a.fit_orders) {
      if (k < 0 || k > a.k_max) s->fail("fit_orders", "orders must lie in [0, k_max]");
    }
    for (int k : a.lower_bound_orders) {
      if (k < 0 || k > a.k_max) s->fail("lower_bound_orders", "orders must lie in [0, k_max]");
    }
    s->finish();
  }
  c.integrator.k_max = a.k_max;
  c.integrator.split_radius = a.split_radius;

  if (auto s = root.child("output")) {
    const std::filesystem::path dir = s->text("directory", "");
    c.output_dir = dir.empty() || dir.is_absolute() ? dir : base_dir / dir;
    c.snapshots = s->boolean("snapshots", c.snapshots);
    s->finish();
  }
  root.finish();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": not valid JSON: " + e.what());
  }
  return parse_config(j, path.string(), path.parent_path());
}

json config_to_json(const ExperimentConfig& c) {
  json initial{{"kind", initial_kind_name(c.initial.kind)},
               {"amplitude", c.initial.amplitude},
               {"seed", c.initial.seed}};
  if (c.initial.sigma) initial["sigma"] = *c.initial.sigma;
  if (c.initial.center) initial["center"] = *c.initial.center;
  if (c.initial.chem_amplitude) initial["chem_amplitude"] = *c.initial.chem_amplitude;
  if (!c.initial.n_file.empty()) initial["n_file"] = c.initial.n_file.string();
  if (!c.initial.lnc_file.empty()) initial["lnc_file"] = c.initial.lnc_file.string();

  json integrator{{"evolution", evolution_name(c.evolution)},
                  {"dt", c.integrator.dt},
                  {"t_final", c.integrator.t_final},
                  {"scheme", scheme_name(c.integrator.scheme)},
                  {"outputs_per_decade", c.integrator.outputs_per_decade},
                  {"linear_only", c.integrator.linear_only}};
  if (!c.integrator.output_times.empty()) integrator["output_times"] = c.integrator.output_times;

  const auto& a = c.analysis;
  std::vector<std::string> quantities;
  for (Quantity q : a.lower_bound_quantities) quantities.emplace_back(quantity_name(q));
  json analysis{{"k_max", a.k_max},
                {"fit_orders", a.fit_orders},
                {"lower_bound_orders", a.lower_bound_orders},
                {"lower_bound_quantities", quantities},
                {"tolerance", a.tolerance},
                {"linfty_tolerance", a.linfty_tolerance},
                {"split_radius", a.split_radius},
                {"energy_audit", energy_policy_name(a.energy)},
                {"check_linfty", a.check_linfty},
                {"check_c", a.check_c}};
  if (a.window) analysis["window"] = window_json(*a.window);
  if (a.linfty_window) analysis["linfty_window"] = window_json(*a.linfty_window);

  json out{{"schema", kConfigSchema},
           {"name", c.name},
           {"seed", c.seed},
           {"grid", {{"dim", c.grid.dim}, {"points", c.grid.points}, {"length", c.grid.length}}},
           {"params", {{"epsilon", c.params.epsilon}, {"u_bar", c.params.u_bar}}},
           {"initial", initial},
           {"integrator", integrator},
           {"analysis", analysis},
           {"output", {{"directory", c.output_dir.string()}, {"snapshots", c.snapshots}}}};
  return out;
}

namespace {

template <typename T>
std::string join(const std::vector<T>& v, auto&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + fmt(v[i]);
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ';')) out.push_back(item);
  return out;
}

}  // namespace

void store_analysis(NormSeries& s, const AnalysisConfig& a) {
  auto num = [](double x) { return format_number(x); };
  auto integer = [](int k) { return std::to_string(k); };
  s.meta["analysis.fit_orders"] = join(a.fit_orders, integer);
  s.meta["analysis.lower_bound_orders"] = join(a.lower_bound_orders, integer);
  s.meta["analysis.lower_bound_quantities"] =
      join(a.lower_bound_quantities, [](Quantity q) { return std::string(quantity_name(q)); });
  s.meta["analysis.tolerance"] = num(a.tolerance);
  s.meta["analysis.linfty_tolerance"] = num(a.linfty_tolerance);
  s.meta["analysis.energy_audit"] = energy_policy_name(a.energy);
  s.meta["analysis.check_linfty"] = a.check_linfty ? "true" : "false";
  s.meta["analysis.check_c"] = a.check_c ? "true" : "false";
  if (a.window) s.meta["analysis.window"] = num(a.window->t_min) + ";" + num(a.window->t_max);
  if (a.linfty_window) {
    s.meta["analysis.linfty_window"] = num(a.linfty_window->t_min) + ";" + num(a.linfty_window->t_max);
  }
}

AnalysisConfig load_analysis(const NormSeries& s) {
  AnalysisConfig a;
  a.k_max = s.k_max;
  a.split_radius = s.meta_number("split_radius", a.split_radius);
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = s.meta.find("analysis." + key);
    if (it == s.meta.end()) return std::nullopt;
    return it->second;
  };
  auto ints = [&](const std::string& key, std::vector<int>& dst) {
    if (auto v = get(key)) {
      dst.clear();
      for (const auto& x : split_list(*v)) dst.push_back(std::stoi(x));
    }
  };
  ints("fit_orders", a.fit_orders);
  ints("lower_bound_orders", a.lower_bound_orders);
  if (auto v = get("lower_bound_quantities")) {
    a.lower_bound_quantities.clear();
    for (const auto& x : split_list(*v)) a.lower_bound_quantities.push_back(parse_quantity(x));
  }
  a.tolerance = s.meta_number("analysis.tolerance", a.tolerance);
  a.linfty_tolerance = s.meta_number("analysis.linfty_tolerance", a.linfty_tolerance);
  if (auto v = get("energy_audit")) {
    a.energy = *v == "enforce" ? EnergyPolicy::enforce
               : *v == "report" ? EnergyPolicy::report
                                : EnergyPolicy::automatic;
  }
  if (auto v = get("check_linfty")) a.check_linfty = *v == "true";
  if (auto v = get("check_c")) a.check_c = *v == "true";
  auto window = [&](const std::string& key) -> std::optional<Window> {
    const auto v = get(key);
    if (!v) return std::nullopt;
    const auto parts = split_list(*v);
    if (parts.size() != 2) throw std::runtime_error("series metadata analysis." + key + " is malformed");
    return Window{std::stod(parts[0]), std::stod(parts[1])};
  };
  a.window = window("window");
  a.linfty_window = window("linfty_window");
  return a;
}

}  // namespace chemo
