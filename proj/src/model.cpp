#include "chemodecay/model.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "chemodecay/snapshot.hpp"

namespace chemo {

namespace {

const Complex kI(0.0, 1.0);

void require_grid(const Grid& expected, const Grid& got, const char* what) {
  if (!(expected == got)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

ScalarField load_field(const std::filesystem::path& path, const Grid& grid) {
  auto snap = read_snapshot(path);
  if (!(snap.field.grid == grid)) {
    throw std::invalid_argument("initial data file " + path.string() +
                                " does not match the configured grid");
  }
  return std::move(snap.field);
}

VectorField minus_gradient(const Spectral& sp, const ScalarField& g) {
  auto grad = gradient(sp, forward_dft(sp, g));
  for (auto& c : grad.components) c = -c;
  return inverse_dft(sp, grad);
}

}  // namespace

void ModelParams::validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be finite and >= 0");
  }
  if (!(u_bar > 0.0) || !std::isfinite(u_bar)) {
    throw std::invalid_argument("u_bar must be finite and > 0");
  }
}

ScalarField periodic_gaussian(const Grid& grid, std::span<const double> center, double sigma,
                              double amplitude) {
  if (!(sigma > 0.0)) throw std::invalid_argument("periodic_gaussian: sigma must be > 0");
  if (static_cast<int>(center.size()) != grid.dim()) {
    throw std::invalid_argument("periodic_gaussian: centre has wrong dimension");
  }
  const int d = grid.dim();
  const double L = grid.length();
  const double inv = 1.0 / (2.0 * sigma * sigma);
  // Separable: per-axis image sums, then products.
  std::vector<Eigen::ArrayXd> axis(d, Eigen::ArrayXd(grid.points()));
  for (int a = 0; a < d; ++a) {
    for (int j = 0; j < grid.points(); ++j) {
      double s = 0.0;
      for (int m = -1; m <= 1; ++m) {
        const double r = j * grid.dx() - center[a] + m * L;
        s += std::exp(-r * r * inv);
      }
      axis[a][j] = s;
    }
  }
  ScalarField f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto idx = grid.unravel(i);
    double p = amplitude;
    for (int a = 0; a < d; ++a) p *= axis[a][idx[a]];
    f.values[static_cast<Eigen::Index>(i)] = p;
  }
  return f;
}

std::vector<double> chem_center_offset(const Grid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> offset(grid.dim());
  for (auto& o : offset) {
    // Top 53 bits to [0, 1); the mapping is fixed so replay does not depend on
    // the standard library's distribution implementation.
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    o = (unit - 0.5) * grid.length() / 4.0;
  }
  return offset;
}

InitialData make_initial(const Spectral& sp, const InitialDataSpec& spec, const ModelParams& params) {
  params.validate();
  const Grid& grid = sp.grid();
  const int d = grid.dim();
  const double sigma = spec.sigma.value_or(grid.length() / 40.0);
  std::vector<double> center(d, grid.length() / 2.0);
  if (spec.center) {
    if (static_cast<int>(spec.center->size()) != d) {
      throw std::invalid_argument("initial.center must have " + std::to_string(d) + " entries");
    }
    center = *spec.center;
  }

  InitialData out{State(grid), ScalarField(grid)};
  switch (spec.kind) {
    case InitialKind::gaussian_bump:
      out.state.n = periodic_gaussian(grid, center, sigma, spec.amplitude);
      break;
    case InitialKind::mean_zero_dipole: {
      // Shift by whole cells so the two lobes sample identical values.
      const double shift = std::max(1.0, std::round(2.0 * sigma / grid.dx())) * grid.dx();
      auto plus = center, minus = center;
      plus[0] += shift;
      minus[0] -= shift;
      out.state.n = periodic_gaussian(grid, plus, sigma, spec.amplitude);
      out.state.n.values -= periodic_gaussian(grid, minus, sigma, spec.amplitude).values;
      break;
    }
    case InitialKind::from_file:
      out.state.n = load_field(spec.n_file, grid);
      if (!spec.lnc_file.empty()) out.ln_c0 = load_field(spec.lnc_file, grid);
      break;
  }

  if (spec.kind != InitialKind::from_file) {
    auto chem_center = center;
    const auto offset = chem_center_offset(grid, spec.seed);
    for (int a = 0; a < d; ++a) chem_center[a] += offset[a];
    out.ln_c0 = periodic_gaussian(grid, chem_center, sigma, spec.chem_amplitude.value_or(spec.amplitude));
  }
  out.state.v = minus_gradient(sp, out.ln_c0);

  const double min_u = params.u_bar + out.state.n.values.minCoeff();
  if (!(min_u > 0.0)) {
    std::ostringstream msg;
    msg << "initial data violates positivity: min(u0) = " << min_u;
    throw std::domain_error(msg.str());
  }
  return out;
}

StateHat to_spectral(const Spectral& sp, const State& state) {
  StateHat u(state.n.grid);
  u.n = forward_dft(sp, state.n);
  u.v = forward_dft(sp, state.v);
  return u;
}

State to_physical(const Spectral& sp, const StateHat& u, double time) {
  State s(u.grid());
  s.n = inverse_dft(sp, u.n);
  s.v = inverse_dft(sp, u.v);
  s.time = time;
  return s;
}

void nonlinear_terms_hat(const Spectral& sp, const StateHat& u, const ModelParams& params,
                         StateHat& out, PhysicalFields& fields) {
  const Grid& g = u.grid();
  require_grid(sp.grid(), g, "nonlinear_terms_hat");
  const int d = g.dim();
  const auto& waves = sp.waves();
  const auto& mask = waves.dealias_mask;
  const double cell = g.cell_volume();
  const double inv_box = 1.0 / g.box_volume();

  Eigen::ArrayXcd work(g.size());
  auto to_real = [&](const Eigen::ArrayXcd& c, Eigen::ArrayXd& dst) {
    work = c;
    sp.fft_backward(work.data());
    dst = work.real() * inv_box;
  };
  auto to_hat = [&](const Eigen::ArrayXd& src) {
    work = src.cast<Complex>();
    sp.fft_forward(work.data());
    work *= cell * mask.cast<Complex>();
  };

  to_real(u.n.coeffs, fields.n.values);
  fields.speed2.values.setZero();
  for (int a = 0; a < d; ++a) {
    to_real(u.v.components[a], fields.v.components[a]);
    fields.speed2.values += fields.v.components[a].square();
  }

  out.n.coeffs.setZero();
  for (int a = 0; a < d; ++a) {
    to_hat(fields.n.values * fields.v.components[a]);
    out.n.coeffs += kI * waves.kd[a].cast<Complex>() * work;
  }
  if (params.epsilon == 0.0) {
    for (auto& c : out.v.components) c.setZero();
    return;
  }
  to_hat(fields.speed2.values);
  for (int a = 0; a < d; ++a) {
    out.v.components[a] = (-params.epsilon) * kI * waves.kd[a].cast<Complex>() * work;
  }
}

SourcePair nonlinear_terms(const Spectral& sp, const State& state, const ModelParams& params) {
  const Grid& g = state.n.grid;
  StateHat s_hat(g);
  PhysicalFields fields(g);
  nonlinear_terms_hat(sp, to_spectral(sp, state), params, s_hat, fields);
  return SourcePair{inverse_dft(sp, s_hat.n), inverse_dft(sp, s_hat.v)};
}

double curl_defect(const Spectral& sp, const SpectralVector& v) {
  const auto& kd = sp.waves().kd;
  const int d = v.grid.dim();
  double curl = 0.0, grad = 0.0;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      grad += sobolev_energy(sp, kd[a].cast<Complex>() * v.components[b], 0);
      if (a < b) {
        curl += sobolev_energy(
            sp, kd[a].cast<Complex>() * v.components[b] - kd[b].cast<Complex>() * v.components[a], 0);
      }
    }
  }
  return grad == 0.0 ? 0.0 : std::sqrt(curl / grad);
}

State cole_hopf_forward(const Spectral& sp, const ChemState& chem, const ModelParams& params) {
  params.validate();
  require_grid(chem.u.grid, chem.c.grid, "cole_hopf_forward");
  const Eigen::Index bad = [&] {
    for (Eigen::Index i = 0; i < chem.c.values.size(); ++i) {
      if (!(chem.c.values[i] > 0.0)) return i;
    }
    return Eigen::Index{-1};
  }();
  if (bad >= 0) {
    std::ostringstream msg;
    msg << "cole_hopf_forward: c must be positive, found " << chem.c.values[bad]
        << " at grid index " << bad;
    throw std::domain_error(msg.str());
  }
  State s(chem.u.grid);
  s.n = ScalarField(chem.u.grid, chem.u.values - params.u_bar);
  s.v = minus_gradient(sp, ScalarField(chem.c.grid, chem.c.values.log()));
  s.time = chem.time;
  return s;
}

ScalarField reconstruct_ln_c(const Spectral& sp, const VectorField& v) {
  const auto vh = forward_dft(sp, v);
  const double defect = curl_defect(sp, vh);
  if (defect > kCurlTolerance) {
    std::ostringstream msg;
    msg << "reconstruct_ln_c: field is not a gradient (curl defect " << defect << ")";
    throw std::domain_error(msg.str());
  }
  const auto& kd = sp.waves().kd;
  Eigen::ArrayXd k2 = Eigen::ArrayXd::Zero(v.grid.size());
  SpectralScalar phi(v.grid);
  for (int a = 0; a < v.grid.dim(); ++a) {
    k2 += kd[a].square();
    phi.coeffs += kI * kd[a].cast<Complex>() * vh.components[a];
  }
  // Inverse of the discrete gradient; modes it annihilates carry no information.
  for (Eigen::Index i = 0; i < phi.coeffs.size(); ++i) {
    phi.coeffs[i] = k2[i] > 0.0 ? phi.coeffs[i] / k2[i] : Complex(0.0, 0.0);
  }
  return inverse_dft(sp, phi);
}

ScalarField chem_integrand(const Spectral& sp, const SpectralVector& v_hat,
                           const PhysicalFields& fields, const ModelParams& params) {
  ScalarField out(fields.n.grid, -fields.n.values);
  if (params.epsilon != 0.0) {
    const auto div = inverse_dft(sp, divergence(sp, v_hat), HermitianCheck::skip);
    out.values += params.epsilon * (fields.speed2.values - div.values);
  }
  return out;
}

ScalarField chem_integrand(const Spectral& sp, const State& state, const ModelParams& params) {
  PhysicalFields fields(state.n.grid);
  fields.n = state.n;
  fields.v = state.v;
  for (const auto& c : state.v.components) fields.speed2.values += c.square();
  return chem_integrand(sp, forward_dft(sp, state.v), fields, params);
}

ChemAccumulator::ChemAccumulator(const ScalarField& integrand0, double t0)
    : integral_(integrand0.grid), last_(integrand0), time_(t0) {}

void ChemAccumulator::advance(const ScalarField& integrand, double t) {
  require_grid(last_.grid, integrand.grid, "ChemAccumulator::advance");
  if (!(t >= time_)) throw std::invalid_argument("ChemAccumulator::advance: time went backwards");
  integral_.values += 0.5 * (t - time_) * (last_.values + integrand.values);
  last_ = integrand;
  time_ = t;
}

namespace {

void require_time(const ChemAccumulator& acc, double t) {
  if (std::abs(acc.time() - t) > 1e-12 * std::max(1.0, std::abs(t))) {
    std::ostringstream msg;
    msg << "accumulator is at t = " << acc.time() << ", requested t = " << t;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

ScalarField reconstruct_ln_c_at(const ScalarField& ln_c0, const ChemAccumulator& acc, double t,
                                const ModelParams& params) {
  require_time(acc, t);
  require_grid(ln_c0.grid, acc.integral().grid, "reconstruct_ln_c_at");
  return ScalarField(ln_c0.grid, ln_c0.values - params.u_bar * t + acc.integral().values);
}

ScalarField reconstruct_c(const ScalarField& c0, const ChemAccumulator& acc, double t,
                          const ModelParams& params) {
  require_time(acc, t);
  require_grid(c0.grid, acc.integral().grid, "reconstruct_c");
  return ScalarField(c0.grid, c0.values * (acc.integral().values - params.u_bar * t).exp());
}

Masses masses(const State& state) {
  Masses m;
  m.n = integral(state.n);
  for (int a = 0; a < state.n.grid.dim(); ++a) m.v.push_back(integral(state.v.component(a)));
  return m;
}

Masses masses(const StateHat& u) {
  Masses m;
  m.n = u.n.coeffs[0].real();
  for (const auto& c : u.v.components) m.v.push_back(c[0].real());
  return m;
}

}  // namespace chemo
