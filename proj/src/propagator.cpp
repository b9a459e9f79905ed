#include "chemodecay/propagator.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace chemo {

ModeMatrix<double> PropagatorTable::mode_matrix(const WavenumberTable& waves,
                                                std::size_t mode) const {
  const auto k = waves.derivative_xi(mode);
  const auto d = k.size();
  const auto m = static_cast<Eigen::Index>(mode);
  ModeMatrix<double> G(d + 1, d + 1);
  G(0, 0) = nn[m];
  for (Eigen::Index i = 0; i < d; ++i) {
    G(0, i + 1) = Complex(0, u_bar * psi2[m] * k[i]);
    G(i + 1, 0) = Complex(0, psi2[m] * k[i]);
    for (Eigen::Index j = 0; j < d; ++j) {
      G(i + 1, j + 1) = (i == j ? transverse[m] : 0.0) + along[m] * k[i] * k[j];
    }
  }
  return G;
}

PropagatorTable build_propagator(const Spectral& sp, double epsilon, double u_bar, double dt) {
  if (!(dt >= 0.0)) throw std::invalid_argument("build_propagator: dt must be >= 0");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("build_propagator: epsilon must be >= 0");
  if (!(u_bar > 0.0)) throw std::invalid_argument("build_propagator: u_bar must be > 0");
  const auto& waves = sp.waves();
  const auto size = static_cast<Eigen::Index>(sp.grid().size());
  const int dim = sp.grid().dim();
  PropagatorTable table{sp.grid(), epsilon, u_bar, dt, Eigen::ArrayXd(size), Eigen::ArrayXd(size),
                        Eigen::ArrayXd(size), Eigen::ArrayXd(size)};
#pragma omp parallel for schedule(static)
  for (Eigen::Index m = 0; m < size; ++m) {
    const double s = waves.xi2[m];
    double q = 0.0;
    for (int a = 0; a < dim; ++a) q += waves.kd[a][m] * waves.kd[a][m];
    const auto psi = mode_psi(dt, s, q, epsilon, u_bar);
    const double transverse = std::exp(-epsilon * s * dt);
    table.nn[m] = psi.psi1 - s * psi.psi2;
    table.psi2[m] = psi.psi2;
    table.transverse[m] = transverse;
    table.along[m] = q > 0.0 ? (psi.psi1 - epsilon * s * psi.psi2 - transverse) / q : 0.0;
  }
  return table;
}

void apply_propagator_inplace(const PropagatorTable& table, const Spectral& sp, StateHat& u) {
  if (!(table.grid == u.grid()) || !(sp.grid() == u.grid())) {
    throw std::invalid_argument("apply_propagator: grid mismatch");
  }
  const auto& kd = sp.waves().kd;
  const int dim = u.grid().dim();
  const auto size = static_cast<Eigen::Index>(u.grid().size());
  const Complex i_unit(0.0, 1.0);
#pragma omp parallel for schedule(static)
  for (Eigen::Index m = 0; m < size; ++m) {
    Complex kv(0.0, 0.0);
    for (int a = 0; a < dim; ++a) kv += kd[a][m] * u.v.components[a][m];
    const Complex n = u.n.coeffs[m];
    const Complex coupled = i_unit * table.psi2[m] * n + table.along[m] * kv;
    for (int a = 0; a < dim; ++a) {
      auto& va = u.v.components[a][m];
      va = table.transverse[m] * va + kd[a][m] * coupled;
    }
    u.n.coeffs[m] = table.nn[m] * n + i_unit * (table.u_bar * table.psi2[m]) * kv;
  }
}

StateHat apply_propagator(const PropagatorTable& table, const Spectral& sp, StateHat u) {
  apply_propagator_inplace(table, sp, u);
  return u;
}

void write_green_csv(const std::filesystem::path& path, int dim, std::span<const double> xi_abs,
                     std::span<const double> epsilons, std::span<const double> times,
                     double u_bar) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("write_green_csv: dim must be 2 or 3");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_green_csv: cannot open " + path.string());
  out << "# schema: chemodecay.green/1 dim=" << dim << " u_bar=" << u_bar << '\n';
  out << "xi_abs,epsilon,t";
  for (int r = 0; r <= dim; ++r) {
    for (int c = 0; c <= dim; ++c) out << ",g" << r << c << "_re,g" << r << c << "_im";
  }
  out << '\n' << std::setprecision(17);
  for (double eps : epsilons) {
    for (double x : xi_abs) {
      WaveVector<double> xi = WaveVector<double>::Zero(dim);
      xi[0] = x;
      for (double t : times) {
        const auto G = green_hat(t, xi, eps, u_bar);
        out << x << ',' << eps << ',' << t;
        for (int r = 0; r <= dim; ++r) {
          for (int c = 0; c <= dim; ++c) out << ',' << G(r, c).real() << ',' << G(r, c).imag();
        }
        out << '\n';
      }
    }
  }
}

}  // namespace chemo
