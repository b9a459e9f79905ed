#include "chemodecay/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace chemo {

namespace {

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

void require_finite(const Eigen::ArrayXd& values, const char* where) {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      std::ostringstream msg;
      msg << where << ": non-finite value " << values[i] << " at grid index " << i;
      throw std::domain_error(msg.str());
    }
  }
}

}  // namespace

ScalarField::ScalarField(const Grid& g, Eigen::ArrayXd v) : grid(g), values(std::move(v)) {
  if (static_cast<std::size_t>(values.size()) != g.size()) {
    throw std::invalid_argument("ScalarField: value count does not match grid");
  }
}

SpectralScalar::SpectralScalar(const Grid& g, Eigen::ArrayXcd c) : grid(g), coeffs(std::move(c)) {
  if (static_cast<std::size_t>(coeffs.size()) != g.size()) {
    throw std::invalid_argument("SpectralScalar: coefficient count does not match grid");
  }
}

struct Spectral::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

Spectral::Spectral(const Grid& grid) : waves_(grid), plans_(std::make_unique<Plans>()) {
  std::vector<int> dims(grid.dim(), grid.points());
  auto* buffer = fftw_alloc_complex(grid.size());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->forward = fftw_plan_dft(grid.dim(), dims.data(), buffer, buffer, FFTW_FORWARD, flags);
  plans_->backward = fftw_plan_dft(grid.dim(), dims.data(), buffer, buffer, FFTW_BACKWARD, flags);
  fftw_free(buffer);
  if (plans_->forward == nullptr || plans_->backward == nullptr) {
    throw std::runtime_error("Spectral: FFTW planning failed");
  }
}

Spectral::~Spectral() {
  if (plans_) {
    fftw_destroy_plan(plans_->forward);
    fftw_destroy_plan(plans_->backward);
  }
}

void Spectral::fft_forward(Complex* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plans_->forward, p, p);
}

void Spectral::fft_backward(Complex* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plans_->backward, p, p);
}

SpectralScalar forward_dft(const Spectral& sp, const ScalarField& f) {
  require_same_grid(sp.grid(), f.grid, "forward_dft");
  require_finite(f.values, "forward_dft");
  SpectralScalar out(f.grid);
  out.coeffs = f.values.cast<Complex>();
  sp.fft_forward(out.coeffs.data());
  out.coeffs *= f.grid.cell_volume();
  return out;
}

double hermitian_defect(const Grid& grid, const Eigen::ArrayXcd& coeffs) {
  const double scale = coeffs.abs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const auto c = grid.conjugate_index(f);
    if (c < f) continue;
    worst = std::max(worst, std::abs(coeffs[f] - std::conj(coeffs[c])));
  }
  return worst / scale;
}

ScalarField inverse_dft(const Spectral& sp, const SpectralScalar& fh, HermitianCheck check) {
  require_same_grid(sp.grid(), fh.grid, "inverse_dft");
  if (check == HermitianCheck::enforce) {
    const double defect = hermitian_defect(fh.grid, fh.coeffs);
    if (defect > kHermitianTolerance) {
      std::ostringstream msg;
      msg << "inverse_dft: spectrum violates Hermitian symmetry (relative defect " << defect
          << ")";
      throw std::domain_error(msg.str());
    }
  }
  Eigen::ArrayXcd work = fh.coeffs;
  sp.fft_backward(work.data());
  return ScalarField(fh.grid, work.real() / fh.grid.box_volume());
}

SpectralVector forward_dft(const Spectral& sp, const VectorField& f) {
  SpectralVector out(f.grid);
  for (int a = 0; a < f.grid.dim(); ++a) {
    out.components[a] = forward_dft(sp, f.component(a)).coeffs;
  }
  return out;
}

VectorField inverse_dft(const Spectral& sp, const SpectralVector& fh, HermitianCheck check) {
  VectorField out(fh.grid);
  for (int a = 0; a < fh.grid.dim(); ++a) {
    out.components[a] = inverse_dft(sp, SpectralScalar(fh.grid, fh.components[a]), check).values;
  }
  return out;
}

SpectralScalar spectral_derivative(const Spectral& sp, const SpectralScalar& fh, int axis) {
  require_same_grid(sp.grid(), fh.grid, "spectral_derivative");
  if (axis < 0 || axis >= fh.grid.dim()) {
    throw std::out_of_range("spectral_derivative: axis " + std::to_string(axis) +
                            " out of range");
  }
  const Complex i_unit(0.0, 1.0);
  return SpectralScalar(fh.grid, fh.coeffs * (i_unit * sp.waves().kd[axis].cast<Complex>()));
}

SpectralVector gradient(const Spectral& sp, const SpectralScalar& fh) {
  SpectralVector out(fh.grid);
  for (int a = 0; a < fh.grid.dim(); ++a) out.components[a] = spectral_derivative(sp, fh, a).coeffs;
  return out;
}

SpectralScalar divergence(const Spectral& sp, const SpectralVector& fh) {
  require_same_grid(sp.grid(), fh.grid, "divergence");
  SpectralScalar out(fh.grid);
  for (int a = 0; a < fh.grid.dim(); ++a) {
    out.coeffs += spectral_derivative(sp, SpectralScalar(fh.grid, fh.components[a]), a).coeffs;
  }
  return out;
}

SpectralScalar laplacian(const Spectral& sp, const SpectralScalar& fh) {
  require_same_grid(sp.grid(), fh.grid, "laplacian");
  return SpectralScalar(fh.grid, fh.coeffs * (-sp.waves().xi2).cast<Complex>());
}

SpectralScalar dealias(const Spectral& sp, SpectralScalar fh) {
  require_same_grid(sp.grid(), fh.grid, "dealias");
  const auto& mask = sp.waves().dealias_mask;
  for (Eigen::Index i = 0; i < fh.coeffs.size(); ++i) {
    if (mask[i] == 0.0) fh.coeffs[i] = Complex(0.0, 0.0);
  }
  return fh;
}

double sobolev_energy(const Spectral& sp, const Eigen::ArrayXcd& coeffs, int k) {
  if (k < 0) throw std::invalid_argument("sobolev_energy: negative derivative order");
  Eigen::ArrayXd weighted = coeffs.abs2();
  if (k > 0) weighted *= sp.waves().xi2.pow(k);
  return pairwise_sum(weighted) / sp.grid().box_volume();
}

double sobolev_seminorm(const Spectral& sp, const SpectralScalar& fh, int k) {
  require_same_grid(sp.grid(), fh.grid, "sobolev_seminorm");
  return std::sqrt(sobolev_energy(sp, fh.coeffs, k));
}

double sobolev_seminorm(const Spectral& sp, const SpectralVector& fh, int k) {
  require_same_grid(sp.grid(), fh.grid, "sobolev_seminorm");
  double total = 0.0;
  for (const auto& c : fh.components) total += sobolev_energy(sp, c, k);
  return std::sqrt(total);
}

double sobolev_seminorm(const Spectral& sp, const ScalarField& f, int k) {
  return sobolev_seminorm(sp, forward_dft(sp, f), k);
}

double sobolev_seminorm(const Spectral& sp, const VectorField& f, int k) {
  return sobolev_seminorm(sp, forward_dft(sp, f), k);
}

double l2_norm(const ScalarField& f) {
  return std::sqrt(pairwise_sum(f.values.square().eval()) * f.grid.cell_volume());
}

double linf_norm(const ScalarField& f) { return f.values.abs().maxCoeff(); }

double integral(const ScalarField& f) { return pairwise_sum(f.values) * f.grid.cell_volume(); }

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 128;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double x : values) s += x;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double pairwise_sum(const Eigen::ArrayXd& values) {
  return pairwise_sum(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

}  // namespace chemo
