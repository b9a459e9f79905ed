#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "chemodecay/grid.hpp"

namespace chemo {

using Complex = std::complex<double>;

struct ScalarField {
  Grid grid;
  Eigen::ArrayXd values;

  explicit ScalarField(const Grid& g) : grid(g), values(Eigen::ArrayXd::Zero(g.size())) {}
  ScalarField(const Grid& g, Eigen::ArrayXd v);
};

struct VectorField {
  Grid grid;
  std::vector<Eigen::ArrayXd> components;

  explicit VectorField(const Grid& g)
      : grid(g), components(g.dim(), Eigen::ArrayXd::Zero(g.size())) {}

  ScalarField component(int axis) const { return ScalarField(grid, components.at(axis)); }
};

/// Coefficients approximating the continuum transform:
/// f_hat(xi_k) = dx^d * sum_x f(x) exp(-i xi_k . x).
struct SpectralScalar {
  Grid grid;
  Eigen::ArrayXcd coeffs;

  explicit SpectralScalar(const Grid& g) : grid(g), coeffs(Eigen::ArrayXcd::Zero(g.size())) {}
  SpectralScalar(const Grid& g, Eigen::ArrayXcd c);
};

struct SpectralVector {
  Grid grid;
  std::vector<Eigen::ArrayXcd> components;

  explicit SpectralVector(const Grid& g)
      : grid(g), components(g.dim(), Eigen::ArrayXcd::Zero(g.size())) {}
};

/// The perturbation unknowns (n, v) in Fourier space.
struct StateHat {
  SpectralScalar n;
  SpectralVector v;

  explicit StateHat(const Grid& g) : n(g), v(g) {}
  const Grid& grid() const { return n.grid; }
};

enum class HermitianCheck { enforce, skip };

/// FFT plans and wavenumbers for one grid. Transforms are const and may be
/// called concurrently; construction is not thread-safe (FFTW planner).
class Spectral {
 public:
  explicit Spectral(const Grid& grid);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  const Grid& grid() const { return waves_.grid; }
  const WavenumberTable& waves() const { return waves_; }

  /// In-place unnormalized transforms on N^d complex samples.
  void fft_forward(Complex* data) const;
  void fft_backward(Complex* data) const;

 private:
  WavenumberTable waves_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

/// Relative tolerance for the Hermitian-symmetry check of inverse_dft.
inline constexpr double kHermitianTolerance = 1e-10;

SpectralScalar forward_dft(const Spectral& sp, const ScalarField& f);
ScalarField inverse_dft(const Spectral& sp, const SpectralScalar& fh,
                        HermitianCheck check = HermitianCheck::enforce);

SpectralVector forward_dft(const Spectral& sp, const VectorField& f);
VectorField inverse_dft(const Spectral& sp, const SpectralVector& fh,
                        HermitianCheck check = HermitianCheck::enforce);

/// max |f(-j) - conj f(j)| / max |f|, 0 for the zero spectrum.
double hermitian_defect(const Grid& grid, const Eigen::ArrayXcd& coeffs);

/// Multiply by i xi_axis; Nyquist coefficients on that axis become zero.
SpectralScalar spectral_derivative(const Spectral& sp, const SpectralScalar& fh, int axis);
SpectralVector gradient(const Spectral& sp, const SpectralScalar& fh);
SpectralScalar divergence(const Spectral& sp, const SpectralVector& fh);
/// Multiply by -|xi|^2.
SpectralScalar laplacian(const Spectral& sp, const SpectralScalar& fh);

/// Zero every coefficient with some |j_axis| > N/3.
SpectralScalar dealias(const Spectral& sp, SpectralScalar fh);

/// (L^-d sum |xi|^(2k) |f_hat|^2)^(1/2), summed over components for vectors.
double sobolev_seminorm(const Spectral& sp, const SpectralScalar& fh, int k);
double sobolev_seminorm(const Spectral& sp, const SpectralVector& fh, int k);
double sobolev_seminorm(const Spectral& sp, const ScalarField& f, int k);
double sobolev_seminorm(const Spectral& sp, const VectorField& f, int k);

/// Squared seminorm without the square root; the building block of the above.
double sobolev_energy(const Spectral& sp, const Eigen::ArrayXcd& coeffs, int k);

/// Real-space (dx^d sum |f|^2)^(1/2).
double l2_norm(const ScalarField& f);
double linf_norm(const ScalarField& f);
/// dx^d sum f.
double integral(const ScalarField& f);

/// Pairwise summation with a fixed tree shape, independent of thread count.
double pairwise_sum(std::span<const double> values);
double pairwise_sum(const Eigen::ArrayXd& values);

}  // namespace chemo
