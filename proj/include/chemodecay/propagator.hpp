#pragma once

#include <filesystem>
#include <span>

#include "chemodecay/semigroup.hpp"
#include "chemodecay/spectral.hpp"

namespace chemo {

/// Ĝ(dt) for every mode of a grid, stored in factored form.
///
/// For a mode with diffusion weight s = |ξ|² and coupling vector k (the
/// derivative wavevector) the matrix is
///
///   [ nn            i u_bar psi2 kᵗ              ]
///   [ i psi2 k      transverse I + along k kᵗ    ]
///
/// so four reals per mode describe it completely.
struct PropagatorTable {
  Grid grid;
  double epsilon;
  double u_bar;
  double dt;
  Eigen::ArrayXd nn;
  Eigen::ArrayXd psi2;
  Eigen::ArrayXd transverse;
  /// (psi1 - ε s psi2 - transverse) / |k|², zero where k = 0.
  Eigen::ArrayXd along;

  ModeMatrix<double> mode_matrix(const WavenumberTable& waves, std::size_t mode) const;
};

PropagatorTable build_propagator(const Spectral& sp, double epsilon, double u_bar, double dt);

/// Left-multiply every mode's (n̂, v̂) by its matrix.
void apply_propagator_inplace(const PropagatorTable& table, const Spectral& sp, StateHat& u);
StateHat apply_propagator(const PropagatorTable& table, const Spectral& sp, StateHat u);

/// CSV of Ĝ(t, |ξ| e₁) over the given samples. Columns:
/// xi_abs, epsilon, t, then g<r><c>_re, g<r><c>_im for r, c = 0..d row-major.
void write_green_csv(const std::filesystem::path& path, int dim, std::span<const double> xi_abs,
                     std::span<const double> epsilons, std::span<const double> times,
                     double u_bar = 1.0);

}  // namespace chemo
