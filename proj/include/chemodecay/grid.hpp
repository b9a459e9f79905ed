#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace chemo {

/// Periodic box [0, L)^d sampled with N points per axis, d in {2, 3}.
///
/// Grid points are x_j = j * dx with dx = L / N. Fields are stored row-major
/// with axis 0 varying slowest. Spectral coefficients use the same storage
/// layout; storage index i on an axis holds the signed mode j = i for
/// i < N/2 and j = i - N otherwise, so the modes cover [-N/2, N/2).
class Grid {
 public:
  Grid(int dim, int points, double length);

  int dim() const { return dim_; }
  int points() const { return points_; }
  double length() const { return length_; }
  double dx() const { return length_ / points_; }

  /// Number of samples, N^d.
  std::size_t size() const { return size_; }
  /// dx^d, the quadrature weight of one grid point.
  double cell_volume() const;
  /// L^d.
  double box_volume() const;

  int signed_mode(int storage_index) const {
    return storage_index < points_ / 2 ? storage_index : storage_index - points_;
  }
  int storage_index(int signed_mode) const {
    return signed_mode >= 0 ? signed_mode : signed_mode + points_;
  }
  double wavenumber(int signed_mode) const;

  /// Per-axis storage indices of a flat index (unused trailing entries are 0).
  std::array<int, 3> unravel(std::size_t flat) const;
  std::size_t ravel(const std::array<int, 3>& idx) const;
  /// Flat index of the mode -j given the flat index of j.
  std::size_t conjugate_index(std::size_t flat) const;

  bool operator==(const Grid& other) const = default;

 private:
  int dim_;
  int points_;
  double length_;
  std::size_t size_;
};

/// Per-mode wavenumber data shared by all spectral operations on one grid.
struct WavenumberTable {
  explicit WavenumberTable(const Grid& grid);

  Grid grid;
  /// |xi|^2 using the true wavevector (the Nyquist component is -pi N / L).
  Eigen::ArrayXd xi2;
  /// Odd-derivative multipliers per axis: xi_axis, zeroed where j_axis = -N/2.
  std::vector<Eigen::ArrayXd> kd;
  /// 1 where every |j_axis| <= N/3, 0 otherwise (2/3 rule).
  Eigen::ArrayXd dealias_mask;

  /// True wavevector of a mode.
  Eigen::VectorXd xi(std::size_t flat) const;
  /// Derivative wavevector of a mode (Nyquist components zeroed).
  Eigen::VectorXd derivative_xi(std::size_t flat) const;
};

}  // namespace chemo
