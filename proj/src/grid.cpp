#include "chemodecay/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace chemo {

Grid::Grid(int dim, int points, double length) : dim_(dim), points_(points), length_(length) {
  if (dim != 2 && dim != 3) {
    throw std::invalid_argument("grid: dim must be 2 or 3, got " + std::to_string(dim));
  }
  if (points < 8 || points % 2 != 0) {
    throw std::invalid_argument("grid: points per dim must be even and >= 8, got " +
                                std::to_string(points));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("grid: box length must be positive and finite");
  }
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(points);
}

double Grid::cell_volume() const { return std::pow(dx(), dim_); }

double Grid::box_volume() const { return std::pow(length_, dim_); }

double Grid::wavenumber(int signed_mode) const {
  return 2.0 * std::numbers::pi * signed_mode / length_;
}

std::array<int, 3> Grid::unravel(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  const auto n = static_cast<std::size_t>(points_);
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % n);
    flat /= n;
  }
  return idx;
}

std::size_t Grid::ravel(const std::array<int, 3>& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) flat = flat * points_ + idx[a];
  return flat;
}

std::size_t Grid::conjugate_index(std::size_t flat) const {
  auto idx = unravel(flat);
  for (int a = 0; a < dim_; ++a) idx[a] = (points_ - idx[a]) % points_;
  return ravel(idx);
}

WavenumberTable::WavenumberTable(const Grid& g) : grid(g) {
  const std::size_t size = g.size();
  const int n = g.points();
  xi2 = Eigen::ArrayXd::Zero(size);
  kd.assign(g.dim(), Eigen::ArrayXd::Zero(size));
  dealias_mask = Eigen::ArrayXd::Ones(size);

  std::vector<double> k1(n), kd1(n);
  std::vector<bool> keep(n);
  for (int i = 0; i < n; ++i) {
    const int j = g.signed_mode(i);
    k1[i] = g.wavenumber(j);
    kd1[i] = (j == -n / 2) ? 0.0 : k1[i];
    keep[i] = 3 * std::abs(j) <= n;
  }
  for (std::size_t f = 0; f < size; ++f) {
    const auto idx = g.unravel(f);
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      s += k1[idx[a]] * k1[idx[a]];
      kd[a][f] = kd1[idx[a]];
      if (!keep[idx[a]]) dealias_mask[f] = 0.0;
    }
    xi2[f] = s;
  }
}

Eigen::VectorXd WavenumberTable::xi(std::size_t flat) const {
  const auto idx = grid.unravel(flat);
  Eigen::VectorXd v(grid.dim());
  for (int a = 0; a < grid.dim(); ++a) v[a] = grid.wavenumber(grid.signed_mode(idx[a]));
  return v;
}

Eigen::VectorXd WavenumberTable::derivative_xi(std::size_t flat) const {
  Eigen::VectorXd v(grid.dim());
  for (int a = 0; a < grid.dim(); ++a) v[a] = kd[a][flat];
  return v;
}

}  // namespace chemo
