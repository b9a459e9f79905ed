#include "chemodecay/oracle_suites.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "chemodecay/semigroup.hpp"

namespace chemo {

namespace {

using Vec = WaveVector<double>;
using Mat = ModeMatrix<double>;

constexpr double kEpsilons[] = {0.0, 0.5, 1.0, 2.0};

// A fixed non-axis direction, so that every component of the coupling is active.
Vec oblique(int dim, double magnitude) {
  Vec xi(dim);
  for (int a = 0; a < dim; ++a) xi[a] = 1.0 + 0.37 * a;
  return xi.normalized() * magnitude;
}

double lattice_magnitude(int i, int count) {
  return std::pow(10.0, -3.0 + 5.0 * i / (count - 1));
}

}  // namespace

double oracle_lattice_error() {
  double worst = 0.0;
  for (int dim : {2, 3}) {
    for (double eps : kEpsilons) {
      for (int i = 0; i < 60; ++i) {
        const Vec xi = oblique(dim, lattice_magnitude(i, 60));
        for (double t : {0.01, 1.0, 10.0}) {
          const Mat G = green_hat(t, xi, eps);
          const Mat O = matrix_exp_oracle(generator(xi, eps), t);
          worst = std::max(worst, relative_max_error(G, O));
        }
      }
    }
  }
  return worst;
}

double semigroup_law_error(int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logmag(-3.0, 2.0), time(0.0, 5.0), eps_dist(0.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vec xi = oblique(2 + i % 2, std::pow(10.0, logmag(rng)));
    const double eps = eps_dist(rng), t = time(rng), s = time(rng);
    const Mat lhs = green_hat(t + s, xi, eps);
    worst = std::max(worst,
                     relative_max_error((green_hat(t, xi, eps) * green_hat(s, xi, eps)).eval(), lhs));
  }
  return worst;
}

SuiteResult semigroup_suite() {
  const double lattice = oracle_lattice_error();
  const double law = semigroup_law_error(1000, 2024);
  SuiteResult r;
  r.name = "semigroup";
  r.metric = "max relative error";
  r.value = std::max(lattice, law);
  r.passed = lattice <= 1e-9 && law <= 1e-9;
  std::ostringstream d;
  d << "oracle lattice " << lattice << " (1440 points), semigroup law " << law
    << " (1000 samples), threshold 1e-09";
  r.detail = d.str();
  return r;
}

SuiteResult projector_suite() {
  double worst = 0.0;
  int skipped = 0, used = 0;
  for (int dim : {2, 3}) {
    for (double eps : kEpsilons) {
      for (int i = 0; i < 60; ++i) {
        const Vec xi = oblique(dim, lattice_magnitude(i, 60));
        Projectors<double> P;
        try {
          P = spectral_projectors(xi, eps);
        } catch (const EigenvalueCollision&) {
          ++skipped;
          continue;
        }
        ++used;
        const Mat I = Mat::Identity(dim + 1, dim + 1);
        worst = std::max(worst, (P.p0 + P.p_plus + P.p_minus - I).cwiseAbs().maxCoeff());
      }
    }
  }
  SuiteResult r;
  r.name = "projector";
  r.metric = "max |P0 + P+ + P- - I|";
  r.value = worst;
  r.passed = used > 0 && worst <= 1e-12;
  std::ostringstream d;
  d << used << " lattice points, " << skipped << " skipped at eigenvalue collisions, threshold 1e-12";
  r.detail = d.str();
  return r;
}

SuiteResult generator_suite() {
  double furthest = 2.0;
  double lo = 2.0, hi = 2.0;
  int checked = 0;
  for (int dim : {2, 3}) {
    for (double eps : kEpsilons) {
      for (int i = 0; i < 60; i += 5) {
        const Vec xi = oblique(dim, lattice_magnitude(i, 60));
        const Mat A = generator(xi, eps);
        const Mat I = Mat::Identity(dim + 1, dim + 1);
        const double scale = A.cwiseAbs().colwise().sum().maxCoeff();
        auto err = [&](double h) {
          return ((green_hat(h, xi, eps) - I) / h - A).cwiseAbs().maxCoeff();
        };
        const double h = 1e-2 / scale;
        for (double hh : {h, h / 2}) {
          const double ratio = err(hh) / err(hh / 2);
          lo = std::min(lo, ratio);
          hi = std::max(hi, ratio);
          if (std::abs(ratio - 2.0) > std::abs(furthest - 2.0)) furthest = ratio;
          ++checked;
        }
      }
    }
  }
  SuiteResult r;
  r.name = "generator";
  r.metric = "halving ratio furthest from 2";
  r.value = furthest;
  r.passed = lo >= 1.7 && hi <= 2.3;
  std::ostringstream d;
  d << checked << " ratios in [" << lo << ", " << hi << "], accepted range [1.7, 2.3]";
  r.detail = d.str();
  return r;
}

std::vector<std::string> suite_names() { return {"semigroup", "projector", "generator"}; }

std::vector<SuiteResult> run_suites(const std::string& selector) {
  if (selector == "all") return {semigroup_suite(), projector_suite(), generator_suite()};
  if (selector == "semigroup") return {semigroup_suite()};
  if (selector == "projector") return {projector_suite()};
  if (selector == "generator") return {generator_suite()};
  throw std::invalid_argument("unknown suite '" + selector +
                              "' (expected semigroup, projector, generator or all)");
}

}  // namespace chemo
