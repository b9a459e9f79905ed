#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "chemodecay/semigroup.hpp"

using namespace chemo;
using Vec = WaveVector<double>;
using Mat = ModeMatrix<double>;

namespace {

Vec axis_vector(int dim, double magnitude) {
  Vec xi = Vec::Zero(dim);
  xi[0] = magnitude;
  return xi;
}

Vec oblique_vector(int dim, double magnitude) {
  Vec xi(dim);
  for (int a = 0; a < dim; ++a) xi[a] = 1.0 + 0.37 * a;
  return xi.normalized() * magnitude;
}

// Independent root finder for λ² + (1+ε)s λ + εs² + u s = 0.
std::pair<std::complex<double>, std::complex<double>> quadratic_roots(double s, double eps,
                                                                      double u_bar = 1.0) {
  const std::complex<double> b = (1 + eps) * s;
  const std::complex<double> c = eps * s * s + u_bar * s;
  const auto root = std::sqrt(b * b - 4.0 * c);
  return {(-b + root) / 2.0, (-b - root) / 2.0};
}

}  // namespace

TEST_CASE("char_eigenvalues: zero frequency is critical with all roots at zero") {
  const auto e = char_eigenvalues(0.0, 0.7);
  CHECK(e.lambda0 == 0.0);
  CHECK(std::abs(e.lambda_plus) == 0.0);
  CHECK(std::abs(e.lambda_minus) == 0.0);
  CHECK(e.regime == Regime::critical);
}

TEST_CASE("char_eigenvalues: matches the quadratic formula") {
  SUBCASE("xi2 = 1, eps = 1: roots -1 +- i") {
    const auto e = char_eigenvalues(1.0, 1.0);
    CHECK(e.lambda0 == doctest::Approx(-1.0));
    CHECK(e.lambda_plus.real() == doctest::Approx(-1.0));
    CHECK(std::abs(e.lambda_plus.imag()) == doctest::Approx(1.0));
    CHECK(e.regime == Regime::oscillatory);
  }
  SUBCASE("xi2 = 1, eps = 0: roots -1/2 +- i sqrt(3)/2") {
    const auto e = char_eigenvalues(1.0, 0.0);
    CHECK(e.lambda0 == 0.0);
    CHECK(e.lambda_plus.real() == doctest::Approx(-0.5));
    CHECK(std::abs(e.lambda_plus.imag()) == doctest::Approx(std::sqrt(3.0) / 2));
  }
  SUBCASE("eps = 1 gives gap sqrt(xi2) for every xi2") {
    for (double xi2 : {1e-6, 0.01, 1.0, 37.0, 1e4}) {
      const auto e = char_eigenvalues(xi2, 1.0);
      CHECK(e.gap == doctest::Approx(std::sqrt(xi2)).epsilon(1e-14));
      CHECK(e.regime == Regime::oscillatory);
    }
  }
}

TEST_CASE("char_eigenvalues: Vieta relations and stability over a lattice") {
  for (double eps : {0.0, 0.3, 1.0, 2.5, 7.0}) {
    for (double logs = -6; logs <= 4; logs += 0.25) {
      const double s = std::pow(10.0, logs);
      const auto e = char_eigenvalues(s, eps);
      const auto sum = e.lambda_plus + e.lambda_minus;
      const auto prod = e.lambda_plus * e.lambda_minus;
      if (e.regime != Regime::critical) {
        CHECK(std::abs(sum + (1 + eps) * s) <= 1e-12 * (1 + eps) * s);
        CHECK(std::abs(prod - (eps * s * s + s)) <= 1e-12 * (eps * s * s + s));
      }
      CHECK(e.lambda_plus.real() <= 0.0);
      CHECK(e.lambda_minus.real() <= 0.0);
      const auto [r1, r2] = quadratic_roots(s, eps);
      const double scale = std::max(std::abs(r1), std::abs(r2));
      const double match = std::min(std::abs(e.lambda_plus - r1) + std::abs(e.lambda_minus - r2),
                                    std::abs(e.lambda_plus - r2) + std::abs(e.lambda_minus - r1));
      CHECK(match <= 1e-6 * scale);
      // Oscillatory exactly when the discriminant of the quadratic is negative.
      const double disc = (1 + eps) * (1 + eps) * s * s - 4 * (eps * s * s + s);
      if (std::abs(disc) > 1e-9 * s) CHECK((e.regime == Regime::oscillatory) == (disc < 0));
    }
  }
}

TEST_CASE("psi_functions: identity at t = 0") {
  for (double eps : {0.0, 1.0, 3.0}) {
    for (double xi2 : {0.0, 1e-4, 1.0, 1e3}) {
      const auto p = psi_functions(0.0, xi2, eps);
      CHECK(p.psi1 == 1.0);
      CHECK(p.psi2 == 0.0);
    }
  }
}

TEST_CASE("psi_functions: xi2 = 1, eps = 1, t = 1 closed form") {
  const auto p = psi_functions(1.0, 1.0, 1.0);
  CHECK(p.psi1 == doctest::Approx(std::exp(-1.0) * (std::cos(1.0) + std::sin(1.0))).epsilon(1e-15));
  CHECK(p.psi2 == doctest::Approx(std::exp(-1.0) * std::sin(1.0)).epsilon(1e-15));
}

TEST_CASE("psi_functions: repeated-root limit") {
  // eps = 3: b² = s - s², so s = 1 is the double root with a = -2.
  const double s = 1.0, eps = 3.0;
  for (double t : {0.1, 1.0, 4.0}) {
    const auto p = psi_functions(t, s, eps);
    const double a = -2.0;
    CHECK(p.psi2 == doctest::Approx(t * std::exp(a * t)).epsilon(1e-13));
    CHECK(p.psi1 == doctest::Approx((1 - a * t) * std::exp(a * t)).epsilon(1e-13));
  }
}

TEST_CASE("psi_functions: symmetric in the eigenvalue labels") {
  for (double eps : {0.0, 0.5, 2.0}) {
    for (double s : {0.01, 0.5, 3.0, 50.0}) {
      const auto e = char_eigenvalues(s, eps);
      if (e.regime == Regime::critical) continue;
      for (double t : {0.3, 2.0}) {
        const auto fwd = psi_from_eigenvalues(t, e.lambda_plus, e.lambda_minus);
        const auto rev = psi_from_eigenvalues(t, e.lambda_minus, e.lambda_plus);
        CHECK(fwd.first == rev.first);
        CHECK(fwd.second == rev.second);
        const auto p = psi_functions(t, s, eps);
        CHECK(std::abs(fwd.first - p.psi1) <= 1e-10 * (1 + std::abs(p.psi1)));
        CHECK(std::abs(fwd.second - p.psi2) <= 1e-10 * (1 + std::abs(p.psi2)));
      }
    }
  }
}

TEST_CASE("psi_functions: smooth across the series switch") {
  // The branches meet at |b t| = 1e-4; t itself moves by 2e-9 across the switch.
  const double s = 1e-6, eps = 0.0;
  const double b = std::sqrt(char_eigenvalues(s, eps).gap_squared);
  const double t_switch = kSeriesThreshold / b;
  const auto below = psi_functions(t_switch * (1 - 1e-9), s, eps);
  const auto above = psi_functions(t_switch * (1 + 1e-9), s, eps);
  CHECK(below.psi1 == doctest::Approx(above.psi1).epsilon(1e-8));
  CHECK(below.psi2 == doctest::Approx(above.psi2).epsilon(1e-8));
}

TEST_CASE("matrix_exp_oracle: elementary cases") {
  SUBCASE("zero matrix") {
    const Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    CHECK((matrix_exp_oracle(A, 2.0) - Eigen::Matrix3d::Identity()).norm() == 0.0);
  }
  SUBCASE("diagonal") {
    Eigen::Matrix3d A = Eigen::Vector3d(-1.0, 0.5, -30.0).asDiagonal();
    const auto E = matrix_exp_oracle(A, 1.5);
    CHECK(E(0, 0) == doctest::Approx(std::exp(-1.5)).epsilon(1e-14));
    CHECK(E(1, 1) == doctest::Approx(std::exp(0.75)).epsilon(1e-14));
    CHECK(E(2, 2) == doctest::Approx(std::exp(-45.0)).epsilon(1e-12));
    CHECK(E(0, 1) == 0.0);
  }
  SUBCASE("nilpotent") {
    Eigen::Matrix2d A;
    A << 0, 1, 0, 0;
    const auto E = matrix_exp_oracle(A, 1.0);
    CHECK(E(0, 0) == 1.0);
    CHECK(E(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(E(1, 0) == 0.0);
    CHECK(E(1, 1) == 1.0);
  }
  SUBCASE("agrees with Eigen's Pade-based exponential") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    Eigen::Matrix4d A;
    for (int i = 0; i < 16; ++i) A(i / 4, i % 4) = normal(rng);
    const Eigen::Matrix4d ref = (A * 3.0).exp();
    CHECK(relative_max_error(matrix_exp_oracle(A, 3.0), ref) <= 1e-12);
  }
  SUBCASE("rejects absurd norms") {
    Eigen::Matrix2d A = Eigen::Matrix2d::Identity() * 1e13;
    CHECK_THROWS_AS(matrix_exp_oracle(A, 1.0), std::overflow_error);
  }
}

TEST_CASE("green_hat: identity cases") {
  for (int dim : {2, 3}) {
    const Mat I = Mat::Identity(dim + 1, dim + 1);
    CHECK(relative_max_error(green_hat(0.0, oblique_vector(dim, 2.0), 0.5), I) == 0.0);
    CHECK(relative_max_error(green_hat(7.0, Vec::Zero(dim).eval(), 0.5), I) == 0.0);
  }
}

TEST_CASE("green_hat: xi = (1,0), eps = 1 against the oracle") {
  const Vec xi = axis_vector(2, 1.0);
  for (double t : {0.1, 1.0, 10.0}) {
    const Mat G = green_hat(t, xi, 1.0);
    const Mat O = matrix_exp_oracle(generator(xi, 1.0), t);
    CHECK(relative_max_error(G, O) <= 1e-10);
  }
}

TEST_CASE("green_hat: oracle equivalence over the log-spaced lattice") {
  double worst = 0.0;
  for (int dim : {2, 3}) {
    for (double eps : {0.0, 0.5, 1.0, 2.0}) {
      for (int i = 0; i < 60; ++i) {
        const double mag = std::pow(10.0, -3.0 + 5.0 * i / 59.0);
        const Vec xi = oblique_vector(dim, mag);
        for (double t : {0.01, 1.0, 10.0}) {
          const Mat G = green_hat(t, xi, eps);
          const Mat O = matrix_exp_oracle(generator(xi, eps), t);
          worst = std::max(worst, relative_max_error(G, O));
        }
      }
    }
  }
  MESSAGE("max relative error " << worst);
  CHECK(worst <= 1e-9);
}

TEST_CASE("green_hat: long double evaluation agrees") {
  for (double eps : {0.0, 0.5, 3.0}) {
    for (double mag : {1e-3, 0.3, 1.0, 8.0}) {
      const Vec xi = oblique_vector(3, mag);
      const WaveVector<long double> xil = xi.cast<long double>();
      const Mat G = green_hat(2.0, xi, eps);
      const auto Gl = green_hat<long double>(2.0L, xil, static_cast<long double>(eps));
      CHECK(relative_max_error(G, Gl.cast<std::complex<double>>().eval()) <= 1e-13);
    }
  }
}

TEST_CASE("green_hat: general u_bar against the oracle") {
  for (double u_bar : {0.5, 2.0}) {
    for (double mag : {1e-2, 0.7, 5.0}) {
      const Vec xi = oblique_vector(2, mag);
      const Mat G = green_hat(1.3, xi, 0.4, u_bar);
      const Mat O = matrix_exp_oracle(generator(xi, 0.4, u_bar), 1.3);
      CHECK(relative_max_error(G, O) <= 1e-10);
    }
  }
}

TEST_CASE("green_hat: real similarity route agrees") {
  // With v = i w the symbol becomes the real matrix [[-s, -ξᵗ], [ξ, -εs I]].
  const Vec xi = oblique_vector(3, 0.8);
  const double eps = 0.5, t = 2.0, s = xi.squaredNorm();
  Eigen::Matrix4d R = Eigen::Matrix4d::Zero();
  R(0, 0) = -s;
  for (int a = 0; a < 3; ++a) {
    R(0, a + 1) = -xi[a];
    R(a + 1, 0) = xi[a];
    R(a + 1, a + 1) = -eps * s;
  }
  const Eigen::Matrix4d Er = matrix_exp_oracle(R, t);
  Eigen::Vector4cd D;
  D << 1.0, std::complex<double>(0, 1), std::complex<double>(0, 1), std::complex<double>(0, 1);
  const Eigen::Matrix4cd viaReal = D.asDiagonal() * Er.cast<std::complex<double>>() *
                                   D.cwiseInverse().asDiagonal();
  CHECK(relative_max_error(green_hat(t, xi, eps), viaReal) <= 1e-12);
}

TEST_CASE("spectral_projectors: resolution of identity and idempotence") {
  const Vec xi = axis_vector(2, 1.0);
  const auto P = spectral_projectors(xi, 1.0);
  const Mat I = Mat::Identity(3, 3);
  CHECK((P.p0 + P.p_plus + P.p_minus - I).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((P.p0 * P.p0 - P.p0).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((P.p_plus * P.p_plus - P.p_plus).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((P.p_minus * P.p_minus - P.p_minus).cwiseAbs().maxCoeff() <= 1e-10);
  const Mat A = generator(xi, 1.0);
  const Mat recon = P.eigen.lambda0 * P.p0 + P.eigen.lambda_plus * P.p_plus +
                    P.eigen.lambda_minus * P.p_minus;
  CHECK((recon - A).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("spectral_projectors: exponential reconstruction matches green_hat") {
  for (double eps : {0.0, 0.5, 2.0}) {
    for (double mag : {0.05, 0.9, 3.0}) {
      const Vec xi = oblique_vector(3, mag);
      const auto P = spectral_projectors(xi, eps);
      const double t = 1.7;
      const Mat E = std::exp(P.eigen.lambda0 * t) * P.p0 +
                    std::exp(P.eigen.lambda_plus * t) * P.p_plus +
                    std::exp(P.eigen.lambda_minus * t) * P.p_minus;
      CHECK(relative_max_error(E, green_hat(t, xi, eps)) <= 1e-8);
    }
  }
}

TEST_CASE("spectral_projectors: collision at the critical frequency") {
  // eps = 3 has a double root λ₊ = λ₋ at |ξ|² = 1.
  CHECK_THROWS_AS(spectral_projectors(axis_vector(2, 1.0), 3.0), EigenvalueCollision);
  CHECK_NOTHROW(spectral_projectors(axis_vector(2, 0.5), 3.0));
  CHECK_THROWS_AS(spectral_projectors(Vec::Zero(2).eval(), 1.0), std::invalid_argument);
}

TEST_CASE("semigroup law over random samples") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> logmag(-3.0, 2.0), time(0.0, 5.0), eps_dist(0.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int dim = 2 + i % 2;
    const Vec xi = oblique_vector(dim, std::pow(10.0, logmag(rng)));
    const double eps = eps_dist(rng), t = time(rng), s = time(rng);
    const Mat lhs = green_hat(t + s, xi, eps);
    const Mat rhs = green_hat(t, xi, eps) * green_hat(s, xi, eps);
    worst = std::max(worst, relative_max_error(rhs, lhs));
  }
  MESSAGE("max semigroup defect " << worst);
  CHECK(worst <= 1e-9);
}

TEST_CASE("generator consistency: first-order difference quotient") {
  for (double eps : {0.0, 1.0}) {
    const Vec xi = oblique_vector(2, 0.7);
    const Mat A = generator(xi, eps);
    const Mat I = Mat::Identity(3, 3);
    auto err = [&](double h) { return ((green_hat(h, xi, eps) - I) / h - A).cwiseAbs().maxCoeff(); };
    const double ratio = err(1e-3) / err(5e-4);
    CHECK(ratio >= 1.7);
    CHECK(ratio <= 2.3);
  }
}

TEST_CASE("green_hat: bounded entries on the stability lattice") {
  double worst = 0.0;
  for (double eps : {0.0, 1e-3, 0.5, 0.999, 1.0, 1.001, 2.0, 3.0}) {
    for (double logs = -6; logs <= 4; logs += 0.01) {
      const Vec xi = axis_vector(2, std::pow(10.0, logs / 2));
      for (double t : {0.0, 0.01, 1.0, 100.0, 1e4}) {
        const Mat G = green_hat(t, xi, eps);
        REQUIRE(G.allFinite());
        worst = std::max(worst, G.cwiseAbs().maxCoeff());
      }
    }
  }
  CHECK(worst <= 2.0);
}
