#pragma once

// Closed-form linearised propagator of the perturbation system
//
//   n_t - Δn - u_bar div v = 0,   v_t - εΔv - ∇n = 0
//
// per Fourier mode. With symbol A(ξ) = [[-|ξ|², i u_bar ξᵗ], [i ξ, -ε|ξ|² I]]
// the eigenvalues are λ0 = -ε|ξ|² (multiplicity d-1, the curl part) and the
// roots λ± of λ² + (1+ε)|ξ|²λ + ε|ξ|⁴ + u_bar|ξ|². Everything here is written
// for a general "mode symbol" (s, k): s is the diffusion weight and k the
// coupling vector. The continuum case is s = |ξ|², k = ξ; on the grid k is
// the derivative wavevector, whose Nyquist components vanish.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace chemo {

enum class Regime { oscillatory, critical, monotone };

/// Relative width of the discriminant band labelled critical.
inline constexpr double kCriticalBand = 1e-12;
/// |b t| below which sin(bt)/b and cos(bt) use their Taylor series.
inline constexpr double kSeriesThreshold = 1e-4;
/// Relative eigenvalue separation required by spectral_projectors.
inline constexpr double kProjectorSeparation = 1e-8;

template <typename Scalar>
using ModeMatrix =
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 4, 4>;
template <typename Scalar>
using WaveVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

template <typename Scalar>
struct EigenTriple {
  Scalar lambda0;
  std::complex<Scalar> lambda_plus;
  std::complex<Scalar> lambda_minus;
  /// Common real part -(1+ε)s/2 of λ±.
  Scalar a;
  /// Signed squared gap b² = u_bar q - (1-ε)² s²/4; λ± = a ± i b when positive.
  Scalar gap_squared;
  /// sqrt(|b²|).
  Scalar gap;
  Regime regime;
};

template <typename Scalar>
struct PsiPair {
  /// (λ₊e^{λ₋t} - λ₋e^{λ₊t}) / (λ₊ - λ₋)
  Scalar psi1;
  /// (e^{λ₊t} - e^{λ₋t}) / (λ₊ - λ₋)
  Scalar psi2;
};

class EigenvalueCollision : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

template <typename Scalar>
EigenTriple<Scalar> mode_eigenvalues(Scalar s, Scalar q, Scalar epsilon, Scalar u_bar) {
  using std::abs;
  using std::sqrt;
  EigenTriple<Scalar> e{};
  e.lambda0 = -epsilon * s;
  e.a = -(1 + epsilon) * s / 2;
  const Scalar coupling = u_bar * q;
  const Scalar spread = (1 - epsilon) * (1 - epsilon) * s * s / 4;
  e.gap_squared = coupling - spread;
  e.gap = sqrt(abs(e.gap_squared));
  if (abs(e.gap_squared) <= Scalar(kCriticalBand) * (coupling + spread)) {
    e.regime = Regime::critical;
    e.lambda_plus = e.lambda_minus = std::complex<Scalar>(e.a, 0);
  } else if (e.gap_squared > 0) {
    e.regime = Regime::oscillatory;
    e.lambda_plus = {e.a, e.gap};
    e.lambda_minus = {e.a, -e.gap};
  } else {
    // λ₊ is the slow root. a - gap has no cancellation; the other root
    // follows from the product λ₊λ₋ = εs² + u_bar q.
    e.regime = Regime::monotone;
    const Scalar fast = e.a - e.gap;
    const Scalar product = epsilon * s * s + coupling;
    e.lambda_minus = {fast, 0};
    e.lambda_plus = {fast != 0 ? product / fast : Scalar(0), 0};
  }
  return e;
}

/// Eigenvalues of A(ξ) from |ξ|² alone.
template <typename Scalar>
EigenTriple<Scalar> char_eigenvalues(Scalar xi2, Scalar epsilon, Scalar u_bar = Scalar(1)) {
  return mode_eigenvalues(xi2, xi2, epsilon, u_bar);
}

template <typename Scalar>
PsiPair<Scalar> mode_psi(Scalar t, Scalar s, Scalar q, Scalar epsilon, Scalar u_bar) {
  using std::abs;
  using std::cos;
  using std::exp;
  using std::expm1;
  using std::sin;
  using std::sqrt;
  const Scalar a = -(1 + epsilon) * s / 2;
  const Scalar b2 = u_bar * q - (1 - epsilon) * (1 - epsilon) * s * s / 4;
  const Scalar z = b2 * t * t;
  const Scalar threshold = Scalar(kSeriesThreshold) * Scalar(kSeriesThreshold);
  if (abs(z) < threshold) {
    // sin(bt)/b and cos(bt) are even in b: expand in z = b²t², which also
    // covers sinh/cosh when b² < 0.
    const Scalar sinc_t = t * (1 - z / 6 + z * z / 120);
    const Scalar cos_t = 1 - z / 2 + z * z / 24;
    const Scalar ea = exp(a * t);
    return {ea * (cos_t - a * sinc_t), ea * sinc_t};
  }
  if (b2 > 0) {
    const Scalar b = sqrt(b2);
    const Scalar ea = exp(a * t);
    const Scalar sinc_t = sin(b * t) / b;
    return {ea * (cos(b * t) - a * sinc_t), ea * sinc_t};
  }
  const Scalar beta = sqrt(-b2);
  const Scalar fast = a - beta;
  const Scalar slow = (epsilon * s * s + u_bar * q) / fast;
  const Scalar es = exp(slow * t);
  const Scalar decay = exp(-2 * beta * t);
  return {es * (slow * decay - fast) / (2 * beta), es * (-expm1(-2 * beta * t)) / (2 * beta)};
}

template <typename Scalar>
PsiPair<Scalar> psi_functions(Scalar t, Scalar xi2, Scalar epsilon, Scalar u_bar = Scalar(1)) {
  if (t < 0) throw std::invalid_argument("psi_functions: negative time");
  return mode_psi(t, xi2, xi2, epsilon, u_bar);
}

/// Direct evaluation of the ψ quotients from a given eigenvalue labelling.
/// Requires λ₊ != λ₋; used to check labelling symmetry.
template <typename Scalar>
std::pair<std::complex<Scalar>, std::complex<Scalar>> psi_from_eigenvalues(
    Scalar t, std::complex<Scalar> lambda_plus, std::complex<Scalar> lambda_minus) {
  const auto ep = std::exp(lambda_plus * t);
  const auto em = std::exp(lambda_minus * t);
  const auto den = lambda_plus - lambda_minus;
  return {(lambda_plus * em - lambda_minus * ep) / den, (ep - em) / den};
}

template <typename Scalar>
ModeMatrix<Scalar> mode_generator(Scalar s, const WaveVector<Scalar>& k, Scalar epsilon,
                                  Scalar u_bar) {
  using C = std::complex<Scalar>;
  const auto d = k.size();
  ModeMatrix<Scalar> A = ModeMatrix<Scalar>::Zero(d + 1, d + 1);
  A(0, 0) = -s;
  for (Eigen::Index i = 0; i < d; ++i) {
    A(0, i + 1) = C(0, u_bar * k[i]);
    A(i + 1, 0) = C(0, k[i]);
    A(i + 1, i + 1) = -epsilon * s;
  }
  return A;
}

/// A(ξ) for the continuum symbol.
template <typename Scalar>
ModeMatrix<Scalar> generator(const WaveVector<Scalar>& xi, Scalar epsilon,
                             Scalar u_bar = Scalar(1)) {
  return mode_generator<Scalar>(xi.squaredNorm(), xi, epsilon, u_bar);
}

template <typename Scalar>
ModeMatrix<Scalar> mode_propagator(Scalar t, Scalar s, const WaveVector<Scalar>& k,
                                   Scalar epsilon, Scalar u_bar) {
  using C = std::complex<Scalar>;
  using std::exp;
  const auto d = k.size();
  const Scalar q = k.squaredNorm();
  const auto psi = mode_psi(t, s, q, epsilon, u_bar);
  const Scalar transverse = exp(-epsilon * s * t);
  const Scalar longitudinal = psi.psi1 - epsilon * s * psi.psi2;
  ModeMatrix<Scalar> G(d + 1, d + 1);
  G(0, 0) = psi.psi1 - s * psi.psi2;
  for (Eigen::Index i = 0; i < d; ++i) {
    G(0, i + 1) = C(0, u_bar * psi.psi2 * k[i]);
    G(i + 1, 0) = C(0, psi.psi2 * k[i]);
    for (Eigen::Index j = 0; j < d; ++j) {
      const Scalar proj = q > 0 ? k[i] * k[j] / q : Scalar(0);
      G(i + 1, j + 1) = (i == j ? transverse : Scalar(0)) + proj * (longitudinal - transverse);
    }
  }
  return G;
}

/// Ĝ(t, ξ) = e^{tA(ξ)}; the identity at ξ = 0.
template <typename Scalar>
ModeMatrix<Scalar> green_hat(Scalar t, const WaveVector<Scalar>& xi, Scalar epsilon,
                             Scalar u_bar = Scalar(1)) {
  if (t < 0) throw std::invalid_argument("green_hat: negative time");
  return mode_propagator<Scalar>(t, xi.squaredNorm(), xi, epsilon, u_bar);
}

template <typename Scalar>
struct Projectors {
  ModeMatrix<Scalar> p0;
  ModeMatrix<Scalar> p_plus;
  ModeMatrix<Scalar> p_minus;
  EigenTriple<Scalar> eigen;
};

/// Lagrange projectors onto the eigenspaces of λ0, λ₊, λ₋.
template <typename Scalar>
Projectors<Scalar> spectral_projectors(const WaveVector<Scalar>& xi, Scalar epsilon,
                                       Scalar u_bar = Scalar(1)) {
  using C = std::complex<Scalar>;
  using std::abs;
  using std::max;
  const Scalar xi2 = xi.squaredNorm();
  if (!(xi2 > 0)) throw std::invalid_argument("spectral_projectors: requires |xi| > 0");
  const auto e = char_eigenvalues(xi2, epsilon, u_bar);
  const C l0(e.lambda0, 0);
  const C lambdas[3] = {l0, e.lambda_plus, e.lambda_minus};
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const Scalar scale = max(abs(lambdas[i]), abs(lambdas[j]));
      if (abs(lambdas[i] - lambdas[j]) <= Scalar(kProjectorSeparation) * scale) {
        throw EigenvalueCollision("spectral_projectors: eigenvalues collide at |xi|^2 = " +
                                  std::to_string(static_cast<double>(xi2)));
      }
    }
  }
  const ModeMatrix<Scalar> A = generator<Scalar>(xi, epsilon, u_bar);
  const auto I = ModeMatrix<Scalar>::Identity(A.rows(), A.cols());
  auto lagrange = [&](int i) {
    ModeMatrix<Scalar> P = I;
    for (int j = 0; j < 3; ++j) {
      if (j != i) P = (P * (A - lambdas[j] * I)) / (lambdas[i] - lambdas[j]);
    }
    return P;
  };
  return {lagrange(0), lagrange(1), lagrange(2), e};
}

/// e^{tA} by scaling and squaring around a truncated Taylor series.
/// Works for real and complex matrices; intended as a test oracle.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix_exp_oracle(
    const Eigen::MatrixBase<Derived>& A, typename Eigen::NumTraits<typename Derived::Scalar>::Real t) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using std::ceil;
  using std::ldexp;
  using std::log2;
  if (A.rows() != A.cols()) throw std::invalid_argument("matrix_exp_oracle: matrix not square");
  Matrix M = A * Scalar(t);
  if (!M.allFinite()) throw std::domain_error("matrix_exp_oracle: non-finite entries");
  const Real norm = M.cwiseAbs().colwise().sum().maxCoeff();
  if (norm > Real(1e12)) {
    throw std::overflow_error("matrix_exp_oracle: ||tA|| too large for scaling and squaring");
  }
  int squarings = 0;
  if (norm > Real(0.5)) squarings = static_cast<int>(ceil(log2(norm / Real(0.5))));
  M *= Scalar(ldexp(Real(1), -squarings));

  const auto n = A.rows();
  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 60; ++k) {
    term = (term * M) / Scalar(Real(k));
    result += term;
    if (term.cwiseAbs().maxCoeff() <= std::numeric_limits<Real>::epsilon() * Real(1e-2) *
                                           result.cwiseAbs().maxCoeff()) {
      break;
    }
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

/// max |X - Y| / max |Y| (0 when both vanish).
template <typename DX, typename DY>
auto relative_max_error(const Eigen::MatrixBase<DX>& X, const Eigen::MatrixBase<DY>& Y) {
  using Real = typename Eigen::NumTraits<typename DX::Scalar>::Real;
  const Real diff = (X - Y).cwiseAbs().maxCoeff();
  const Real scale = Y.cwiseAbs().maxCoeff();
  if (scale == 0) return diff;
  return diff / scale;
}

}  // namespace chemo
