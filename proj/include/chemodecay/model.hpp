#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "chemodecay/spectral.hpp"

namespace chemo {

struct ModelParams {
  double epsilon = 1.0;
  double u_bar = 1.0;
  /// Throws std::invalid_argument unless epsilon >= 0 and u_bar > 0.
  void validate() const;
};

/// Perturbation unknowns n = u - u_bar and v = -grad ln c.
struct State {
  ScalarField n;
  VectorField v;
  double time = 0.0;
  explicit State(const Grid& g) : n(g), v(g) {}
};

/// Original unknowns: cell density u and chemical concentration c.
struct ChemState {
  ScalarField u;
  ScalarField c;
  double time = 0.0;
};

struct SourcePair {
  ScalarField s1;
  VectorField s2;
};

enum class InitialKind { gaussian_bump, mean_zero_dipole, from_file };

struct InitialDataSpec {
  InitialKind kind = InitialKind::gaussian_bump;
  double amplitude = 0.01;
  /// Width of both profiles; L/40 when unset.
  std::optional<double> sigma;
  /// Centre of the cell profile; the box centre when unset.
  std::optional<std::vector<double>> center;
  /// Amplitude of ln c0; defaults to `amplitude`.
  std::optional<double> chem_amplitude;
  /// Selects the offset of the ln c0 profile from the cell profile.
  std::uint64_t seed = 0;
  std::filesystem::path n_file;
  /// Optional for from_file; ln c0 = 0 when empty.
  std::filesystem::path lnc_file;
};

struct InitialData {
  State state;
  /// ln c0, so that v0 = -grad ln c0 and c0 = exp(ln c0).
  ScalarField ln_c0;
};

/// Builds (n0, v0, ln c0). v0 is always the discrete gradient of -ln c0.
/// Throws std::domain_error when min(u_bar + n0) <= 0.
InitialData make_initial(const Spectral& sp, const InitialDataSpec& spec, const ModelParams& params);

/// Centre offset of the ln c0 profile for a given seed, each component in [-L/8, L/8].
std::vector<double> chem_center_offset(const Grid& grid, std::uint64_t seed);

/// A Gaussian bump summed over the nearest periodic images.
ScalarField periodic_gaussian(const Grid& grid, std::span<const double> center, double sigma,
                              double amplitude);

/// Real-space fields of a spectral state, as produced alongside the sources.
struct PhysicalFields {
  ScalarField n;
  VectorField v;
  /// |v|^2.
  ScalarField speed2;
  explicit PhysicalFields(const Grid& g) : n(g), v(g), speed2(g) {}
};

/// Ŝ = (div(n v), -ε grad |v|²)^. Products are formed pointwise from the
/// full fields, transformed, and dealiased; the zero mode is exactly 0.
/// Fills `fields` with n, v and |v|² in real space.
void nonlinear_terms_hat(const Spectral& sp, const StateHat& u, const ModelParams& params,
                         StateHat& out, PhysicalFields& fields);

SourcePair nonlinear_terms(const Spectral& sp, const State& state, const ModelParams& params);

StateHat to_spectral(const Spectral& sp, const State& state);
State to_physical(const Spectral& sp, const StateHat& u, double time);

/// ‖curl v‖ / ‖grad v‖ computed spectrally; 0 when grad v vanishes.
double curl_defect(const Spectral& sp, const SpectralVector& v);

inline constexpr double kCurlTolerance = 1e-6;

/// n = u - u_bar, v = -grad ln c. Throws std::domain_error if c <= 0 anywhere.
State cole_hopf_forward(const Spectral& sp, const ChemState& chem, const ModelParams& params);

/// Mean-zero φ with grad φ = -v. Throws std::domain_error when v is not a gradient.
ScalarField reconstruct_ln_c(const Spectral& sp, const VectorField& v);

/// Pointwise -n + ε(|v|² - div v), the integrand of ln c + u_bar t.
ScalarField chem_integrand(const Spectral& sp, const SpectralVector& v_hat,
                           const PhysicalFields& fields, const ModelParams& params);
ScalarField chem_integrand(const Spectral& sp, const State& state, const ModelParams& params);

/// Running trapezoidal time integral of chem_integrand.
class ChemAccumulator {
 public:
  ChemAccumulator(const ScalarField& integrand0, double t0);
  void advance(const ScalarField& integrand, double t);
  double time() const { return time_; }
  const ScalarField& integral() const { return integral_; }

 private:
  ScalarField integral_;
  ScalarField last_;
  double time_;
};

/// ln c(t) = ln c0 - u_bar t + accumulated integral. Throws std::invalid_argument
/// when the accumulator is not at time t.
ScalarField reconstruct_ln_c_at(const ScalarField& ln_c0, const ChemAccumulator& acc, double t,
                                const ModelParams& params);
ScalarField reconstruct_c(const ScalarField& c0, const ChemAccumulator& acc, double t,
                          const ModelParams& params);

struct Masses {
  double n = 0.0;
  std::vector<double> v;
};

Masses masses(const State& state);
Masses masses(const StateHat& u);

}  // namespace chemo
