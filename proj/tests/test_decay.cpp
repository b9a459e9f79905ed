#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "chemodecay/decay.hpp"
#include "chemodecay/integrator.hpp"

using namespace chemo;

namespace {

using Profile = std::function<double(double t)>;

// Rows at the log-spaced output times with n_k = f(t) (1+t)^{-k/2}, v_k = g(t) (1+t)^{-k/2}.
NormSeries synthetic(int dim, double length, double t_final, const Profile& n, const Profile& v,
                     double mass_n = 1.0) {
  NormSeries s;
  s.dim = dim;
  s.k_max = 3;
  s.meta["length"] = format_number(length);
  s.meta["u_bar"] = "1";
  for (double t : log_spaced_times(t_final, 40)) {
    NormRow r;
    r.t = t;
    for (int k = 0; k <= s.k_max; ++k) {
      const double damp = std::pow(1.0 + t, -0.5 * k);
      r.n_k.push_back(n(t) * damp);
      r.v_k.push_back(v(t) * damp);
    }
    r.n_inf = n(t);
    r.mass_n = mass_n;
    r.mass_v.assign(dim, 0.0);
    r.energy.assign(s.k_max, 1.0 / (1.0 + t));
    r.log_c_inf = std::nan("");
    r.c_inf = std::nan("");
    s.rows.push_back(r);
  }
  return s;
}

Profile power(double amplitude, double exponent) {
  return [=](double t) { return amplitude * std::pow(1.0 + t, exponent); };
}

}  // namespace

TEST_CASE("least_squares recovers exact lines and rejects degenerate input") {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto f = least_squares(x, y);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.residual_stderr == doctest::Approx(0.0));
  CHECK_THROWS_AS(least_squares({1.0}, {1.0}), FitError);
  CHECK_THROWS_AS(least_squares({1.0, 1.0}, {1.0, 2.0}), FitError);
}

TEST_CASE("heat exponents") {
  CHECK(heat_exponent(2, 0) == -0.5);
  CHECK(heat_exponent(3, 1) == -1.25);
  CHECK(heat_exponent(2, 2) == -1.5);
  CHECK(heat_exponent(2, 1) == -1.0);
}

TEST_CASE("windows") {
  const auto s = synthetic(2, 200.0, 1000.0, power(1, -0.5), power(1, -0.5));
  const double tbox = std::pow(200.0 / (2 * std::numbers::pi), 2) / 2;
  CHECK(box_time(200.0) == doctest::Approx(tbox).epsilon(1e-15));
  CHECK(default_window(s).t_min == 10.0);
  CHECK(default_window(s).t_max == doctest::Approx(tbox).epsilon(1e-15));
  CHECK(linfty_window(s).t_max == 100.0);
  const auto short_run = synthetic(2, 200.0, 50.0, power(1, -0.5), power(1, -0.5));
  CHECK(default_window(short_run).t_max == 50.0);
}

TEST_CASE("fit_decay is exact on pure power laws") {
  SUBCASE("(1+t)^-0.5") {
    const auto s = synthetic(2, 200.0, 400.0, power(1, -0.5), power(0, 0));
    const auto f = fit_decay(s, Quantity::n, 0);
    CHECK(std::abs(f.fit.slope + 0.5) <= 1e-12);
    CHECK(std::abs(f.fit.intercept) <= 1e-12);
    CHECK(f.target == -0.5);
    CHECK(f.passed);
    CHECK(f.fit.samples >= 10);
  }
  SUBCASE("3 (1+t)^-1.25 with the joint norm in d = 3") {
    const auto s = synthetic(3, 200.0, 400.0, power(2.4, -0.75), power(1.8, -0.75));
    const auto f = fit_decay(s, Quantity::joint, 1);
    CHECK(std::abs(f.fit.slope + 1.25) <= 1e-12);
    CHECK(std::abs(f.fit.intercept - std::log(3.0)) <= 1e-12);
    CHECK(f.target == -1.25);
    CHECK(f.passed);
  }
  SUBCASE("a wrong exponent fails at the given tolerance") {
    const auto s = synthetic(2, 200.0, 400.0, power(1, -0.75), power(1, -0.75));
    CHECK(!fit_decay(s, Quantity::joint, 0).passed);
    CHECK(fit_decay(s, Quantity::joint, 0, std::nullopt, 0.3).passed);
  }
  SUBCASE("residuals vanish and line up with the samples") {
    const auto s = synthetic(2, 200.0, 400.0, power(1, -0.5), power(1, -0.5));
    const auto f = fit_decay(s, Quantity::v, 2);
    REQUIRE(f.x.size() == f.residuals.size());
    for (double r : f.residuals) CHECK(std::abs(r) <= 1e-12);
  }
}

TEST_CASE("fit_decay errors") {
  const auto s = synthetic(2, 200.0, 12.0, power(1, -0.5), power(1, -0.5));
  CHECK_THROWS_WITH_AS(fit_decay(s, Quantity::joint, 0), doctest::Contains("insufficient window"),
                       FitError);
  auto z = synthetic(2, 200.0, 400.0, power(1, -0.5), power(1, -0.5));
  z.rows[50].n_k[0] = 0.0;
  CHECK_THROWS_WITH_AS(fit_decay(z, Quantity::n, 0), doctest::Contains("non-positive"), FitError);
  CHECK_THROWS_AS(fit_decay(z, Quantity::n, 4), FitError);
}

TEST_CASE("lower_bound_ratio") {
  SUBCASE("exact rate: constant ratio passes") {
    const auto s = synthetic(2, 200.0, 400.0, power(0.7, -0.5), power(0.2, -0.5));
    for (Quantity q : {Quantity::n, Quantity::v, Quantity::min_nv, Quantity::joint}) {
      const auto c = lower_bound_ratio(s, q, 1);
      CHECK(c.applicable);
      CHECK(c.passed);
      CHECK(std::abs(c.drift) <= 1e-12);
      CHECK(c.ratio_min == doctest::Approx(c.ratio_median).epsilon(1e-12));
    }
  }
  SUBCASE("exponential decay drives the ratio to zero") {
    const auto s = synthetic(2, 200.0, 400.0, [](double t) { return std::exp(-0.02 * t); },
                             power(1, -0.5));
    const auto c = lower_bound_ratio(s, Quantity::n, 0);
    CHECK(c.applicable);
    CHECK(!c.passed);
    CHECK(c.drift < -0.1);
    CHECK(!lower_bound_ratio(s, Quantity::min_nv, 0).passed);
  }
  SUBCASE("zero mass is not applicable") {
    const auto s = synthetic(2, 200.0, 400.0, power(1, -0.5), power(1, -0.5), 0.0);
    CHECK(!has_nonzero_mass(s));
    const auto c = lower_bound_ratio(s, Quantity::min_nv, 0);
    CHECK(!c.applicable);
    CHECK(!c.passed);
  }
  SUBCASE("mass below the Cauchy-Schwarz resolution counts as zero") {
    const auto s = synthetic(2, 200.0, 400.0, power(1, -0.5), power(1, -0.5), 1e-12);
    CHECK(!has_nonzero_mass(s));
  }
}

TEST_CASE("energy_audit") {
  auto s = synthetic(2, 200.0, 100.0, power(1, -0.5), power(1, -0.5));
  CHECK(energy_audit(s).passed);
  SUBCASE("zero state is monotone") {
    for (auto& r : s.rows) r.energy.assign(3, 0.0);
    CHECK(energy_audit(s).passed);
  }
  SUBCASE("increases beyond the slack are counted per k") {
    s.rows[20].energy[1] = s.rows[19].energy[1] * (1 + 1e-6);
    const auto a = energy_audit(s);
    CHECK(!a.passed);
    CHECK(a.violations[0] == 0);
    CHECK(a.violations[1] == 1);
    CHECK(a.worst_increase[1] == doctest::Approx(1e-6).epsilon(1e-6));
  }
  SUBCASE("increases inside the slack are not") {
    s.rows[20].energy[1] = s.rows[19].energy[1] * (1 + 1e-12);
    CHECK(energy_audit(s).passed);
  }
}

TEST_CASE("fourier_split partitions the energy") {
  const Spectral sp(Grid(2, 64, 40.0));
  const ModelParams p{1.0, 1.0};
  InitialDataSpec spec;
  spec.amplitude = 0.1;
  spec.sigma = 2.0;
  const auto init = make_initial(sp, spec, p);
  const StateHat u = to_spectral(sp, init.state);
  const auto row = measure(sp, u, 0.0, 2, 1.0, 8.0);
  const double total = row.n_k[0] * row.n_k[0] + row.v_k[0] * row.v_k[0];
  for (double R : {0.01, 1.0, 8.0, 50.0}) {
    const auto [low, high] = fourier_split(sp, u, R, 3.0);
    CHECK(std::abs(low + high - total) <= 1e-12 * total);
  }
  SUBCASE("a ball below the first shell holds only the zero mode") {
    const double smallest = std::pow(2 * std::numbers::pi / 40.0, 2);
    const auto [low, high] = fourier_split(sp, u, 0.5 * smallest, 0.0);
    const double zero_mode = std::norm(u.n.coeffs[0]) / sp.grid().box_volume();
    CHECK(low == doctest::Approx(zero_mode).epsilon(1e-14));
  }
  SUBCASE("a huge ball holds everything") {
    const auto [low, high] = fourier_split(sp, u, 1e9, 0.0);
    CHECK(high == 0.0);
    CHECK(low == doctest::Approx(total).epsilon(1e-12));
  }
  CHECK_THROWS_AS(fourier_split(sp, u, 0.0, 0.0), std::invalid_argument);
}

// At the cut |xi|^2 = R/(1+t) a heat-damped Gaussian has log power
// -R (sigma^2 + 2t)/(1+t), which falls in t only for sigma^2 < 2. The grid
// version also needs the ball to span many shells, else the first shell past
// the cut dominates E_high and the ratio jumps as shells cross it; times are
// kept to 1 + t <= R (L / 30 pi)^2, i.e. at least 15 shells inside.
TEST_CASE("fourier_split: spectral concentration increases along a linear Gaussian run") {
  const double length = 200.0, radius = 8.0;
  const Spectral sp(Grid(2, 256, length));
  const ModelParams p{1.0, 1.0};
  InitialDataSpec spec;
  spec.sigma = 1.0;
  const auto init = make_initial(sp, spec, p);
  const double t_max = radius * std::pow(length / (30 * std::numbers::pi), 2) - 1;
  std::vector<double> times;
  for (double t = 0.5; t <= t_max; t *= 1.5) times.push_back(t);
  REQUIRE(times.size() >= 8);
  const auto s = linear_series(sp, init.state, p, times, 2, radius);
  for (std::size_t i = 1; i < s.rows.size(); ++i) {
    const auto& a = s.rows[i - 1];
    const auto& b = s.rows[i];
    CHECK(b.e_high / b.e_low < a.e_high / a.e_low);
  }
}

TEST_CASE("c_decay_check") {
  auto s = synthetic(2, 200.0, 400.0, power(1, -0.5), power(1, -0.5));
  SUBCASE("u = u_bar, v = 0: log c = log c0 - u_bar t exactly") {
    for (double u_bar : {1.0, 2.0}) {
      for (auto& r : s.rows) r.log_c_inf = std::log(1.3) - u_bar * r.t;
      const auto c = c_decay_check(s, u_bar);
      CHECK(c.fit.fit.slope == doctest::Approx(-u_bar).epsilon(1e-12));
      CHECK(c.bounded);
      CHECK(c.passed);
    }
  }
  SUBCASE("growth of log c + u_bar t beyond one unit is unbounded") {
    for (auto& r : s.rows) r.log_c_inf = -r.t + 1.5 * std::log1p(r.t);
    const auto c = c_decay_check(s, 1.0);
    CHECK(!c.bounded);
    CHECK(!c.passed);
  }
  SUBCASE("slow decay fails the slope") {
    for (auto& r : s.rows) r.log_c_inf = -0.8 * r.t;
    CHECK(!c_decay_check(s, 1.0).passed);
  }
  SUBCASE("c not recorded") {
    CHECK_THROWS_AS(c_decay_check(s, 1.0), FitError);
  }
}

TEST_CASE("linfty_decay_check") {
  const auto s2 = synthetic(2, 200.0, 400.0, power(0.5, -1.0), power(1, -0.5));
  const auto f2 = linfty_decay_check(s2);
  CHECK(f2.target == -1.0);
  CHECK(std::abs(f2.fit.slope + 1.0) <= 1e-12);
  CHECK(f2.passed);
  CHECK(f2.tolerance == 0.15);
  CHECK(f2.window.t_max == 100.0);
  const auto s3 = synthetic(3, 200.0, 400.0, power(0.5, -1.25), power(1, -0.5));
  CHECK(linfty_decay_check(s3).target == -1.25);
  CHECK(std::abs(linfty_decay_check(s3).fit.slope + 1.25) <= 1e-12);
}

TEST_CASE("interpolation_check") {
  SUBCASE("holds on genuine spectral norms") {
    const Spectral sp(Grid(2, 64, 40.0));
    InitialDataSpec spec;
    spec.amplitude = 0.2;
    spec.sigma = 1.0;
    const auto init = make_initial(sp, spec, ModelParams{});
    const auto s = linear_series(sp, init.state, ModelParams{}, {0, 1, 5, 20}, 3, 8.0);
    const auto c = interpolation_check(s);
    CHECK(c.rows == 4);
    CHECK(c.passed);
  }
  SUBCASE("a fabricated violation is caught") {
    auto s = synthetic(2, 200.0, 10.0, power(1, -0.5), power(1, -0.5));
    s.rows[3].n_k[1] *= 10.0;
    const auto c = interpolation_check(s);
    CHECK(c.violations == 1);
    CHECK(!c.passed);
  }
}

TEST_CASE("mass_check") {
  auto s = synthetic(2, 200.0, 10.0, power(1, -0.5), power(1, -0.5), 5.0);
  CHECK(mass_check(s).passed);
  CHECK(mass_check(s).worst_drift == 0.0);
  s.rows.back().mass_n = 5.0 * (1 + 1e-9);
  CHECK(!mass_check(s).passed);
  s.rows.back().mass_n = 5.0;
  s.rows.back().mass_v[1] = 1e-11;
  CHECK(mass_check(s).passed);
}
