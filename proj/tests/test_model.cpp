#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "chemodecay/model.hpp"
#include "chemodecay/snapshot.hpp"

using namespace chemo;
using std::numbers::pi;

namespace {

ScalarField sample(const Grid& g, auto&& fn) {
  ScalarField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.unravel(i);
    std::array<double, 3> x{0, 0, 0};
    for (int a = 0; a < g.dim(); ++a) x[a] = idx[a] * g.dx();
    f.values[static_cast<Eigen::Index>(i)] = fn(x);
  }
  return f;
}

// Sum of a few random low Fourier modes: smooth and exactly periodic.
ScalarField smooth_random(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  ScalarField f(g);
  for (int term = 0; term < 6; ++term) {
    std::array<int, 3> m{0, 0, 0};
    for (int a = 0; a < g.dim(); ++a) m[a] = static_cast<int>(std::lround(3 * unit(rng)));
    const double amp = unit(rng), phase = pi * unit(rng);
    f.values += sample(g, [&](const auto& x) {
                  double arg = phase;
                  for (int a = 0; a < g.dim(); ++a) arg += 2 * pi * m[a] * x[a] / g.length();
                  return amp * std::cos(arg);
                }).values;
  }
  return f;
}

double max_abs(const ScalarField& f) { return f.values.abs().maxCoeff(); }

double rel_l2(const ScalarField& a, const ScalarField& b) {
  return l2_norm(ScalarField(a.grid, a.values - b.values)) / l2_norm(b);
}

}  // namespace

TEST_CASE("ModelParams validation") {
  CHECK_NOTHROW((ModelParams{0.0, 1.0}.validate()));
  CHECK_THROWS_AS((ModelParams{-0.1, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{1.0, 0.0}.validate()), std::invalid_argument);
}

TEST_CASE("nonlinear_terms: trivial states") {
  const Grid g(2, 32, 10.0);
  const Spectral sp(g);
  const ModelParams p{1.0, 1.0};
  State s(g);
  s.v.components[0] = smooth_random(g, 1).values;
  auto src = nonlinear_terms(sp, s, p);
  CHECK(max_abs(src.s1) == 0.0);
  CHECK(src.s2.components[0].abs().maxCoeff() > 0.0);

  State z(g);
  z.n = smooth_random(g, 2);
  src = nonlinear_terms(sp, z, p);
  CHECK(max_abs(src.s1) == 0.0);
  CHECK(src.s2.components[0].abs().maxCoeff() == 0.0);
  CHECK(src.s2.components[1].abs().maxCoeff() == 0.0);
}

TEST_CASE("nonlinear_terms: single-mode products") {
  const double L = 7.0, k = 2 * pi / L;
  const Grid g(2, 128, L);
  const Spectral sp(g);
  State s(g);
  s.n = sample(g, [&](const auto& x) { return std::sin(k * x[0]); });
  s.v.components[0] = sample(g, [&](const auto& x) { return std::cos(k * x[0]); }).values;
  const auto src = nonlinear_terms(sp, s, ModelParams{1.0, 1.0});
  const auto s1 = sample(g, [&](const auto& x) { return k * std::cos(2 * k * x[0]); });
  const auto s2 = sample(g, [&](const auto& x) { return k * std::sin(2 * k * x[0]); });
  CHECK((src.s1.values - s1.values).abs().maxCoeff() <= 1e-13);
  CHECK((src.s2.components[0] - s2.values).abs().maxCoeff() <= 1e-13);
  CHECK(src.s2.components[1].abs().maxCoeff() <= 1e-15);

  // Independent cross-check: fourth-order central differences of the products.
  const double h = g.dx();
  const int N = g.points();
  Eigen::ArrayXd prod_nv = s.n.values * s.v.components[0];
  Eigen::ArrayXd prod_vv = s.v.components[0].square();
  double worst = 0.0;
  for (int i = 0; i < N; ++i) {
    auto at = [&](const Eigen::ArrayXd& f, int off) {
      return f[static_cast<Eigen::Index>(g.ravel({(i + off + N) % N, 0, 0}))];
    };
    auto d1 = [&](const Eigen::ArrayXd& f) {
      return (-at(f, 2) + 8 * at(f, 1) - 8 * at(f, -1) + at(f, -2)) / (12 * h);
    };
    const auto f = static_cast<Eigen::Index>(g.ravel({i, 0, 0}));
    worst = std::max(worst, std::abs(src.s1.values[f] - d1(prod_nv)));
    worst = std::max(worst, std::abs(src.s2.components[0][f] + d1(prod_vv)));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("nonlinear_terms: sources have zero mean") {
  for (int dim : {2, 3}) {
    const Grid g(dim, 16, 5.0);
    const Spectral sp(g);
    std::mt19937_64 rng(dim);
    std::normal_distribution<double> normal;
    State s(g);
    for (auto& x : s.n.values) x = normal(rng);
    for (auto& c : s.v.components)
      for (auto& x : c) x = normal(rng);
    const auto src = nonlinear_terms(sp, s, ModelParams{0.7, 1.0});
    CHECK(std::abs(integral(src.s1)) <= 1e-12);
    for (int a = 0; a < dim; ++a) CHECK(std::abs(integral(src.s2.component(a))) <= 1e-12);
  }
}

TEST_CASE("nonlinear_terms: epsilon = 0 switches S2 off") {
  const Grid g(2, 16, 5.0);
  const Spectral sp(g);
  State s(g);
  s.v.components[1] = smooth_random(g, 3).values;
  s.n = smooth_random(g, 4);
  const auto src = nonlinear_terms(sp, s, ModelParams{0.0, 1.0});
  CHECK(src.s2.components[1].abs().maxCoeff() == 0.0);
  CHECK(max_abs(src.s1) > 0.0);
}

TEST_CASE("make_initial") {
  const ModelParams p{1.0, 1.0};
  SUBCASE("zero amplitude gives the zero state") {
    const Spectral sp(Grid(2, 32, 40.0));
    InitialDataSpec spec;
    spec.amplitude = 0.0;
    const auto init = make_initial(sp, spec, p);
    CHECK(max_abs(init.state.n) == 0.0);
    CHECK(init.state.v.components[0].abs().maxCoeff() == 0.0);
  }
  SUBCASE("Gaussian mass") {
    for (int dim : {2, 3}) {
      const Spectral sp(Grid(dim, dim == 2 ? 64 : 32, 40.0));
      InitialDataSpec spec;
      spec.amplitude = 0.01;
      spec.sigma = 2.0;
      const auto init = make_initial(sp, spec, p);
      const double expect = 0.01 * std::pow(2 * pi * 4.0, dim / 2.0);
      const auto m = masses(init.state);
      CHECK(std::abs(m.n - expect) <= 0.01 * expect);
      for (double mv : m.v) CHECK(std::abs(mv) <= 1e-12);
      CHECK(curl_defect(sp, forward_dft(sp, init.state.v)) <= 1e-12);
    }
  }
  SUBCASE("default width is L/40") {
    const Spectral sp(Grid(2, 128, 80.0));
    InitialDataSpec spec;
    const auto init = make_initial(sp, spec, p);
    const double expect = 0.01 * 2 * pi * 4.0;
    CHECK(std::abs(masses(init.state).n - expect) <= 1e-3 * expect);
  }
  SUBCASE("dipole has zero mass") {
    const Spectral sp(Grid(2, 64, 40.0));
    InitialDataSpec spec;
    spec.kind = InitialKind::mean_zero_dipole;
    spec.sigma = 2.0;
    const auto init = make_initial(sp, spec, p);
    const double l1 = init.state.n.values.abs().sum() * sp.grid().cell_volume();
    CHECK(l1 > 0.0);
    CHECK(std::abs(masses(init.state).n) <= 1e-10 * l1);
  }
  SUBCASE("positivity violation reports min(u0)") {
    const Spectral sp(Grid(2, 32, 40.0));
    InitialDataSpec spec;
    spec.kind = InitialKind::mean_zero_dipole;
    spec.amplitude = 1.5;
    spec.sigma = 2.0;
    try {
      make_initial(sp, spec, p);
      FAIL("expected a positivity error");
    } catch (const std::domain_error& e) {
      CHECK(std::string(e.what()).find("min(u0) = -0.") != std::string::npos);
    }
  }
  SUBCASE("seed moves only the chemical profile") {
    const Spectral sp(Grid(2, 32, 40.0));
    InitialDataSpec a, b;
    b.seed = 99;
    const auto ia = make_initial(sp, a, p), ib = make_initial(sp, b, p);
    CHECK((ia.state.n.values == ib.state.n.values).all());
    CHECK(!(ia.ln_c0.values == ib.ln_c0.values).all());
    const auto again = make_initial(sp, b, p);
    CHECK((again.ln_c0.values == ib.ln_c0.values).all());
  }
  SUBCASE("from_file") {
    const Grid g(2, 16, 8.0);
    const Spectral sp(g);
    const auto dir = std::filesystem::temp_directory_path();
    const auto n0 = smooth_random(g, 5);
    ScalarField n_small(g, 0.1 * n0.values);
    write_snapshot(dir / "chemo_n0.bin", n_small, 0.0, "n");
    write_snapshot(dir / "chemo_lnc0.bin", n0, 0.0, "ln_c");
    InitialDataSpec spec;
    spec.kind = InitialKind::from_file;
    spec.n_file = dir / "chemo_n0.bin";
    spec.lnc_file = dir / "chemo_lnc0.bin";
    const auto init = make_initial(sp, spec, p);
    CHECK((init.state.n.values == n_small.values).all());
    CHECK(rel_l2(reconstruct_ln_c(sp, init.state.v), ScalarField(g, n0.values - n0.values.mean())) <= 1e-12);
    spec.n_file = dir / "missing.bin";
    CHECK_THROWS(make_initial(sp, spec, p));
    std::filesystem::remove(dir / "chemo_n0.bin");
    std::filesystem::remove(dir / "chemo_lnc0.bin");
  }
}

TEST_CASE("cole_hopf_forward") {
  const double L = 6.0, k = 2 * pi / L;
  const Grid g(2, 32, L);
  const Spectral sp(g);
  const ModelParams p{1.0, 2.0};
  SUBCASE("constant c") {
    ChemState chem{ScalarField(g, Eigen::ArrayXd::Constant(g.size(), 2.5)),
                   ScalarField(g, Eigen::ArrayXd::Constant(g.size(), 3.0)), 0.0};
    const auto s = cole_hopf_forward(sp, chem, p);
    CHECK(s.v.components[0].abs().maxCoeff() <= 1e-15);
    CHECK((s.n.values - 0.5).abs().maxCoeff() == 0.0);
  }
  SUBCASE("c = exp(-sin)") {
    ChemState chem{ScalarField(g, Eigen::ArrayXd::Constant(g.size(), 2.0)),
                   sample(g, [&](const auto& x) { return std::exp(-std::sin(k * x[0])); }), 0.0};
    const auto s = cole_hopf_forward(sp, chem, p);
    const auto expect = sample(g, [&](const auto& x) { return k * std::cos(k * x[0]); });
    CHECK((s.v.components[0] - expect.values).abs().maxCoeff() <= 1e-12);
    CHECK(s.v.components[1].abs().maxCoeff() <= 1e-14);
  }
  SUBCASE("roundtrip through reconstruct_ln_c") {
    const auto lnc = smooth_random(g, 6);
    ChemState chem{ScalarField(g, Eigen::ArrayXd::Constant(g.size(), 2.0)),
                   ScalarField(g, lnc.values.exp()), 0.0};
    const auto s = cole_hopf_forward(sp, chem, p);
    const auto back = reconstruct_ln_c(sp, s.v);
    CHECK(rel_l2(back, ScalarField(g, lnc.values - lnc.values.mean())) <= 1e-10);
  }
  SUBCASE("non-positive c") {
    ChemState chem{ScalarField(g, Eigen::ArrayXd::Ones(g.size())),
                   ScalarField(g, Eigen::ArrayXd::Ones(g.size())), 0.0};
    chem.c.values[17] = 0.0;
    CHECK_THROWS_AS(cole_hopf_forward(sp, chem, p), std::domain_error);
  }
}

TEST_CASE("reconstruct_ln_c") {
  for (int dim : {2, 3}) {
    const Grid g(dim, 16, 4.0);
    const Spectral sp(g);
    CHECK(max_abs(reconstruct_ln_c(sp, VectorField(g))) == 0.0);

    const auto phi = smooth_random(g, 7);
    const auto grad = inverse_dft(sp, gradient(sp, forward_dft(sp, phi)));
    const auto back = reconstruct_ln_c(sp, grad);
    CHECK(rel_l2(back, ScalarField(g, -(phi.values - phi.values.mean()))) <= 1e-10);

    // v = (-d2 psi, d1 psi, 0): divergence free, pure curl.
    const auto psi = forward_dft(sp, smooth_random(g, 8));
    VectorField rot(g);
    rot.components[0] = -inverse_dft(sp, spectral_derivative(sp, psi, 1)).values;
    rot.components[1] = inverse_dft(sp, spectral_derivative(sp, psi, 0)).values;
    CHECK_THROWS_AS(reconstruct_ln_c(sp, rot), std::domain_error);
  }
}

TEST_CASE("reconstruct_c") {
  const Grid g(2, 16, 5.0);
  const Spectral sp(g);
  const ModelParams p{1.0, 2.0};
  const auto ln_c0 = smooth_random(g, 9);
  const ScalarField c0(g, ln_c0.values.exp());

  SUBCASE("equilibrium fields give c0 exp(-u_bar t)") {
    const State rest(g);
    ChemAccumulator acc(chem_integrand(sp, rest, p), 0.0);
    CHECK((reconstruct_c(c0, acc, 0.0, p).values == c0.values).all());
    double t = 0.0;
    for (int i = 0; i < 37; ++i) {
      t += 0.13;
      acc.advance(chem_integrand(sp, rest, p), t);
    }
    const auto c = reconstruct_c(c0, acc, t, p);
    const Eigen::ArrayXd expect = c0.values * std::exp(-p.u_bar * t);
    CHECK(((c.values - expect).abs() / expect).maxCoeff() <= 1e-12);
    const auto lnc = reconstruct_ln_c_at(ln_c0, acc, t, p);
    CHECK((lnc.values - (ln_c0.values - p.u_bar * t)).abs().maxCoeff() <= 1e-12);
    CHECK_THROWS_AS(reconstruct_c(c0, acc, t + 0.1, p), std::invalid_argument);
  }

  SUBCASE("one short step with frozen fields is second order") {
    State s(g);
    s.n = ScalarField(g, 0.1 * smooth_random(g, 10).values);
    s.v = inverse_dft(sp, gradient(sp, forward_dft(sp, smooth_random(g, 11))));
    const auto f = chem_integrand(sp, s, p);
    // Exponential-Euler for (ln c)_t = -u + ε(|v|² - div v) with u = u_bar + n.
    auto error = [&](double dt) {
      ChemAccumulator acc(f, 0.0);
      acc.advance(f, dt);
      const auto c = reconstruct_c(c0, acc, dt, p);
      const Eigen::ArrayXd direct = c0.values * ((f.values - p.u_bar) * dt).exp();
      return ((c.values - direct).abs() / direct).maxCoeff();
    };
    CHECK(error(1e-2) <= 1e-13);
    CHECK(error(1e-3) <= 1e-14);
  }
}

TEST_CASE("masses") {
  const Grid g(2, 16, 5.0);
  const Spectral sp(g);
  const auto m0 = masses(State(g));
  CHECK(m0.n == 0.0);
  CHECK(m0.v == std::vector<double>{0.0, 0.0});

  State s(g);
  s.n = ScalarField(g, Eigen::ArrayXd::Constant(g.size(), 0.3));
  s.v.components[1].setConstant(-0.2);
  const auto m = masses(s);
  CHECK(m.n == doctest::Approx(0.3 * 25.0).epsilon(1e-14));
  CHECK(m.v[1] == doctest::Approx(-0.2 * 25.0).epsilon(1e-14));
  const auto mh = masses(to_spectral(sp, s));
  CHECK(mh.n == doctest::Approx(m.n).epsilon(1e-14));
  CHECK(mh.v[1] == doctest::Approx(m.v[1]).epsilon(1e-14));
}
