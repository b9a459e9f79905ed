#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace chemo {

struct SuiteResult {
  std::string name;
  /// Worst error (or, for the generator suite, the halving ratio furthest from 2).
  double value = 0.0;
  std::string metric;
  bool passed = false;
  std::string detail;
};

/// Max relative error of green_hat against matrix_exp_oracle on the lattice below.
double oracle_lattice_error();
/// Max relative error of G(t + s) against G(t) G(s) over random (xi, eps, t, s).
double semigroup_law_error(int samples, std::uint64_t seed);

/// green_hat against matrix_exp_oracle on eps in {0, 0.5, 1, 2} x 60 log-spaced
/// |xi| in [1e-3, 1e2] x t in {0.01, 1, 10}, d = 2 and 3; plus the semigroup law
/// on 1000 random samples. Threshold 1e-9 for both.
SuiteResult semigroup_suite();

/// P0 + P+ + P- = I over a lattice avoiding eigenvalue collisions; threshold 1e-12.
SuiteResult projector_suite();

/// (G(h) - I)/h - A under h-halving; every ratio in [1.7, 2.3].
SuiteResult generator_suite();

std::vector<std::string> suite_names();
/// Runs "semigroup", "projector", "generator" or "all".
std::vector<SuiteResult> run_suites(const std::string& selector);

}  // namespace chemo
