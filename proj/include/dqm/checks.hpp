#pragma once

#include <string>
#include <vector>

#include "dqm/wavefield.hpp"

namespace dqm {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Static operator/functional invariants evaluated on one state:
// polar round-trip, <P> = <P_cl>, lambda-independence of <P_lambda>,
// K_lambda endpoints and quadratic interpolation, hermiticity surrogate,
// factorization residual, Witten consistency, <Q> = W, and the kinetic
// decomposition identity. Tolerances are fixed.
std::vector<CheckResult> run_invariant_checks(const WaveField& w);

bool all_passed(const std::vector<CheckResult>& results);

// Helpers reused by the checks, the CLI and the acceptance suite.
double kinetic_deformed_expectation(const WaveField& w, double lambda);
std::vector<double> momentum_expectation(const WaveField& w);
std::vector<double> classical_momentum_expectation(const WaveField& w);
std::vector<double> deformed_momentum_expectation(const WaveField& w,
                                                  double lambda);
double classical_kinetic_energy(const WaveField& w);  // integral rho (grad S)^2 / 2m
double quantum_potential_mean(const WaveField& w);

// Least-squares coefficients (A, B, C) of K(lambda) = A + B(1-lambda) +
// C(1-lambda)^2 through lambda = 0, 1/2, 1.
struct KineticFit {
  double constant = 0.0;
  double linear = 0.0;
  double quadratic = 0.0;
};
KineticFit fit_kinetic_interpolation(const WaveField& w);

}  // namespace dqm
