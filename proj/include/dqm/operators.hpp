#pragma once

#include "dqm/wavefield.hpp"

namespace dqm {

// Density-deformed momentum P_lambda = P + i*lambda*(hbar/2)*grad(rho)/rho
// (dagger flips the sign of the deformation term). The density is captured
// from the system state at construction and never recomputed from the
// operand: the deformed operators are functionals of the system density and
// act nonlinearly on the system state itself.
class DeformedMomentumSpec {
 public:
  DeformedMomentumSpec(const WaveField& system_state, double lambda,
                       bool dagger);

  double lambda() const { return lambda_; }
  bool dagger() const { return dagger_; }
  const RealField& rho() const { return rho_; }
  const BoolField& mask() const { return mask_; }
  // (d_a rho)/rho, zeroed under the node mask.
  const std::vector<RealField>& dlog_rho() const { return dlog_rho_; }

 private:
  double lambda_;
  bool dagger_;
  RealField rho_;
  BoolField mask_;
  std::vector<RealField> dlog_rho_;
};

// Q = -sum_a (hbar^2/2m_a) (d^2_a sqrt(rho)) / sqrt(rho); masked cells carry 0.
RealField quantum_potential(const PolarField& p, const Grid& grid,
                            double hbar);

// hbar * Im(grad(psi)/psi) per axis; equals grad(S) off the node mask.
std::vector<RealField> classical_momentum_field(const WaveField& w);

// Per-axis (-i hbar d_a +/- i lambda (hbar/2)(d_a rho)/rho) operand,
// masked cells zeroed.
std::vector<ComplexField> apply_deformed_momentum(
    const DeformedMomentumSpec& spec, const ComplexField& operand,
    double hbar);

// K_lambda psi = sum_a (1/2m_a) (P_lambda^dag)_a (P_lambda)_a psi.
ComplexField apply_deformed_kinetic(const WaveField& w, double lambda);

// ||(K - Q) psi - sum_a (1/2m_a)(P - i alpha_a)(P + i alpha_a) psi|| / ||psi||
// with alpha_a = hbar (d_a sqrt(rho)) / sqrt(rho), masked cells excluded.
double factorization_residual(const WaveField& w);

// Literal e^{-lambda f} grad (e^{lambda f} operand) with f = -ln(rho)/2.
// Masked cells are flagged (derivable via node_mask_of), not zeroed, so that
// pointwise cancellations in rho^{+-lambda/2} survive in the tails.
std::vector<ComplexField> witten_deformed_gradient(const ComplexField& operand,
                                                   const RealField& rho,
                                                   double lambda);

// Re <psi| -sum_a (hbar^2/2m_a) d^2_a |psi>, the undeformed kinetic energy.
double kinetic_expectation_spectral(const WaveField& w);

}  // namespace dqm
