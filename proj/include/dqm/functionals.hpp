#pragma once

#include "dqm/evolution.hpp"

namespace dqm {

// Time-integrated action split. The complex-field form is the primary
// evaluation; kinetic_part is its kinetic term minus fisher_part, so the
// bookkeeping identity total = time_derivative_part - kinetic_part -
// potential_part - fisher_part holds to roundoff and kinetic_part approaches
// the classical integral of rho (grad S)^2 / 2m.
struct ActionBreakdown {
  double total = 0.0;
  double kinetic_part = 0.0;
  double potential_part = 0.0;
  double time_derivative_part = 0.0;
  double fisher_part = 0.0;
  double xi = 0.0;  // hbar^2 (1-lambda)^2 / (8 m), first-axis mass
};

// I_F = sum_a integral (d_a rho)^2 / rho over one time slice, masked cells
// excluded. The time integral, when wanted, is taken by action_density.
double fisher_information(const RealField& rho);

// W = sum_a (hbar^2 / 8 m_a) integral (d_a rho)^2 / rho, masses from the grid.
double weizsacker(const RealField& rho, double hbar);

double xi_of_lambda(double lambda, double hbar, double mass);

// Complex-field action over the stored trajectory: trapezoid in time over
// interior stamps (the time-derivative term uses central differences).
ActionBreakdown action_density(const Trajectory& traj, double lambda);

// Independent polar-form evaluation of the same action:
// -integral [rho (dS/dt + (grad S)^2/2m + V) + xi_a (d_a rho)^2/rho].
double action_polar_total(const Trajectory& traj, double lambda);

// rho-weighted RMS of dS/dt + sum_a (d_a S)^2/2m_a + V + xi(-4 lap sqrt(rho)/
// sqrt(rho)) at an interior stamp, divided by the same-weighted RMS scale of
// the individual terms (floored at hbar / trajectory duration).
double modified_hj_residual(const Trajectory& traj, int stamp_index,
                            double xi);

struct KineticDecomposition {
  double k_mean = 0.0;
  double kprime_mean = 0.0;
  double weizsacker_term = 0.0;
};

// <K> via the spectral kinetic operator; <K'> from the pointwise form
// K - sum_a (hbar^2/8m_a) ((d_a rho)/rho)^2; W as the integral. The three
// satisfy k_mean = kprime_mean + weizsacker_term.
KineticDecomposition kinetic_decomposition(const WaveField& w);

}  // namespace dqm
