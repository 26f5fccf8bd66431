#pragma once

#include <cstdint>

#include "dqm/wavefield.hpp"

namespace dqm {

struct ObservableRecord {
  double time = 0.0;
  double norm = 0.0;    // sqrt of integral |psi|^2
  double energy = 0.0;  // <K + V>
  std::vector<double> x_mean, p_mean, pcl_mean, width;
  double q_mean = 0.0;
  double fisher = 0.0;
  double mask_point_fraction = 0.0;
};

// Time-ordered snapshots with per-stamp observables. Stamps are uniformly
// spaced by dt * stride.
struct Trajectory {
  PhysicalParams params;
  std::vector<double> times;
  std::vector<ComplexField> snapshots;
  std::vector<ObservableRecord> observables;
  double norm_tolerance = 0.0;

  int stamp_count() const { return static_cast<int>(times.size()); }
  double stamp_dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

ObservableRecord compute_observables(const WaveField& w, double time);

// Linear Schroedinger propagation: symmetric split-step (half potential,
// full kinetic in spectral space, half potential). Norm-preserving to
// roundoff; snapshots recorded every `stride` steps and at the final step.
Trajectory evolve_linear(const WaveField& w0, double dt, int steps,
                         int stride);

// Nonlinear "classical" equation i hbar dpsi/dt = (K + V - Q[|psi|^2]) psi,
// integrated by classic RK4 with Q recomputed from the current density at
// every stage. Aborts on NaN, on norm drift beyond 1e-3, and when the node
// mask grows more than 10 percentage points above its initial fraction
// (incipient caustic).
Trajectory evolve_classical(const WaveField& w0, double dt, int steps,
                            int stride);

// Stability bound for the classical integrator: dt <= 0.2 min_a(m_a dx_a^2)/hbar.
double classical_dt_bound(const Grid& grid, double hbar);

// Classical ensemble advanced along Hamilton-Jacobi characteristics.
// positions/momenta are particle-major (particle i, axis a at [i*dim + a]).
struct EnsembleState {
  double time = 0.0;
  int dim = 0;
  std::vector<double> positions;
  std::vector<double> momenta;
  std::vector<double> weights;
  std::size_t count() const {
    return dim > 0 ? positions.size() / static_cast<std::size_t>(dim) : 0;
  }
};

// Samples `particle_count` particles from rho by per-axis inverse-CDF product
// sampling, sets initial momenta to grad(S) via spectral interpolation of the
// classical momentum field, and advances them with velocity-Verlet under the
// force -grad(V) (4th-order finite differences + multilinear interpolation;
// spectral derivatives are wrong for non-periodic potentials). Deterministic
// for a fixed seed. hbar is the scale S was unwrapped with. Snapshots every
// `stride` steps (0 = about 100 frames).
std::vector<EnsembleState> hj_characteristics(const PolarField& p0,
                                              const Grid& grid,
                                              const RealField& potential,
                                              int particle_count, double dt,
                                              int steps, std::uint64_t seed,
                                              double hbar = 1.0,
                                              int stride = 0);

// L2 norm of d(rho)/dt + div(rho grad(S)/m) at an interior stamp, central
// time difference, normalized by ||rho||.
double continuity_residual(const Trajectory& traj, int stamp_index);

// Periodic Gaussian-kernel density estimate of the ensemble on the grid.
RealField kernel_density_estimate(const EnsembleState& ens, GridPtr grid,
                                  double bandwidth);

// Trigonometric (spectral) interpolation of a grid field at one point.
double spectral_interpolate(const RealField& f, std::span<const double> point);

}  // namespace dqm
