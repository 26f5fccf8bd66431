#pragma once

#include <cstdint>
#include <string>

#include "dqm/wavefield.hpp"

namespace dqm {

enum class ScenarioKind {
  plane_wave,
  gaussian_packet,
  harmonic_ground,
  harmonic_coherent,
  two_particle_product,
  two_particle_entangled,
  from_file,
};

enum class EvolveMode { linear, classical };
enum class PotentialKind { none, harmonic };

struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::gaussian_packet;

  std::vector<double> extents;
  std::vector<int> points;
  std::vector<double> masses;

  double hbar = 1.0;
  double lambda = 0.0;
  PotentialKind potential = PotentialKind::none;
  double omega = 1.0;

  std::vector<double> x0, p0, sigma;  // broadcast to the grid rank
  double mixing_angle = 0.78539816339744831;  // pi/4
  std::string state_file;

  EvolveMode mode = EvolveMode::linear;
  double dt = 1e-3;
  int steps = 1000;
  int stride = 10;
  std::uint64_t seed = 1;
  int ensemble_size = 100000;

  std::vector<double> sweep_lambdas = {0.0, 0.25, 0.5, 0.75, 1.0};
  bool write_snapshots = true;
};

// Throws ConfigError when grid/resolution/stability invariants are violated:
// sigma_a >= 4 dx_a, |p0_a| <= 0.5 pi hbar / dx_a, and in classical mode
// dt within the stability bound.
void validate_config(const ScenarioConfig& cfg);

GridPtr grid_of(const ScenarioConfig& cfg);
RealField build_potential(const ScenarioConfig& cfg, GridPtr grid);

// Deterministic initial state for the configured scenario, normalized.
// Plane-wave momenta are snapped to the lattice set 2 pi hbar k / L (the
// snapped values are reported by snapped_momentum).
WaveField build_scenario(const ScenarioConfig& cfg);

double snapped_momentum(double p0, double extent, double hbar);

// Node-free band-limited state: 1 + sum of random Fourier modes with
// |k_index| <= max_mode and total amplitude < 1, then normalized.
WaveField random_bandlimited_state(GridPtr grid, std::uint64_t seed,
                                   int max_mode = 6, double amplitude = 0.3,
                                   double hbar = 1.0);

}  // namespace dqm
