#pragma once

#include <cmath>
#include <numbers>

#include "dqm/scenario.hpp"
#include "dqm/wavefield.hpp"

namespace dqm::test {

inline constexpr double kPi = std::numbers::pi;

// envelope exp(-(x-x0)^2/(2 sigma)^2): density std dev = sigma
inline WaveField gaussian_state(GridPtr g, double x0, double p0, double sigma,
                                double hbar = 1.0,
                                RealField potential = RealField()) {
  std::vector<Complex> v(g->size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = g->coord(0, i);
    const double d = (x - x0) / (2.0 * sigma);
    v[i] = std::exp(-d * d) * std::exp(Complex(0.0, p0 * x / hbar));
  }
  if (!potential.grid) potential = RealField(g);
  return normalize(make_wavefield(ComplexField(g, std::move(v)),
                                  PhysicalParams{hbar, potential, 0.0}));
}

inline WaveField plane_wave_state(GridPtr g, double p0_request,
                                  double hbar = 1.0) {
  const double p0 = snapped_momentum(p0_request, g->extent(0), hbar);
  std::vector<Complex> v(g->size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::exp(Complex(0.0, p0 * g->coord(0, i) / hbar));
  return normalize(make_wavefield(ComplexField(g, std::move(v)),
                                  PhysicalParams{hbar, RealField(g), 0.0}));
}

inline double max_abs(const ComplexField& f) {
  double m = 0.0;
  for (const auto& v : f.values) m = std::max(m, std::abs(v));
  return m;
}

inline RealField harmonic_potential(GridPtr g, double omega) {
  RealField v(g);
  std::vector<int> idx(g->rank());
  for (std::size_t i = 0; i < v.size(); ++i) {
    g->unravel(i, idx);
    double sum = 0.0;
    for (int a = 0; a < g->rank(); ++a) {
      const double x = g->coord(a, idx[a]);
      sum += 0.5 * g->mass(a) * omega * omega * x * x;
    }
    v[i] = sum;
  }
  return v;
}

// ground state of the harmonic well (per-axis masses), real positive
inline WaveField harmonic_ground_state(GridPtr g, double omega,
                                       double hbar = 1.0) {
  std::vector<Complex> v(g->size());
  std::vector<int> idx(g->rank());
  for (std::size_t i = 0; i < v.size(); ++i) {
    g->unravel(i, idx);
    double env = 0.0;
    for (int a = 0; a < g->rank(); ++a) {
      const double x = g->coord(a, idx[a]);
      env += g->mass(a) * omega * x * x / (2.0 * hbar);
    }
    v[i] = std::exp(-env);
  }
  return normalize(make_wavefield(ComplexField(g, std::move(v)),
                                  PhysicalParams{hbar, harmonic_potential(g, omega), 0.0}));
}

}  // namespace dqm::test
