#pragma once

#include "dqm/grid.hpp"

namespace dqm {

// Physical context shared by a state: hbar, external potential sampled on the
// grid, and the deformation parameter lambda. lambda is not restricted to
// [0,1]; values outside the canonical range are flagged in reports only.
struct PhysicalParams {
  double hbar = 1.0;
  RealField potential;
  double lambda = 0.0;
};

struct WaveField {
  ComplexField psi;
  PhysicalParams params;
};

WaveField make_wavefield(ComplexField psi, PhysicalParams params);

// Madelung pair (rho, S) plus the node mask. S is hbar * unwrapped arg(psi),
// anchored at the density maximum and swept axis by axis (axis 0 first);
// values under the mask are kept but unreliable.
struct PolarField {
  RealField rho;
  RealField phase;
  BoolField node_mask;
  double mask_point_fraction = 0.0;
  double mask_mass_fraction = 0.0;
};

// Node threshold: 1e-12 * max(rho). Divisions by rho are undefined below it.
double node_threshold(const RealField& rho);
BoolField node_mask_of(const RealField& rho);
double mask_point_fraction(const BoolField& mask);
double mask_mass_fraction(const RealField& rho, const BoolField& mask);

// Degenerate-state guard shared by the polar/operator layer: fails when the
// masked cells carry more than half of the probability mass.
void require_mass_mostly_unmasked(const RealField& rho, const BoolField& mask,
                                  const char* what);

double norm2(const WaveField& w);  // integral of |psi|^2
WaveField normalize(const WaveField& w);

PolarField to_polar(const WaveField& w);
WaveField from_polar(const PolarField& p, PhysicalParams params);

// <A>_psi = integral conj(psi) * (A psi); op_psi is the already-applied field.
Complex expectation(const ComplexField& op_psi, const WaveField& w);

RealField density_of(const ComplexField& psi);

}  // namespace dqm
