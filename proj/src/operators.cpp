#include "dqm/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace dqm {

namespace {

std::vector<double> kinetic_weights(const Grid& g, double hbar) {
  std::vector<double> w(g.rank());
  for (int a = 0; a < g.rank(); ++a) w[a] = hbar * hbar / (2.0 * g.mass(a));
  return w;
}

RealField sqrt_field(const RealField& rho) {
  std::vector<double> s(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) s[i] = std::sqrt(rho[i]);
  return RealField(rho.grid, std::move(s));
}

}  // namespace

DeformedMomentumSpec::DeformedMomentumSpec(const WaveField& system_state,
                                           double lambda, bool dagger)
    : lambda_(lambda),
      dagger_(dagger),
      rho_(density_of(system_state.psi)),
      mask_(node_mask_of(rho_)) {
  require_mass_mostly_unmasked(rho_, mask_, "deformed momentum");
  auto grads = gradient(rho_);
  dlog_rho_.reserve(grads.size());
  for (auto& g : grads) {
    RealField d(rho_.grid);
    for (std::size_t i = 0; i < rho_.size(); ++i)
      d[i] = mask_[i] ? 0.0 : g[i] / rho_[i];
    dlog_rho_.push_back(std::move(d));
  }
}

RealField quantum_potential(const PolarField& p, const Grid& grid,
                            double hbar) {
  require_same_grid(*p.rho.grid, grid, "quantum_potential");
  require_mass_mostly_unmasked(p.rho, p.node_mask, "quantum_potential");
  const RealField sq = sqrt_field(p.rho);
  const RealField lap = weighted_laplacian(sq, kinetic_weights(grid, hbar));
  RealField q(p.rho.grid);
  for (std::size_t i = 0; i < q.size(); ++i)
    q[i] = p.node_mask[i] ? 0.0 : -lap[i] / sq[i];
  return q;
}

std::vector<RealField> classical_momentum_field(const WaveField& w) {
  const RealField rho = density_of(w.psi);
  const BoolField mask = node_mask_of(rho);
  require_mass_mostly_unmasked(rho, mask, "classical_momentum_field");
  auto grads = gradient(w.psi);
  std::vector<RealField> out;
  out.reserve(grads.size());
  for (auto& g : grads) {
    RealField p(w.psi.grid);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (mask[i]) {
        p[i] = 0.0;
      } else {
        // Im(dpsi/psi) = Im(conj(psi) dpsi) / |psi|^2
        p[i] = w.params.hbar *
               std::imag(std::conj(w.psi[i]) * g[i]) / rho[i];
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ComplexField> apply_deformed_momentum(
    const DeformedMomentumSpec& spec, const ComplexField& operand,
    double hbar) {
  require_same_grid(*spec.rho().grid, *operand.grid, "apply_deformed_momentum");
  const double sign = spec.dagger() ? -1.0 : 1.0;
  const Complex def(0.0, sign * spec.lambda() * hbar * 0.5);
  auto grads = gradient(operand);
  std::vector<ComplexField> out;
  out.reserve(grads.size());
  for (int a = 0; a < operand.grid->rank(); ++a) {
    ComplexField f(operand.grid);
    const RealField& dl = spec.dlog_rho()[a];
    for (std::size_t i = 0; i < f.size(); ++i)
      f[i] = spec.mask()[i]
                 ? Complex(0.0, 0.0)
                 : Complex(0.0, -hbar) * grads[a][i] + def * dl[i] * operand[i];
    out.push_back(std::move(f));
  }
  return out;
}

ComplexField apply_deformed_kinetic(const WaveField& w, double lambda) {
  const double hbar = w.params.hbar;
  const DeformedMomentumSpec plain(w, lambda, false);
  const auto inner = apply_deformed_momentum(plain, w.psi, hbar);
  ComplexField out(w.psi.grid);
  const Complex def(0.0, -lambda * hbar * 0.5);  // dagger sign
  for (int a = 0; a < w.psi.grid->rank(); ++a) {
    const ComplexField grad_a = partial_derivative(inner[a], a);
    const double weight = 1.0 / (2.0 * w.psi.grid->mass(a));
    const RealField& dl = plain.dlog_rho()[a];
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (plain.mask()[i]) continue;
      out[i] += weight *
                (Complex(0.0, -hbar) * grad_a[i] + def * dl[i] * inner[a][i]);
    }
  }
  return out;
}

double factorization_residual(const WaveField& w) {
  const double hbar = w.params.hbar;
  const Grid& g = *w.psi.grid;
  const RealField rho = density_of(w.psi);
  const BoolField mask = node_mask_of(rho);
  require_mass_mostly_unmasked(rho, mask, "factorization_residual");
  const RealField sq = sqrt_field(rho);
  const auto grad_sq = gradient(sq);

  // unit-modulus phase factor psi/sqrt(rho); harmless placeholder on nodes
  std::vector<Complex> phase(w.psi.size());
  for (std::size_t i = 0; i < phase.size(); ++i)
    phase[i] = sq[i] > 0.0 ? w.psi[i] / sq[i] : Complex(1.0, 0.0);

  // left side: (K - Q) psi
  const auto weights = kinetic_weights(g, hbar);
  const ComplexField kin = weighted_laplacian(w.psi, weights);
  const RealField lap_sq = weighted_laplacian(sq, weights);
  std::vector<Complex> lhs(w.psi.size());
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const double q = mask[i] ? 0.0 : -lap_sq[i] / sq[i];
    lhs[i] = -kin[i] - q * w.psi[i];
  }

  // right side: sum_a (1/2m_a)(P - i alpha)(P + i alpha) psi, with the
  // stable pointwise form alpha*psi = hbar * (d_a sqrt(rho)) * phase so the
  // inner product never divides by a small density.
  const auto grad_psi = gradient(w.psi);
  std::vector<Complex> rhs(w.psi.size(), Complex(0.0, 0.0));
  for (int a = 0; a < g.rank(); ++a) {
    ComplexField inner(w.psi.grid);
    for (std::size_t i = 0; i < inner.size(); ++i) {
      const Complex alpha_psi = hbar * grad_sq[a][i] * phase[i];
      inner[i] = Complex(0.0, -hbar) * grad_psi[a][i] +
                 Complex(0.0, 1.0) * alpha_psi;
    }
    const ComplexField d_inner = partial_derivative(inner, a);
    const double weight = 1.0 / (2.0 * g.mass(a));
    for (std::size_t i = 0; i < inner.size(); ++i) {
      const double alpha = mask[i] ? 0.0 : hbar * grad_sq[a][i] / sq[i];
      rhs[i] += weight * (Complex(0.0, -hbar) * d_inner[i] -
                          Complex(0.0, alpha) * inner[i]);
    }
  }

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (!mask[i]) num += std::norm(lhs[i] - rhs[i]);
    den += std::norm(w.psi[i]);
  }
  return std::sqrt(num / den);
}

std::vector<ComplexField> witten_deformed_gradient(const ComplexField& operand,
                                                   const RealField& rho,
                                                   double lambda) {
  require_same_grid(*operand.grid, *rho.grid, "witten_deformed_gradient");
  const BoolField mask = node_mask_of(rho);
  require_mass_mostly_unmasked(rho, mask, "witten_deformed_gradient");
  // e^{lambda f} = rho^{-lambda/2} for f = -ln(rho)/2
  std::vector<Complex> scaled(operand.size());
  for (std::size_t i = 0; i < scaled.size(); ++i)
    scaled[i] = rho[i] > 0.0
                    ? operand[i] * std::pow(rho[i], -0.5 * lambda)
                    : Complex(0.0, 0.0);
  auto grads = gradient(ComplexField(operand.grid, std::move(scaled)));
  for (auto& gfield : grads)
    for (std::size_t i = 0; i < gfield.size(); ++i)
      gfield[i] = rho[i] > 0.0
                      ? gfield[i] * std::pow(rho[i], 0.5 * lambda)
                      : Complex(0.0, 0.0);
  return grads;
}

double kinetic_expectation_spectral(const WaveField& w) {
  const auto weights = kinetic_weights(*w.psi.grid, w.params.hbar);
  ComplexField kpsi = weighted_laplacian(w.psi, weights);
  for (auto& v : kpsi.values) v = -v;
  return expectation(kpsi, w).real();
}

}  // namespace dqm
