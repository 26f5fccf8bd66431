#include "dqm/checks.hpp"

#include <cmath>

#include "dqm/functionals.hpp"
#include "dqm/operators.hpp"

namespace dqm {

std::vector<double> momentum_expectation(const WaveField& w) {
  const auto grads = gradient(w.psi);
  std::vector<double> out(w.psi.grid->rank());
  for (int a = 0; a < w.psi.grid->rank(); ++a) {
    Complex sum = 0.0;
    for (std::size_t i = 0; i < w.psi.size(); ++i)
      sum += std::conj(w.psi[i]) * Complex(0.0, -w.params.hbar) * grads[a][i];
    out[a] = (sum * w.psi.grid->cell_volume()).real();
  }
  return out;
}

std::vector<double> classical_momentum_expectation(const WaveField& w) {
  const RealField rho = density_of(w.psi);
  const BoolField mask = node_mask_of(rho);
  const auto pcl = classical_momentum_field(w);
  std::vector<double> out(w.psi.grid->rank());
  for (int a = 0; a < w.psi.grid->rank(); ++a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i)
      if (!mask[i]) sum += rho[i] * pcl[a][i];
    out[a] = sum * w.psi.grid->cell_volume();
  }
  return out;
}

std::vector<double> deformed_momentum_expectation(const WaveField& w,
                                                  double lambda) {
  const DeformedMomentumSpec spec(w, lambda, false);
  const auto p_psi = apply_deformed_momentum(spec, w.psi, w.params.hbar);
  std::vector<double> out(w.psi.grid->rank());
  for (int a = 0; a < w.psi.grid->rank(); ++a)
    out[a] = expectation(p_psi[a], w).real();
  return out;
}

double kinetic_deformed_expectation(const WaveField& w, double lambda) {
  return expectation(apply_deformed_kinetic(w, lambda), w).real();
}

double classical_kinetic_energy(const WaveField& w) {
  const Grid& g = *w.psi.grid;
  const RealField rho = density_of(w.psi);
  const BoolField mask = node_mask_of(rho);
  const auto pcl = classical_momentum_field(w);
  double sum = 0.0;
  for (int a = 0; a < g.rank(); ++a) {
    const double ww = 1.0 / (2.0 * g.mass(a));
    for (std::size_t i = 0; i < rho.size(); ++i)
      if (!mask[i]) sum += ww * rho[i] * pcl[a][i] * pcl[a][i];
  }
  return sum * g.cell_volume();
}

double quantum_potential_mean(const WaveField& w) {
  const PolarField p = to_polar(w);
  const RealField q = quantum_potential(p, *w.psi.grid, w.params.hbar);
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) sum += p.rho[i] * q[i];
  return sum * w.psi.grid->cell_volume();
}

KineticFit fit_kinetic_interpolation(const WaveField& w) {
  // Exact 3-point solve for A + B u + C u^2 at u = 1-lambda in {1, 1/2, 0}.
  const double k0 = kinetic_deformed_expectation(w, 0.0);   // u = 1
  const double kh = kinetic_deformed_expectation(w, 0.5);   // u = 1/2
  const double k1 = kinetic_deformed_expectation(w, 1.0);   // u = 0
  KineticFit fit;
  fit.constant = k1;
  fit.quadratic = 2.0 * k0 - 4.0 * kh + 2.0 * k1;
  fit.linear = k0 - k1 - fit.quadratic;
  return fit;
}

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::vector<CheckResult> run_invariant_checks(const WaveField& w0) {
  const WaveField w = normalize(w0);
  const double hbar = w.params.hbar;
  std::vector<CheckResult> results;
  auto add = [&](const std::string& name, double measured, double tol) {
    results.push_back({name, measured, tol, measured <= tol});
  };

  // polar round-trip up to a global phase, off-mask
  {
    const PolarField p = to_polar(w);
    const WaveField back = from_polar(p, w.params);
    Complex overlap = 0.0;
    for (std::size_t i = 0; i < w.psi.size(); ++i)
      overlap += std::conj(back.psi[i]) * w.psi[i];
    const Complex phase = overlap / std::abs(overlap);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < w.psi.size(); ++i) {
      if (p.node_mask[i]) continue;
      num += std::norm(w.psi[i] - phase * back.psi[i]);
      den += std::norm(w.psi[i]);
    }
    add("polar_round_trip", std::sqrt(num / den), 1e-8);
  }

  // <P> = <P_cl> and lambda-independence of <P_lambda>
  {
    const auto p = momentum_expectation(w);
    const auto pcl = classical_momentum_expectation(w);
    double dev = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a)
      dev = std::max(dev, std::abs(p[a] - pcl[a]));
    add("momentum_identity", dev, 1e-10);

    double ldev = 0.0;
    for (double lambda : {0.0, 0.5, 1.0}) {
      const auto pl = deformed_momentum_expectation(w, lambda);
      for (std::size_t a = 0; a < p.size(); ++a)
        ldev = std::max(ldev, std::abs(pl[a] - p[a]));
    }
    add("deformed_momentum_mean_lambda_free", ldev, 1e-10);
  }

  // K_lambda interpolation: endpoints and quadratic form in (1-lambda)
  {
    const double k_spec = kinetic_expectation_spectral(w);
    const double q_mean = quantum_potential_mean(w);
    const double t_cl = classical_kinetic_energy(w);
    const RealField rho = density_of(w.psi);
    const double wz = weizsacker(rho, hbar);
    const double scale = std::max(1.0, std::abs(k_spec));

    add("kinetic_endpoint_lambda0",
        std::abs(kinetic_deformed_expectation(w, 0.0) - k_spec) / scale, 1e-8);
    add("kinetic_endpoint_lambda1",
        std::abs(kinetic_deformed_expectation(w, 1.0) - (k_spec - q_mean)) /
            scale,
        1e-8);

    const KineticFit fit = fit_kinetic_interpolation(w);
    add("kinetic_quadratic_fit_linear_term", std::abs(fit.linear) / scale,
        1e-9);
    add("kinetic_fit_constant_vs_classical",
        std::abs(fit.constant - t_cl) / scale, 1e-8);
    add("kinetic_fit_quadratic_vs_weizsacker",
        std::abs(fit.quadratic - wz) / scale, 1e-8);

    double imdev = 0.0;
    for (double lambda : {0.0, 0.5, 1.0})
      imdev = std::max(
          imdev,
          std::abs(expectation(apply_deformed_kinetic(w, lambda), w).imag()));
    add("kinetic_hermiticity_surrogate", imdev / scale, 1e-10);

    add("weizsacker_equals_q_mean", std::abs(wz - q_mean) / scale, 1e-8);
  }

  add("factorization_residual", factorization_residual(w), 1e-7);

  // Witten deformed gradient vs deformed momentum, relative to the max
  {
    const RealField rho = density_of(w.psi);
    const BoolField mask = node_mask_of(rho);
    double dev = 0.0;
    for (double lambda : {0.0, 0.5, 1.0}) {
      const auto witten = witten_deformed_gradient(w.psi, rho, lambda);
      const DeformedMomentumSpec spec(w, lambda, false);
      const auto p_psi = apply_deformed_momentum(spec, w.psi, hbar);
      for (int a = 0; a < w.psi.grid->rank(); ++a) {
        double diff = 0.0, ref = 0.0;
        for (std::size_t i = 0; i < rho.size(); ++i) {
          if (mask[i]) continue;
          diff = std::max(diff, std::abs(Complex(0.0, -hbar) * witten[a][i] -
                                         p_psi[a][i]));
          ref = std::max(ref, std::abs(p_psi[a][i]));
        }
        if (ref > 0.0) dev = std::max(dev, diff / ref);
      }
    }
    add("witten_consistency", dev, 1e-8);
  }

  // Appendix decomposition
  {
    const KineticDecomposition d = kinetic_decomposition(w);
    const double scale = std::max(1.0, std::abs(d.k_mean));
    add("kinetic_decomposition_identity",
        std::abs(d.k_mean - d.kprime_mean - d.weizsacker_term) / scale, 1e-8);
  }

  // Fisher information sanity
  {
    const RealField rho = density_of(w.psi);
    const double fi = fisher_information(rho);
    add("fisher_nonnegative", fi < 0.0 ? -fi : 0.0, 0.0);
    add("xi_lambda0_value",
        std::abs(xi_of_lambda(0.0, hbar, w.psi.grid->mass(0)) -
                 hbar * hbar / (8.0 * w.psi.grid->mass(0))),
        0.0);
  }

  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace dqm
