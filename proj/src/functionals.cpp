#include "dqm/functionals.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dqm/operators.hpp"

namespace dqm {

double fisher_information(const RealField& rho) {
  const BoolField mask = node_mask_of(rho);
  require_mass_mostly_unmasked(rho, mask, "fisher_information");
  const auto grads = gradient(rho);
  double sum = 0.0;
  for (const auto& g : grads)
    for (std::size_t i = 0; i < rho.size(); ++i)
      if (!mask[i]) sum += g[i] * g[i] / rho[i];
  return sum * rho.grid->cell_volume();
}

double weizsacker(const RealField& rho, double hbar) {
  const Grid& grid = *rho.grid;
  const BoolField mask = node_mask_of(rho);
  require_mass_mostly_unmasked(rho, mask, "weizsacker");
  const auto grads = gradient(rho);
  double sum = 0.0;
  for (int a = 0; a < grid.rank(); ++a) {
    const double w = hbar * hbar / (8.0 * grid.mass(a));
    for (std::size_t i = 0; i < rho.size(); ++i)
      if (!mask[i]) sum += w * grads[a][i] * grads[a][i] / rho[i];
  }
  return sum * grid.cell_volume();
}

double xi_of_lambda(double lambda, double hbar, double mass) {
  const double oml = 1.0 - lambda;
  return hbar * hbar * oml * oml / (8.0 * mass);
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Removes the global 2*pi*hbar branch ambiguity of `next` relative to `ref`
// (phases are unwrapped per stamp; the anchor branch may differ from stamp to
// stamp). Means are taken over cells unmasked in both stamps.
std::vector<double> align_phase(const std::vector<double>& ref,
                                const BoolField& ref_mask,
                                const RealField& next,
                                const BoolField& next_mask, double hbar) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < next.size(); ++i) {
    if (ref_mask[i] || next_mask[i]) continue;
    sum += next[i] - ref[i];
    ++n;
  }
  const double mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
  const double shift = kTwoPi * hbar * std::round(mean / (kTwoPi * hbar));
  std::vector<double> out = next.values;
  for (auto& v : out) v -= shift;
  return out;
}

struct StampData {
  RealField rho;
  BoolField mask;
  std::vector<double> phase;  // branch-aligned to the previous stamp
};

std::vector<StampData> polar_stamps(const Trajectory& traj) {
  std::vector<StampData> out;
  out.reserve(traj.stamp_count());
  for (int n = 0; n < traj.stamp_count(); ++n) {
    WaveField w{traj.snapshots[n], traj.params};
    PolarField p = to_polar(w);
    StampData d{std::move(p.rho), std::move(p.node_mask), {}};
    if (out.empty())
      d.phase = p.phase.values;
    else
      d.phase = align_phase(out.back().phase, out.back().mask, p.phase,
                            d.mask, traj.params.hbar);
    out.push_back(std::move(d));
  }
  return out;
}

// Trapezoid weights over the interior stamps 1..M-2.
std::vector<double> interior_weights(const Trajectory& traj) {
  const int m = traj.stamp_count();
  if (m < 3)
    throw std::invalid_argument("action: trajectory needs at least 3 stamps");
  const double dt = traj.stamp_dt();
  std::vector<double> w(m, 0.0);
  if (m == 3) {
    w[1] = dt;
    return w;
  }
  for (int n = 1; n <= m - 2; ++n)
    w[n] = (n == 1 || n == m - 2) ? 0.5 * dt : dt;
  return w;
}

}  // namespace

ActionBreakdown action_density(const Trajectory& traj, double lambda) {
  const auto weights = interior_weights(traj);
  const double dt = traj.stamp_dt();
  const double hbar = traj.params.hbar;
  const Grid& g = *traj.snapshots.front().grid;
  const double cv = g.cell_volume();

  ActionBreakdown br;
  double kinetic_complex = 0.0;
  for (int n = 1; n <= traj.stamp_count() - 2; ++n) {
    const double wt = weights[n];
    if (wt == 0.0) continue;
    const ComplexField& psi = traj.snapshots[n];
    WaveField w{psi, traj.params};
    const RealField rho = density_of(psi);

    double td = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const Complex dpsi =
          (traj.snapshots[n + 1][i] - traj.snapshots[n - 1][i]) / (2.0 * dt);
      td -= hbar * std::imag(std::conj(psi[i]) * dpsi);
    }
    br.time_derivative_part += wt * td * cv;

    const DeformedMomentumSpec spec(w, lambda, false);
    const auto p_psi = apply_deformed_momentum(spec, psi, hbar);
    double kin = 0.0;
    for (int a = 0; a < g.rank(); ++a) {
      const double ww = 1.0 / (2.0 * g.mass(a));
      for (std::size_t i = 0; i < psi.size(); ++i)
        kin += ww * std::norm(p_psi[a][i]);
    }
    kinetic_complex += wt * kin * cv;

    double pot = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i)
      pot += traj.params.potential[i] * rho[i];
    br.potential_part += wt * pot * cv;

    const double oml = 1.0 - lambda;
    br.fisher_part += wt * oml * oml * weizsacker(rho, hbar);
  }
  br.total = br.time_derivative_part - kinetic_complex - br.potential_part;
  br.kinetic_part = kinetic_complex - br.fisher_part;
  br.xi = xi_of_lambda(lambda, hbar, g.mass(0));
  return br;
}

double action_polar_total(const Trajectory& traj, double lambda) {
  const auto weights = interior_weights(traj);
  const auto stamps = polar_stamps(traj);
  const double dt = traj.stamp_dt();
  const double hbar = traj.params.hbar;
  const Grid& g = *traj.snapshots.front().grid;
  const double cv = g.cell_volume();

  double total = 0.0;
  for (int n = 1; n <= traj.stamp_count() - 2; ++n) {
    const double wt = weights[n];
    if (wt == 0.0) continue;
    WaveField w{traj.snapshots[n], traj.params};
    const auto grad_s = classical_momentum_field(w);
    const auto& cur = stamps[n];

    double classical = 0.0;
    for (std::size_t i = 0; i < cur.rho.size(); ++i) {
      if (cur.mask[i] || stamps[n - 1].mask[i] || stamps[n + 1].mask[i])
        continue;
      const double ds_dt =
          (stamps[n + 1].phase[i] - stamps[n - 1].phase[i]) / (2.0 * dt);
      double kin = 0.0;
      for (int a = 0; a < g.rank(); ++a)
        kin += grad_s[a][i] * grad_s[a][i] / (2.0 * g.mass(a));
      classical +=
          cur.rho[i] * (ds_dt + kin + traj.params.potential[i]);
    }
    const double oml = 1.0 - lambda;
    total -= wt * (classical * cv + oml * oml * weizsacker(cur.rho, hbar));
  }
  return total;
}

double modified_hj_residual(const Trajectory& traj, int stamp_index,
                            double xi) {
  if (stamp_index <= 0 || stamp_index >= traj.stamp_count() - 1)
    throw std::invalid_argument(
        "modified_hj_residual: stamp needs both neighbors");
  const double dt = traj.stamp_dt();
  const double hbar = traj.params.hbar;
  const Grid& g = *traj.snapshots.front().grid;

  WaveField w{traj.snapshots[stamp_index], traj.params};
  PolarField cur = to_polar(w);
  WaveField wm{traj.snapshots[stamp_index - 1], traj.params};
  WaveField wp{traj.snapshots[stamp_index + 1], traj.params};
  PolarField prev = to_polar(wm);
  PolarField next = to_polar(wp);
  const auto s_prev = align_phase(cur.phase.values, cur.node_mask, prev.phase,
                                  prev.node_mask, hbar);
  const auto s_next = align_phase(cur.phase.values, cur.node_mask, next.phase,
                                  next.node_mask, hbar);

  const auto grad_s = classical_momentum_field(w);
  std::vector<double> sq(cur.rho.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::sqrt(cur.rho[i]);
  const RealField lap_sq = laplacian(RealField(cur.rho.grid, sq));

  double num = 0.0, scale2 = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < cur.rho.size(); ++i) {
    if (cur.node_mask[i] || prev.node_mask[i] || next.node_mask[i]) continue;
    const double ds_dt = (s_next[i] - s_prev[i]) / (2.0 * dt);
    double kin = 0.0;
    for (int a = 0; a < g.rank(); ++a)
      kin += grad_s[a][i] * grad_s[a][i] / (2.0 * g.mass(a));
    const double v = traj.params.potential[i];
    const double fisher = xi * (-4.0) * lap_sq[i] / sq[i];
    const double lhs = ds_dt + kin + v + fisher;
    const double r = cur.rho[i];
    num += r * lhs * lhs;
    scale2 += r * (ds_dt * ds_dt + kin * kin + v * v + fisher * fisher);
    mass += r;
  }
  if (mass <= 0.0) return 0.0;
  const double duration = traj.times.back() - traj.times.front();
  const double floor = duration > 0.0 ? hbar / duration : hbar;
  const double scale = std::max(std::sqrt(scale2 / mass), floor);
  return std::sqrt(num / mass) / scale;
}

KineticDecomposition kinetic_decomposition(const WaveField& w) {
  const Grid& g = *w.psi.grid;
  const double hbar = w.params.hbar;
  const RealField rho = density_of(w.psi);
  const BoolField mask = node_mask_of(rho);
  require_mass_mostly_unmasked(rho, mask, "kinetic_decomposition");

  KineticDecomposition d;
  d.k_mean = kinetic_expectation_spectral(w);

  const auto grho = gradient(rho);
  double correction = 0.0, wterm = 0.0;
  for (int a = 0; a < g.rank(); ++a) {
    const double c = hbar * hbar / (8.0 * g.mass(a));
    for (std::size_t i = 0; i < rho.size(); ++i) {
      if (mask[i]) continue;
      const double ratio = grho[a][i] / rho[i];
      correction += c * ratio * ratio * rho[i];
      wterm += c * grho[a][i] * grho[a][i] / rho[i];
    }
  }
  d.kprime_mean = d.k_mean - correction * g.cell_volume();
  d.weizsacker_term = wterm * g.cell_volume();
  return d;
}

}  // namespace dqm
