#include "dqm/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "dqm/detail/fft.hpp"
#include "dqm/errors.hpp"
#include "dqm/operators.hpp"

namespace dqm {

namespace {

bool finite_norm(const std::vector<Complex>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::isfinite(s);
}

double masked_point_fraction(const ComplexField& psi) {
  return mask_point_fraction(node_mask_of(density_of(psi)));
}

}  // namespace

ObservableRecord compute_observables(const WaveField& w, double time) {
  const Grid& g = *w.psi.grid;
  const double hbar = w.params.hbar;
  ObservableRecord rec;
  rec.time = time;

  const RealField rho = density_of(w.psi);
  const BoolField mask = node_mask_of(rho);
  rec.mask_point_fraction = mask_point_fraction(mask);
  rec.norm = std::sqrt(integrate(rho));

  // position moments
  std::vector<int> idx(g.rank());
  std::vector<double> m1(g.rank(), 0.0), m2(g.rank(), 0.0);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    g.unravel(i, idx);
    for (int a = 0; a < g.rank(); ++a) {
      const double x = g.coord(a, idx[a]);
      m1[a] += rho[i] * x;
      m2[a] += rho[i] * x * x;
    }
  }
  const double cv = g.cell_volume();
  rec.x_mean.resize(g.rank());
  rec.width.resize(g.rank());
  for (int a = 0; a < g.rank(); ++a) {
    rec.x_mean[a] = m1[a] * cv;
    rec.width[a] = std::sqrt(std::max(0.0, m2[a] * cv - rec.x_mean[a] * rec.x_mean[a]));
  }

  // momentum: <P> spectrally, <P_cl> as the rho-weighted local momentum
  const auto grads = gradient(w.psi);
  const auto pcl = classical_momentum_field(w);
  rec.p_mean.resize(g.rank());
  rec.pcl_mean.resize(g.rank());
  for (int a = 0; a < g.rank(); ++a) {
    Complex p = 0.0;
    double pc = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      p += std::conj(w.psi[i]) * Complex(0.0, -hbar) * grads[a][i];
      if (!mask[i]) pc += rho[i] * pcl[a][i];
    }
    rec.p_mean[a] = (p * cv).real();
    rec.pcl_mean[a] = pc * cv;
  }

  // energy, <Q>, per-slice Fisher information
  double vmean = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i)
    vmean += rho[i] * w.params.potential[i];
  rec.energy = kinetic_expectation_spectral(w) + vmean * cv;

  PolarField polar_like{rho, RealField(w.psi.grid), mask, 0.0, 0.0};
  const RealField q = quantum_potential(polar_like, g, hbar);
  double qm = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) qm += rho[i] * q[i];
  rec.q_mean = qm * cv;

  const auto grho = gradient(rho);
  double fisher = 0.0;
  for (int a = 0; a < g.rank(); ++a)
    for (std::size_t i = 0; i < rho.size(); ++i)
      if (!mask[i]) fisher += grho[a][i] * grho[a][i] / rho[i];
  rec.fisher = fisher * cv;
  return rec;
}

namespace {

struct Recorder {
  Trajectory traj;
  double dt;

  void record(const std::vector<Complex>& data, const WaveField& proto,
              int step) {
    ComplexField psi(proto.psi.grid, data);
    WaveField w{psi, proto.params};
    const double t = step * dt;
    traj.times.push_back(t);
    traj.observables.push_back(compute_observables(w, t));
    traj.snapshots.push_back(std::move(psi));
  }
};

void validate_evolve_args(double dt, int steps, int stride) {
  if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
  if (steps < 1) throw std::invalid_argument("evolve: steps must be >= 1");
  if (stride < 1) throw std::invalid_argument("evolve: stride must be >= 1");
}

}  // namespace

Trajectory evolve_linear(const WaveField& w0, double dt, int steps,
                         int stride) {
  validate_evolve_args(dt, steps, stride);
  const Grid& g = *w0.psi.grid;
  const double hbar = w0.params.hbar;

  // half-step potential phase and full-step kinetic phase (spectral)
  std::vector<Complex> vphase(g.size()), kphase(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    vphase[i] = std::exp(Complex(0.0, -0.5 * dt * w0.params.potential[i] / hbar));
  {
    std::vector<int> idx(g.rank());
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.unravel(i, idx);
      double omega = 0.0;
      for (int a = 0; a < g.rank(); ++a) {
        const double k = g.wavenumber(a, idx[a]);
        omega += hbar * k * k / (2.0 * g.mass(a));
      }
      kphase[i] = std::exp(Complex(0.0, -dt * omega));
    }
  }

  std::vector<Complex> psi = w0.psi.values;
  Recorder rec{Trajectory{w0.params, {}, {}, {}, 1e-10}, dt};
  rec.record(psi, w0, 0);
  for (int step = 1; step <= steps; ++step) {
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= vphase[i];
    detail::fft_forward(g, psi);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= kphase[i];
    detail::fft_backward(g, psi);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= vphase[i];
    if (!finite_norm(psi))
      throw NumericalAbort("evolve_linear: NaN at step " +
                           std::to_string(step));
    if (step % stride == 0 || step == steps) rec.record(psi, w0, step);
  }
  return std::move(rec.traj);
}

double classical_dt_bound(const Grid& grid, double hbar) {
  double bound = std::numeric_limits<double>::infinity();
  for (int a = 0; a < grid.rank(); ++a)
    bound = std::min(bound,
                     0.2 * grid.mass(a) * grid.spacing(a) * grid.spacing(a) / hbar);
  return bound;
}

namespace {

// RHS of the classical equation: -(i/hbar) [K psi + V psi - Q psi], Q from
// the instantaneous density, zero under its node mask.
void classical_rhs(const Grid& g, const PhysicalParams& params,
                   const std::vector<Complex>& psi,
                   const std::vector<double>& kin_weights,
                   std::vector<Complex>& out) {
  const std::size_t n = g.size();

  // density and sqrt(rho)
  std::vector<double> rho(n), sq(n);
  double rho_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rho[i] = std::norm(psi[i]);
    rho_max = std::max(rho_max, rho[i]);
  }
  const double eps = 1e-12 * rho_max;
  for (std::size_t i = 0; i < n; ++i) sq[i] = std::sqrt(rho[i]);

  // weighted laplacians via the raw FFT interface to avoid field copies
  std::vector<Complex> kin(psi.begin(), psi.end());
  std::vector<Complex> lap_sq(n);
  for (std::size_t i = 0; i < n; ++i) lap_sq[i] = Complex(sq[i], 0.0);
  detail::fft_forward(g, kin);
  detail::fft_forward(g, lap_sq);
  std::vector<int> idx(g.rank());
  for (std::size_t i = 0; i < n; ++i) {
    g.unravel(i, idx);
    double sym = 0.0;
    for (int a = 0; a < g.rank(); ++a) {
      const double k = g.wavenumber(a, idx[a]);
      sym += kin_weights[a] * k * k;  // -w_a d^2_a with the sign folded in
    }
    kin[i] *= sym;
    lap_sq[i] *= sym;
  }
  detail::fft_backward(g, kin);
  detail::fft_backward(g, lap_sq);

  const double hbar = params.hbar;
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // kin already equals +K psi = -sum (hbar^2/2m) d^2 psi
    const double q = rho[i] <= eps ? 0.0 : lap_sq[i].real() / sq[i];
    const Complex h = kin[i] + (params.potential[i] - q) * psi[i];
    out[i] = Complex(0.0, -1.0 / hbar) * h;
  }
}

}  // namespace

Trajectory evolve_classical(const WaveField& w0, double dt, int steps,
                            int stride) {
  validate_evolve_args(dt, steps, stride);
  const Grid& g = *w0.psi.grid;
  const double hbar = w0.params.hbar;
  if (dt > classical_dt_bound(g, hbar))
    throw std::invalid_argument(
        "evolve_classical: dt exceeds the stability bound 0.2 m dx^2 / hbar");

  std::vector<double> kin_weights(g.rank());
  for (int a = 0; a < g.rank(); ++a)
    kin_weights[a] = hbar * hbar / (2.0 * g.mass(a));

  std::vector<Complex> psi = w0.psi.values;
  const double norm0 = std::sqrt(integrate(density_of(w0.psi)));
  const double mask0 = masked_point_fraction(w0.psi);

  Recorder rec{Trajectory{w0.params, {}, {}, {}, 1e-6}, dt};
  rec.record(psi, w0, 0);

  const std::size_t n = g.size();
  std::vector<Complex> k1, k2, k3, k4, tmp(n);
  for (int step = 1; step <= steps; ++step) {
    classical_rhs(g, w0.params, psi, kin_weights, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + 0.5 * dt * k1[i];
    classical_rhs(g, w0.params, tmp, kin_weights, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + 0.5 * dt * k2[i];
    classical_rhs(g, w0.params, tmp, kin_weights, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + dt * k3[i];
    classical_rhs(g, w0.params, tmp, kin_weights, k4);
    for (std::size_t i = 0; i < n; ++i)
      psi[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    if (!finite_norm(psi))
      throw NumericalAbort("evolve_classical: NaN at step " +
                           std::to_string(step));
    if (step % stride == 0 || step == steps) {
      ComplexField cur(w0.psi.grid, psi);
      const double norm = std::sqrt(integrate(density_of(cur)));
      if (std::abs(norm - norm0) > 1e-3)
        throw NumericalAbort("evolve_classical: norm drift " +
                             std::to_string(std::abs(norm - norm0)) +
                             " at step " + std::to_string(step));
      const double mfrac = masked_point_fraction(cur);
      if (mfrac > mask0 + 0.10)
        throw NumericalAbort(
            "evolve_classical: node mask grew to " + std::to_string(mfrac) +
            " at step " + std::to_string(step) + " (caustic forming)");
      rec.record(psi, w0, step);
    }
  }
  return std::move(rec.traj);
}

namespace {

// Evaluates the trigonometric interpolant of a real grid field at arbitrary
// points. The spectrum is computed once; each evaluation builds per-axis
// phase tables by recurrence.
class SpectralInterpolant {
 public:
  explicit SpectralInterpolant(const RealField& f) : grid_(f.grid) {
    spec_.resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) spec_[i] = Complex(f[i], 0.0);
    detail::fft_forward(*grid_, spec_);
    const double inv = 1.0 / static_cast<double>(grid_->size());
    for (auto& v : spec_) v *= inv;
    phase_.resize(grid_->rank());
  }

  double at(std::span<const double> point) {
    const Grid& g = *grid_;
    for (int a = 0; a < g.rank(); ++a) {
      const int nj = g.points(a);
      phase_[a].resize(nj);
      const Complex base = std::exp(
          Complex(0.0, 2.0 * std::numbers::pi * point[a] / g.extent(a)));
      Complex up = 1.0;
      for (int j = 0; j <= nj / 2; ++j) {
        phase_[a][j] = up;
        up *= base;
      }
      const Complex cbase = std::conj(base);
      Complex down = 1.0;
      for (int j = nj - 1; j > nj / 2; --j) {
        down *= cbase;
        phase_[a][j] = down;
      }
    }
    std::vector<int> idx(g.rank());
    Complex sum = 0.0;
    for (std::size_t i = 0; i < spec_.size(); ++i) {
      g.unravel(i, idx);
      Complex ph = 1.0;
      for (int a = 0; a < g.rank(); ++a) ph *= phase_[a][idx[a]];
      sum += spec_[i] * ph;
    }
    return sum.real();
  }

 private:
  GridPtr grid_;
  std::vector<Complex> spec_;
  std::vector<std::vector<Complex>> phase_;
};

}  // namespace

double spectral_interpolate(const RealField& f, std::span<const double> point) {
  if (static_cast<int>(point.size()) != f.grid->rank())
    throw std::invalid_argument("spectral_interpolate: dimension mismatch");
  return SpectralInterpolant(f).at(point);
}

namespace {

double wrap_coord(double x, double extent) {
  const double half = 0.5 * extent;
  double y = std::fmod(x + half, extent);
  if (y < 0.0) y += extent;
  return y - half;
}

// 4th-order centered finite-difference gradient; exact for polynomials of
// degree <= 4 away from the periodic wrap.
std::vector<RealField> fd_gradient(const RealField& f) {
  const Grid& g = *f.grid;
  std::vector<RealField> out;
  std::vector<int> idx(g.rank());
  for (int a = 0; a < g.rank(); ++a) {
    RealField d(f.grid);
    const int n = g.points(a);
    const std::size_t stride = g.stride(a);
    const double c = 1.0 / (12.0 * g.spacing(a));
    for (std::size_t i = 0; i < f.size(); ++i) {
      g.unravel(i, idx);
      const int j = idx[a];
      const std::size_t base = i - static_cast<std::size_t>(j) * stride;
      auto at = [&](int jj) {
        return f[base + static_cast<std::size_t>((jj % n + n) % n) * stride];
      };
      d[i] = c * (-at(j + 2) + 8.0 * at(j + 1) - 8.0 * at(j - 1) + at(j - 2));
    }
    out.push_back(std::move(d));
  }
  return out;
}

double multilinear(const RealField& f, std::span<const double> point) {
  const Grid& g = *f.grid;
  const int rank = g.rank();
  std::vector<int> j0(rank);
  std::vector<double> frac(rank);
  for (int a = 0; a < rank; ++a) {
    const double s =
        (wrap_coord(point[a], g.extent(a)) + 0.5 * g.extent(a)) / g.spacing(a);
    const int jf = static_cast<int>(std::floor(s));
    j0[a] = ((jf % g.points(a)) + g.points(a)) % g.points(a);
    frac[a] = s - std::floor(s);
  }
  double value = 0.0;
  const int corners = 1 << rank;
  std::vector<int> idx(rank);
  for (int c = 0; c < corners; ++c) {
    double wgt = 1.0;
    for (int a = 0; a < rank; ++a) {
      const int bit = (c >> a) & 1;
      idx[a] = (j0[a] + bit) % g.points(a);
      wgt *= bit ? frac[a] : 1.0 - frac[a];
    }
    value += wgt * f[g.flatten(idx)];
  }
  return value;
}

}  // namespace

std::vector<EnsembleState> hj_characteristics(const PolarField& p0,
                                              const Grid& grid,
                                              const RealField& potential,
                                              int particle_count, double dt,
                                              int steps, std::uint64_t seed,
                                              double hbar, int stride) {
  require_same_grid(*p0.rho.grid, grid, "hj_characteristics");
  require_same_grid(*potential.grid, grid, "hj_characteristics");
  if (particle_count < 1)
    throw std::invalid_argument("hj_characteristics: need at least 1 particle");
  if (!(dt > 0.0) || steps < 0)
    throw std::invalid_argument("hj_characteristics: bad dt/steps");
  if (stride <= 0) stride = std::max(1, steps / 100);

  const int rank = grid.rank();
  const std::size_t m = static_cast<std::size_t>(particle_count);

  // per-axis marginal CDFs (product sampling)
  std::vector<std::vector<double>> cdf(rank);
  for (int a = 0; a < rank; ++a) {
    const int n = grid.points(a);
    std::vector<double> marg(n, 0.0);
    std::vector<int> idx(rank);
    for (std::size_t i = 0; i < p0.rho.size(); ++i) {
      grid.unravel(i, idx);
      marg[idx[a]] += p0.rho[i];
    }
    double total = 0.0;
    for (double v : marg) total += v;
    cdf[a].resize(n + 1, 0.0);
    for (int j = 0; j < n; ++j) cdf[a][j + 1] = cdf[a][j] + marg[j] / total;
    cdf[a][n] = 1.0;
  }

  // draw positions: particle-major, axis inner loop; cells are centered on
  // the lattice points and sampled uniformly within
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> pos(m * rank);
  for (std::size_t i = 0; i < m; ++i)
    for (int a = 0; a < rank; ++a) {
      const double u = unif(rng);
      const auto& c = cdf[a];
      const auto it = std::upper_bound(c.begin(), c.end(), u);
      int j = std::max(0, static_cast<int>(it - c.begin()) - 1);
      j = std::min(j, grid.points(a) - 1);
      const double cell_mass = c[j + 1] - c[j];
      const double frac = cell_mass > 0.0 ? (u - c[j]) / cell_mass : 0.5;
      pos[i * rank + a] =
          grid.coord(a, j) + (frac - 0.5) * grid.spacing(a);
    }

  // initial momenta: spectral interpolation of grad(S) = hbar Im(grad psi/psi)
  WaveField w = from_polar(p0, PhysicalParams{hbar, potential, 0.0});
  const auto pcl = classical_momentum_field(w);
  std::vector<double> mom(m * rank);
  {
    std::vector<SpectralInterpolant> interp;
    interp.reserve(rank);
    for (int a = 0; a < rank; ++a) interp.emplace_back(pcl[a]);
    std::vector<double> pt(rank);
    for (std::size_t i = 0; i < m; ++i) {
      for (int a = 0; a < rank; ++a) pt[a] = pos[i * rank + a];
      for (int a = 0; a < rank; ++a)
        mom[i * rank + a] = interp[a].at(pt);
    }
  }

  const auto force = fd_gradient(potential);
  auto force_at = [&](std::span<const double> pt, int a) {
    return -multilinear(force[a], pt);
  };

  std::vector<EnsembleState> out;
  auto snapshot = [&](int step) {
    EnsembleState s;
    s.time = step * dt;
    s.dim = rank;
    s.positions = pos;
    s.momenta = mom;
    s.weights.assign(m, 1.0 / static_cast<double>(m));
    out.push_back(std::move(s));
  };
  snapshot(0);

  std::vector<double> pt(rank);
  std::vector<double> f_cur(m * rank);
  for (std::size_t i = 0; i < m; ++i) {
    for (int a = 0; a < rank; ++a) pt[a] = pos[i * rank + a];
    for (int a = 0; a < rank; ++a) f_cur[i * rank + a] = force_at(pt, a);
  }
  for (int step = 1; step <= steps; ++step) {
    for (std::size_t i = 0; i < m; ++i) {
      for (int a = 0; a < rank; ++a) {
        const std::size_t k = i * rank + a;
        mom[k] += 0.5 * dt * f_cur[k];
        pos[k] = wrap_coord(pos[k] + dt * mom[k] / grid.mass(a),
                            grid.extent(a));
      }
      for (int a = 0; a < rank; ++a) pt[a] = pos[i * rank + a];
      for (int a = 0; a < rank; ++a) {
        const std::size_t k = i * rank + a;
        f_cur[k] = force_at(pt, a);
        mom[k] += 0.5 * dt * f_cur[k];
      }
    }
    if (step % stride == 0 || step == steps) snapshot(step);
  }
  return out;
}

double continuity_residual(const Trajectory& traj, int stamp_index) {
  if (stamp_index <= 0 || stamp_index >= traj.stamp_count() - 1)
    throw std::invalid_argument(
        "continuity_residual: stamp needs both neighbors");
  const double dt = traj.stamp_dt();
  const ComplexField& psi = traj.snapshots[stamp_index];
  const Grid& g = *psi.grid;

  const RealField rho_prev = density_of(traj.snapshots[stamp_index - 1]);
  const RealField rho_next = density_of(traj.snapshots[stamp_index + 1]);
  const RealField rho = density_of(psi);
  const BoolField mask = node_mask_of(rho);

  WaveField w{psi, traj.params};
  const auto pcl = classical_momentum_field(w);

  // flux divergence: sum_a d_a(rho v_a), v masked to zero
  RealField defect(psi.grid);
  for (int a = 0; a < g.rank(); ++a) {
    RealField flux(psi.grid);
    for (std::size_t i = 0; i < rho.size(); ++i)
      flux[i] = mask[i] ? 0.0 : rho[i] * pcl[a][i] / g.mass(a);
    const auto d = gradient(flux);
    for (std::size_t i = 0; i < rho.size(); ++i) defect[i] += d[a][i];
  }
  for (std::size_t i = 0; i < rho.size(); ++i)
    defect[i] += (rho_next[i] - rho_prev[i]) / (2.0 * dt);

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    num += defect[i] * defect[i];
    den += rho[i] * rho[i];
  }
  return std::sqrt(num / den);
}

RealField kernel_density_estimate(const EnsembleState& ens, GridPtr grid,
                                  double bandwidth) {
  if (!(bandwidth > 0.0))
    throw std::invalid_argument("kde: bandwidth must be positive");
  const Grid& g = *grid;
  if (ens.dim != g.rank())
    throw std::invalid_argument("kde: dimension mismatch");
  RealField out(grid);
  const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
  const double norm =
      std::pow(2.0 * std::numbers::pi * bandwidth * bandwidth,
               -0.5 * g.rank());
  // kernel support, truncated at 6 bandwidths
  std::vector<int> reach(g.rank());
  for (int a = 0; a < g.rank(); ++a)
    reach[a] = std::min(g.points(a) / 2,
                        static_cast<int>(std::ceil(6.0 * bandwidth / g.spacing(a))));

  const std::size_t m = ens.count();
  std::vector<int> base(g.rank()), idx(g.rank());
  for (std::size_t p = 0; p < m; ++p) {
    const double wgt = ens.weights[p] * norm;
    for (int a = 0; a < g.rank(); ++a) {
      const double x = wrap_coord(ens.positions[p * g.rank() + a], g.extent(a));
      base[a] = static_cast<int>(std::round((x + 0.5 * g.extent(a)) / g.spacing(a)));
    }
    // iterate the local box around the particle (rank <= 3)
    std::vector<int> lo(g.rank()), hi(g.rank());
    for (int a = 0; a < g.rank(); ++a) {
      lo[a] = base[a] - reach[a];
      hi[a] = base[a] + reach[a];
    }
    std::vector<int> cur = lo;
    while (true) {
      double r2 = 0.0;
      for (int a = 0; a < g.rank(); ++a) {
        const int n = g.points(a);
        idx[a] = ((cur[a] % n) + n) % n;
        const double d = wrap_coord(
            g.coord(a, idx[a]) - ens.positions[p * g.rank() + a], g.extent(a));
        r2 += d * d;
      }
      out[g.flatten(idx)] += wgt * std::exp(-r2 * inv2h2);
      int a = g.rank() - 1;
      while (a >= 0) {
        if (++cur[a] <= hi[a]) break;
        cur[a] = lo[a];
        --a;
      }
      if (a < 0) break;
    }
  }
  return out;
}

}  // namespace dqm
