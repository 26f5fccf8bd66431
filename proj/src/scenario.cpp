#include "dqm/scenario.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "dqm/errors.hpp"
#include "dqm/evolution.hpp"
#include "dqm/io.hpp"

namespace dqm {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> broadcast(std::vector<double> v, int rank, double fill,
                              const char* what) {
  if (v.empty()) v.assign(rank, fill);
  if (static_cast<int>(v.size()) == 1 && rank > 1)
    v.assign(rank, v.front());
  if (static_cast<int>(v.size()) != rank)
    throw ConfigError(std::string(what) + ": expected " +
                      std::to_string(rank) + " entries");
  return v;
}

struct StateParams {
  std::vector<double> x0, p0, sigma;
};

StateParams resolve_state(const ScenarioConfig& cfg, const Grid& g) {
  StateParams s;
  s.x0 = broadcast(cfg.x0, g.rank(), 0.0, "x0");
  s.p0 = broadcast(cfg.p0, g.rank(), 0.0, "p0");
  s.sigma = broadcast(cfg.sigma, g.rank(), 1.0, "sigma");
  for (double v : s.sigma)
    if (!(v > 0.0)) throw ConfigError("sigma: must be positive");
  return s;
}

// Gaussian envelope exp(-(x-x0)^2/(2 sigma_def)^2): the density then has
// standard deviation sigma_def.
double envelope(double x, double x0, double sigma) {
  const double d = (x - x0) / (2.0 * sigma);
  return std::exp(-d * d);
}

}  // namespace

double snapped_momentum(double p0, double extent, double hbar) {
  const double unit = 2.0 * kPi * hbar / extent;
  return unit * std::round(p0 / unit);
}

GridPtr grid_of(const ScenarioConfig& cfg) {
  try {
    return make_grid(cfg.extents, cfg.points, cfg.masses);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RealField build_potential(const ScenarioConfig& cfg, GridPtr grid) {
  RealField v(grid);
  if (cfg.potential == PotentialKind::harmonic) {
    const Grid& g = *grid;
    std::vector<int> idx(g.rank());
    for (std::size_t i = 0; i < v.size(); ++i) {
      g.unravel(i, idx);
      double sum = 0.0;
      for (int a = 0; a < g.rank(); ++a) {
        const double x = g.coord(a, idx[a]);
        sum += 0.5 * g.mass(a) * cfg.omega * cfg.omega * x * x;
      }
      v[i] = sum;
    }
  }
  return v;
}

void validate_config(const ScenarioConfig& cfg) {
  GridPtr grid = grid_of(cfg);
  const Grid& g = *grid;
  if (!(cfg.hbar > 0.0)) throw ConfigError("hbar must be positive");
  if (!std::isfinite(cfg.lambda)) throw ConfigError("lambda must be finite");
  if (!(cfg.dt > 0.0) || cfg.steps < 1 || cfg.stride < 1)
    throw ConfigError("integrator: dt > 0, steps >= 1, stride >= 1 required");

  const StateParams s = resolve_state(cfg, g);
  const bool has_packet = cfg.scenario == ScenarioKind::gaussian_packet ||
                          cfg.scenario == ScenarioKind::harmonic_coherent ||
                          cfg.scenario == ScenarioKind::two_particle_product ||
                          cfg.scenario == ScenarioKind::two_particle_entangled;
  for (int a = 0; a < g.rank(); ++a) {
    const double dx = g.spacing(a);
    if (has_packet && s.sigma[a] < 4.0 * dx)
      throw ConfigError("resolution: sigma[" + std::to_string(a) + "] = " +
                        std::to_string(s.sigma[a]) + " violates sigma >= 4 dx (dx = " +
                        std::to_string(dx) + ")");
    const double p_limit = 0.5 * kPi * cfg.hbar / dx;
    if (std::abs(s.p0[a]) > p_limit)
      throw ConfigError("resolution: |p0[" + std::to_string(a) + "]| = " +
                        std::to_string(std::abs(s.p0[a])) +
                        " violates |p0| <= 0.5 pi hbar / dx = " +
                        std::to_string(p_limit));
  }
  if (cfg.mode == EvolveMode::classical) {
    const double bound = classical_dt_bound(g, cfg.hbar);
    if (cfg.dt > bound)
      throw ConfigError("stability: classical mode requires dt <= 0.2 m dx^2 / hbar = " +
                        std::to_string(bound) + ", got dt = " +
                        std::to_string(cfg.dt));
  }
  const bool two_particle =
      cfg.scenario == ScenarioKind::two_particle_product ||
      cfg.scenario == ScenarioKind::two_particle_entangled;
  if (two_particle && g.rank() != 2)
    throw ConfigError("two-particle scenarios need a rank-2 grid");
  if ((cfg.scenario == ScenarioKind::harmonic_ground ||
       cfg.scenario == ScenarioKind::harmonic_coherent) &&
      cfg.potential != PotentialKind::harmonic)
    throw ConfigError("harmonic scenarios need potential.type = harmonic");
  if (cfg.scenario == ScenarioKind::from_file && cfg.state_file.empty())
    throw ConfigError("from_file scenario needs state.file");
  if (cfg.ensemble_size < 1) throw ConfigError("ensemble_size must be >= 1");
}

WaveField build_scenario(const ScenarioConfig& cfg) {
  validate_config(cfg);
  GridPtr grid = grid_of(cfg);
  const Grid& g = *grid;
  PhysicalParams params{cfg.hbar, build_potential(cfg, grid), cfg.lambda};
  const StateParams s = resolve_state(cfg, g);

  if (cfg.scenario == ScenarioKind::from_file) {
    ComplexField psi = read_field_binary(cfg.state_file, cfg.masses);
    require_same_grid(*psi.grid, g, "from_file state");
    params.potential = build_potential(cfg, psi.grid);
    return normalize(make_wavefield(std::move(psi), std::move(params)));
  }

  std::vector<int> idx(g.rank());
  std::vector<Complex> psi(g.size());

  switch (cfg.scenario) {
    case ScenarioKind::plane_wave: {
      std::vector<double> p_eff(g.rank());
      for (int a = 0; a < g.rank(); ++a)
        p_eff[a] = snapped_momentum(s.p0[a], g.extent(a), cfg.hbar);
      for (std::size_t i = 0; i < psi.size(); ++i) {
        g.unravel(i, idx);
        double phase = 0.0;
        for (int a = 0; a < g.rank(); ++a)
          phase += p_eff[a] * g.coord(a, idx[a]) / cfg.hbar;
        psi[i] = std::exp(Complex(0.0, phase));
      }
      break;
    }
    case ScenarioKind::gaussian_packet:
    case ScenarioKind::two_particle_product: {
      for (std::size_t i = 0; i < psi.size(); ++i) {
        g.unravel(i, idx);
        double env = 1.0, phase = 0.0;
        for (int a = 0; a < g.rank(); ++a) {
          const double x = g.coord(a, idx[a]);
          env *= envelope(x, s.x0[a], s.sigma[a]);
          phase += s.p0[a] * x / cfg.hbar;
        }
        psi[i] = env * std::exp(Complex(0.0, phase));
      }
      break;
    }
    case ScenarioKind::harmonic_ground:
    case ScenarioKind::harmonic_coherent: {
      const bool coherent = cfg.scenario == ScenarioKind::harmonic_coherent;
      for (std::size_t i = 0; i < psi.size(); ++i) {
        g.unravel(i, idx);
        double env = 1.0, phase = 0.0;
        for (int a = 0; a < g.rank(); ++a) {
          const double x = g.coord(a, idx[a]);
          const double width = std::sqrt(cfg.hbar / (2.0 * g.mass(a) * cfg.omega));
          const double center = coherent ? s.x0[a] : 0.0;
          env *= envelope(x, center, width);
          if (coherent) phase += s.p0[a] * x / cfg.hbar;
        }
        psi[i] = env * std::exp(Complex(0.0, phase));
      }
      break;
    }
    case ScenarioKind::two_particle_entangled: {
      // symmetrized sum of displaced product Gaussians under a common
      // lattice-commensurate phase; node-free for mixing angles in (0, pi/2)
      const double ct = std::cos(cfg.mixing_angle);
      const double st = std::sin(cfg.mixing_angle);
      if (!(ct > 0.0) || !(st > 0.0))
        throw ConfigError("mixing_angle must lie in (0, pi/2) to keep the "
                          "state node-free");
      for (std::size_t i = 0; i < psi.size(); ++i) {
        g.unravel(i, idx);
        const double x1 = g.coord(0, idx[0]);
        const double x2 = g.coord(1, idx[1]);
        const double ga1 = envelope(x1, s.x0[0], s.sigma[0]);
        const double gb1 = envelope(x1, s.x0[1], s.sigma[1]);
        const double ga2 = envelope(x2, s.x0[0], s.sigma[0]);
        const double gb2 = envelope(x2, s.x0[1], s.sigma[1]);
        const double env = ct * ga1 * gb2 + st * gb1 * ga2;
        const double phase = (s.p0[0] * x1 + s.p0[1] * x2) / cfg.hbar;
        psi[i] = env * std::exp(Complex(0.0, phase));
      }
      break;
    }
    default:
      throw ConfigError("unknown scenario");
  }
  return normalize(
      make_wavefield(ComplexField(grid, std::move(psi)), std::move(params)));
}

WaveField random_bandlimited_state(GridPtr grid, std::uint64_t seed,
                                   int max_mode, double amplitude,
                                   double hbar) {
  if (!(amplitude > 0.0) || amplitude >= 1.0)
    throw std::invalid_argument("random state: amplitude must be in (0,1)");
  const Grid& g = *grid;
  for (int a = 0; a < g.rank(); ++a)
    if (max_mode >= g.points(a) / 2)
      throw std::invalid_argument("random state: max_mode too large for grid");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // enumerate mode tuples in lexicographic order; draw order is fixed
  std::vector<std::vector<int>> modes;
  std::vector<int> k(g.rank(), -max_mode);
  while (true) {
    bool all_zero = true;
    for (int v : k) all_zero = all_zero && v == 0;
    if (!all_zero) modes.push_back(k);
    int a = g.rank() - 1;
    while (a >= 0 && ++k[a] > max_mode) k[a--] = -max_mode;
    if (a < 0) break;
  }
  std::vector<Complex> coeff(modes.size());
  double total = 0.0;
  for (auto& c : coeff) {
    c = Complex(gauss(rng), gauss(rng));
    total += std::abs(c);
  }
  const double scale = amplitude / total;
  for (auto& c : coeff) c *= scale;

  std::vector<Complex> psi(g.size(), Complex(1.0, 0.0));
  std::vector<int> idx(g.rank());
  for (std::size_t m = 0; m < modes.size(); ++m) {
    for (std::size_t i = 0; i < psi.size(); ++i) {
      g.unravel(i, idx);
      double phase = 0.0;
      for (int a = 0; a < g.rank(); ++a)
        phase += 2.0 * kPi * modes[m][a] * (g.coord(a, idx[a]) / g.extent(a));
      psi[i] += coeff[m] * std::exp(Complex(0.0, phase));
    }
  }
  PhysicalParams params{hbar, RealField(grid), 0.0};
  return normalize(
      make_wavefield(ComplexField(grid, std::move(psi)), std::move(params)));
}

}  // namespace dqm
