#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dqm/checks.hpp"
#include "dqm/functionals.hpp"
#include "dqm/operators.hpp"
#include "support.hpp"

using namespace dqm;
using namespace dqm::test;

TEST_CASE("quantum potential: uniform density gives zero") {
  auto g = make_grid({8.0 * kPi}, {128}, {1.0});
  WaveField w = plane_wave_state(g, 2.0);
  PolarField p = to_polar(w);
  RealField q = quantum_potential(p, *g, 1.0);
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::abs(q[i]) < 1e-10);
}

TEST_CASE("quantum potential of a unit gaussian: Q = (1 - x^2/2)/4") {
  auto g = make_grid({24.0}, {256}, {1.0});
  WaveField w = gaussian_state(g, 0.0, 0.0, 1.0);
  PolarField p = to_polar(w);
  RealField q = quantum_potential(p, *g, 1.0);
  std::size_t center = 0;
  for (std::size_t i = 0; i < p.rho.size(); ++i)
    if (p.rho[i] > p.rho[center]) center = i;
  CHECK(q[center] == doctest::Approx(0.25).epsilon(1e-8));
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (p.node_mask[i]) continue;
    const double x = g->coord(0, i);
    CHECK(std::abs(q[i] - 0.25 * (1.0 - x * x / 2.0)) < 1e-7);
  }
}

TEST_CASE("harmonic ground state: Q + V is the constant zero-point energy") {
  auto g = make_grid({20.0}, {256}, {1.0});
  const double omega = 1.0;
  WaveField w = harmonic_ground_state(g, omega);
  PolarField p = to_polar(w);
  RealField q = quantum_potential(p, *g, 1.0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (p.node_mask[i]) continue;
    const double x = g->coord(0, i);
    CHECK(std::abs(q[i] + 0.5 * omega * omega * x * x - 0.5 * omega) < 1e-8);
  }
}

TEST_CASE("classical momentum field: plane wave, real state, packet") {
  auto g = make_grid({8.0 * kPi}, {256}, {1.0});
  WaveField plane = plane_wave_state(g, 2.0);
  const double p0 = snapped_momentum(2.0, g->extent(0), 1.0);
  auto field = classical_momentum_field(plane);
  for (std::size_t i = 0; i < field[0].size(); ++i)
    CHECK(field[0][i] == doctest::Approx(p0).epsilon(1e-10));

  WaveField real_state = gaussian_state(g, 0.0, 0.0, 1.5);
  auto zero = classical_momentum_field(real_state);
  const BoolField mask = node_mask_of(density_of(real_state.psi));
  for (std::size_t i = 0; i < zero[0].size(); ++i)
    if (!mask[i]) CHECK(std::abs(zero[0][i]) < 1e-8);

  auto g2 = make_grid({40.0}, {512}, {1.0});
  WaveField packet = gaussian_state(g2, 0.0, 2.0, 1.0);
  auto pf = classical_momentum_field(packet);
  const BoolField m2 = node_mask_of(density_of(packet.psi));
  for (std::size_t i = 0; i < pf[0].size(); ++i)
    if (!m2[i]) CHECK(std::abs(pf[0][i] - 2.0) < 1e-8);
}

TEST_CASE("deformed momentum: lambda 0 reduces to -i hbar grad") {
  auto g = make_grid({16.0}, {128}, {1.0});
  WaveField w = random_bandlimited_state(g, 42);
  const DeformedMomentumSpec spec(w, 0.0, false);
  const auto p = apply_deformed_momentum(spec, w.psi, 1.0);
  const auto grads = gradient(w.psi);
  for (std::size_t i = 0; i < w.psi.size(); ++i)
    CHECK(std::abs(p[0][i] - Complex(0.0, -1.0) * grads[0][i]) < 1e-13);
}

TEST_CASE("deformed momentum: lambda 1 eigen-action on plane wave and packet") {
  auto g = make_grid({8.0 * kPi}, {512}, {1.0});
  WaveField plane = plane_wave_state(g, 2.0);
  const double p0 = snapped_momentum(2.0, g->extent(0), 1.0);
  {
    const DeformedMomentumSpec spec(plane, 1.0, false);
    const auto p = apply_deformed_momentum(spec, plane.psi, 1.0);
    const double scale = max_abs(plane.psi);
    for (std::size_t i = 0; i < plane.psi.size(); ++i)
      CHECK(std::abs(p[0][i] - p0 * plane.psi[i]) < 1e-12 * scale);
  }
  // spec-pinned grid [-20, 20), 512 pts; deviations measured off-mask
  auto g2 = make_grid({40.0}, {512}, {1.0});
  WaveField packet = gaussian_state(g2, 0.0, 2.0, 1.0);
  {
    const DeformedMomentumSpec spec(packet, 1.0, false);
    const auto p = apply_deformed_momentum(spec, packet.psi, 1.0);
    const BoolField mask = node_mask_of(density_of(packet.psi));
    const double scale = max_abs(packet.psi);
    for (std::size_t i = 0; i < packet.psi.size(); ++i)
      if (!mask[i])
        CHECK(std::abs(p[0][i] - 2.0 * packet.psi[i]) < 1e-8 * scale);
  }
}

TEST_CASE("dagger flips the deformation sign") {
  auto g = make_grid({16.0}, {128}, {1.0});
  WaveField w = random_bandlimited_state(g, 3);
  const DeformedMomentumSpec plus(w, 0.7, false);
  const DeformedMomentumSpec minus(w, 0.7, true);
  const auto pp = apply_deformed_momentum(plus, w.psi, 1.0);
  const auto pm = apply_deformed_momentum(minus, w.psi, 1.0);
  const auto grads = gradient(w.psi);
  for (std::size_t i = 0; i < w.psi.size(); ++i) {
    const Complex avg = 0.5 * (pp[0][i] + pm[0][i]);
    CHECK(std::abs(avg - Complex(0.0, -1.0) * grads[0][i]) < 1e-12);
  }
}

TEST_CASE("deformed kinetic: endpoints") {
  auto g = make_grid({16.0}, {128}, {1.0});
  WaveField w = random_bandlimited_state(g, 9);

  // lambda = 0: the spectral kinetic operator
  const ComplexField k0 = apply_deformed_kinetic(w, 0.0);
  const ComplexField lap = laplacian(w.psi);
  double dev = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < k0.size(); ++i) {
    dev = std::max(dev, std::abs(k0[i] + 0.5 * lap[i]));
    scale = std::max(scale, std::abs(k0[i]));
  }
  CHECK(dev / scale < 1e-10);

  // lambda = 1 on a plane wave: (p0^2/2m) psi
  auto gp = make_grid({8.0 * kPi}, {256}, {1.0});
  WaveField plane = plane_wave_state(gp, 2.0);
  const double p0 = snapped_momentum(2.0, gp->extent(0), 1.0);
  const ComplexField k1 = apply_deformed_kinetic(plane, 1.0);
  for (std::size_t i = 0; i < k1.size(); ++i)
    CHECK(std::abs(k1[i] - 0.5 * p0 * p0 * plane.psi[i]) < 1e-10);

  // lambda = 1 on a real stationary state: K_cl psi vanishes off-mask
  auto gh = make_grid({20.0}, {256}, {1.0});
  WaveField ground = harmonic_ground_state(gh, 1.0);
  const ComplexField kcl = apply_deformed_kinetic(ground, 1.0);
  const double smax = max_abs(ground.psi);
  const BoolField mask = node_mask_of(density_of(ground.psi));
  for (std::size_t i = 0; i < kcl.size(); ++i)
    if (!mask[i]) CHECK(std::abs(kcl[i]) < 1e-7 * smax);
}

TEST_CASE("kinetic interpolation: <K_lambda> = T_cl + (1-lambda)^2 W") {
  auto g = make_grid({16.0}, {128}, {1.0});
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    WaveField w = random_bandlimited_state(g, seed);
    const KineticFit fit = fit_kinetic_interpolation(w);
    const double t_cl = classical_kinetic_energy(w);
    const double wz = weizsacker(density_of(w.psi), 1.0);
    const double scale = std::max(1.0, std::abs(fit.constant) + std::abs(fit.quadratic));
    CHECK(std::abs(fit.linear) < 1e-9 * scale);
    CHECK(std::abs(fit.constant - t_cl) < 1e-8 * scale);
    CHECK(std::abs(fit.quadratic - wz) < 1e-8 * scale);
    // hermiticity surrogate: <K_lambda> real
    for (double lambda : {0.0, 0.5, 1.0}) {
      const Complex k = expectation(apply_deformed_kinetic(w, lambda), w);
      CHECK(std::abs(k.imag()) < 1e-10 * std::max(1.0, std::abs(k.real())));
    }
  }
}

TEST_CASE("momentum expectation identities on random node-free states") {
  auto g1 = make_grid({16.0}, {128}, {1.0});
  auto g2 = make_grid({12.0, 10.0}, {32, 32}, {1.0, 2.0});
  for (int seed = 0; seed < 10; ++seed) {
    WaveField w = seed % 2 == 0 ? random_bandlimited_state(g1, seed, 6, 0.3)
                                : random_bandlimited_state(g2, seed, 4, 0.3);
    const auto p = momentum_expectation(w);
    const auto pcl = classical_momentum_expectation(w);
    for (std::size_t a = 0; a < p.size(); ++a)
      CHECK(std::abs(p[a] - pcl[a]) < 1e-10);
    for (double lambda : {0.25, 1.0}) {
      const auto pl = deformed_momentum_expectation(w, lambda);
      for (std::size_t a = 0; a < p.size(); ++a)
        CHECK(std::abs(pl[a] - p[a]) < 1e-10);
    }
  }
}

TEST_CASE("factorization residual") {
  auto gp = make_grid({8.0 * kPi}, {256}, {1.0});
  CHECK(factorization_residual(plane_wave_state(gp, 2.0)) < 1e-12);

  auto gg = make_grid({40.0}, {512}, {1.0});
  CHECK(factorization_residual(gaussian_state(gg, 0.0, 2.0, 1.0)) < 1e-8);

  auto gr = make_grid({16.0}, {256}, {1.0});
  for (std::uint64_t seed : {21u, 22u, 23u, 24u})
    CHECK(factorization_residual(random_bandlimited_state(gr, seed)) < 1e-7);
}

TEST_CASE("witten deformed gradient: uniform density reduces to the gradient") {
  auto g = make_grid({8.0 * kPi}, {128}, {1.0});
  WaveField plane = plane_wave_state(g, 1.0);
  RealField rho = density_of(plane.psi);
  WaveField operand = random_bandlimited_state(g, 5);
  const auto d = witten_deformed_gradient(operand.psi, rho, 0.8);
  const auto grads = gradient(operand.psi);
  for (std::size_t i = 0; i < operand.psi.size(); ++i)
    CHECK(std::abs(d[0][i] - grads[0][i]) < 1e-10);
}

TEST_CASE("witten deformed gradient matches the deformed momentum") {
  // random node-free states, arbitrary band-limited operands
  auto g = make_grid({16.0}, {128}, {1.0});
  for (std::uint64_t seed : {31u, 32u}) {
    WaveField w = random_bandlimited_state(g, seed);
    WaveField operand = random_bandlimited_state(g, seed + 100);
    const RealField rho = density_of(w.psi);
    for (double lambda : {0.0, 0.5, 1.0}) {
      const auto witten = witten_deformed_gradient(operand.psi, rho, lambda);
      const DeformedMomentumSpec spec(w, lambda, false);
      const auto p = apply_deformed_momentum(spec, operand.psi, 1.0);
      double dev = 0.0, ref = 0.0;
      for (std::size_t i = 0; i < rho.size(); ++i) {
        dev = std::max(dev,
                       std::abs(Complex(0.0, -1.0) * witten[0][i] - p[0][i]));
        ref = std::max(ref, std::abs(p[0][i]));
      }
      CHECK(dev / ref < 1e-8);
    }
  }

  // system-state operand on the masked wide-box gaussian (snapped p0 so the
  // lambda = 1 scaled field is an exact lattice mode)
  auto gg = make_grid({40.0}, {512}, {1.0});
  const double p0 = snapped_momentum(2.0, gg->extent(0), 1.0);
  WaveField packet = gaussian_state(gg, 0.0, p0, 1.0);
  const RealField rho = density_of(packet.psi);
  const BoolField mask = node_mask_of(rho);
  for (double lambda : {0.0, 0.5, 1.0}) {
    const auto witten = witten_deformed_gradient(packet.psi, rho, lambda);
    const DeformedMomentumSpec spec(packet, lambda, false);
    const auto p = apply_deformed_momentum(spec, packet.psi, 1.0);
    double dev = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      if (mask[i]) continue;
      dev = std::max(dev,
                     std::abs(Complex(0.0, -1.0) * witten[0][i] - p[0][i]));
      ref = std::max(ref, std::abs(p[0][i]));
    }
    CHECK(dev / ref < 1e-8);
  }
}

TEST_CASE("grid mismatch rejected") {
  auto g = make_grid({16.0}, {128}, {1.0});
  auto other = make_grid({16.0}, {64}, {1.0});
  WaveField w = random_bandlimited_state(g, 1);
  const DeformedMomentumSpec spec(w, 0.5, false);
  CHECK_THROWS(apply_deformed_momentum(spec, ComplexField(other), 1.0));
  CHECK_THROWS(witten_deformed_gradient(ComplexField(other),
                                        density_of(w.psi), 0.5));
}

TEST_CASE("full invariant check suite passes on a gaussian packet") {
  auto g = make_grid({16.0}, {256}, {1.0});
  WaveField w = gaussian_state(g, 0.0, 2.0, 1.0);
  const auto results = run_invariant_checks(w);
  for (const auto& r : results) {
    INFO(r.name, " measured ", r.measured, " tol ", r.tolerance);
    CHECK(r.pass);
  }
}
