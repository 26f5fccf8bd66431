#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dqm/grid.hpp"

using namespace dqm;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexField sample_1d(GridPtr g, auto&& fn) {
  std::vector<Complex> v(g->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(g->coord(0, i));
  return ComplexField(g, std::move(v));
}

double max_abs_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("make_grid derives spacings and coordinates") {
  auto g = make_grid({20.0}, {256}, {1.0});
  CHECK(g->rank() == 1);
  CHECK(g->spacing(0) == doctest::Approx(0.078125).epsilon(1e-15));
  CHECK(g->spacing(0) * g->points(0) == doctest::Approx(20.0).epsilon(1e-15));
  CHECK(g->coord(0, 0) == doctest::Approx(-10.0));
  CHECK(g->coord(0, 128) == doctest::Approx(0.0));

  auto g2 = make_grid({20.0, 20.0}, {64, 64}, {1.0, 2.0});
  CHECK(g2->rank() == 2);
  CHECK(g2->size() == 64u * 64u);
  CHECK(g2->mass(1) == 2.0);
}

TEST_CASE("make_grid rejects bad axes") {
  CHECK_THROWS(make_grid({10.0}, {7}, {1.0}));    // odd
  CHECK_THROWS(make_grid({10.0}, {4}, {1.0}));    // undersized
  CHECK_THROWS(make_grid({-10.0}, {16}, {1.0}));  // extent
  CHECK_THROWS(make_grid({10.0}, {16}, {0.0}));   // mass
  CHECK_THROWS(make_grid({10.0, 10.0}, {16}, {1.0}));
}

TEST_CASE("field construction validates samples") {
  auto g = make_grid({10.0}, {16}, {1.0});
  CHECK_THROWS(RealField(g, std::vector<double>(15, 0.0)));
  std::vector<double> bad(16, 0.0);
  bad[3] = std::nan("");
  CHECK_THROWS(RealField(g, bad));
}

TEST_CASE("gradient: resolved plane wave is exact to roundoff") {
  auto g = make_grid({20.0}, {256}, {1.0});
  const double k = 2.0 * kPi / 20.0;
  auto f = sample_1d(g, [&](double x) { return std::sin(k * x); });
  auto expect = sample_1d(g, [&](double x) { return k * std::cos(k * x); });
  CHECK(max_abs_diff(gradient(f)[0], expect) < 1e-10);

  auto c = sample_1d(g, [&](double) { return 1.7; });
  auto zero = sample_1d(g, [&](double) { return 0.0; });
  CHECK(max_abs_diff(gradient(c)[0], zero) < 1e-14);
}

TEST_CASE("gradient: gaussian against the analytic derivative") {
  auto g = make_grid({20.0}, {256}, {1.0});
  auto f = sample_1d(g, [](double x) { return std::exp(-x * x); });
  auto expect =
      sample_1d(g, [](double x) { return -2.0 * x * std::exp(-x * x); });
  CHECK(max_abs_diff(gradient(f)[0], expect) < 1e-8);
}

TEST_CASE("laplacian examples") {
  auto g = make_grid({20.0}, {256}, {1.0});
  const double k = 2.0 * kPi / 20.0;
  auto f = sample_1d(g, [&](double x) { return std::sin(k * x); });
  auto expect =
      sample_1d(g, [&](double x) { return -k * k * std::sin(k * x); });
  CHECK(max_abs_diff(laplacian(f), expect) < 1e-10);

  auto gauss = sample_1d(g, [](double x) { return std::exp(-x * x); });
  auto lap = sample_1d(
      g, [](double x) { return (4.0 * x * x - 2.0) * std::exp(-x * x); });
  CHECK(max_abs_diff(laplacian(gauss), lap) < 1e-7);

  auto c = sample_1d(g, [&](double) { return 0.3; });
  auto zero = sample_1d(g, [&](double) { return 0.0; });
  CHECK(max_abs_diff(laplacian(c), zero) < 1e-14);
}

TEST_CASE("integrate: rectangle rule on the periodic box") {
  auto g = make_grid({20.0}, {256}, {1.0});
  auto one = sample_1d(g, [](double) { return 1.0; });
  CHECK(integrate(one).real() == doctest::Approx(20.0).epsilon(1e-14));

  // normalized gaussian density
  const double s = 1.0;
  std::vector<double> rho(g->size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double x = g->coord(0, i);
    rho[i] = std::exp(-x * x / (2 * s * s)) / std::sqrt(2 * kPi * s * s);
  }
  CHECK(integrate(RealField(g, rho)) == doctest::Approx(1.0).epsilon(1e-12));

  const double k = 2.0 * kPi / 20.0;
  auto sine = sample_1d(g, [&](double x) { return std::sin(k * x); });
  CHECK(std::abs(integrate(sine)) < 1e-12);
}

TEST_CASE("linearity of gradient and laplacian") {
  auto g = make_grid({12.0}, {64}, {1.0});
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  auto rand_field = [&] {
    // band-limited random: few low modes
    std::vector<Complex> v(g->size(), 0.0);
    for (int m = -5; m <= 5; ++m) {
      const Complex c(gauss(rng), gauss(rng));
      for (std::size_t i = 0; i < v.size(); ++i)
        v[i] += c * std::exp(Complex(0.0, 2.0 * kPi * m * g->coord(0, i) / 12.0));
    }
    return ComplexField(g, std::move(v));
  };
  auto f = rand_field();
  auto h = rand_field();
  const Complex a(0.7, -0.3), b(-1.2, 0.4);
  ComplexField combo(g);
  for (std::size_t i = 0; i < combo.size(); ++i)
    combo[i] = a * f[i] + b * h[i];

  auto gf = gradient(f)[0];
  auto gh = gradient(h)[0];
  auto gc = gradient(combo)[0];
  double rel = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < gc.size(); ++i) {
    rel = std::max(rel, std::abs(gc[i] - (a * gf[i] + b * gh[i])));
    scale = std::max(scale, std::abs(gc[i]));
  }
  CHECK(rel / scale < 1e-12);

  auto lf = laplacian(f);
  auto lh = laplacian(h);
  auto lc = laplacian(combo);
  rel = scale = 0.0;
  for (std::size_t i = 0; i < lc.size(); ++i) {
    rel = std::max(rel, std::abs(lc[i] - (a * lf[i] + b * lh[i])));
    scale = std::max(scale, std::abs(lc[i]));
  }
  CHECK(rel / scale < 1e-12);
}

TEST_CASE("laplacian equals divergence of gradient on band-limited fields") {
  auto g = make_grid({10.0, 14.0}, {32, 32}, {1.0, 2.0});
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  std::vector<Complex> v(g->size(), 0.0);
  std::vector<int> idx(2);
  for (int m0 = -4; m0 <= 4; ++m0)
    for (int m1 = -4; m1 <= 4; ++m1) {
      const Complex c(gauss(rng), gauss(rng));
      for (std::size_t i = 0; i < v.size(); ++i) {
        g->unravel(i, idx);
        const double ph = 2.0 * kPi * (m0 * g->coord(0, idx[0]) / 10.0 +
                                       m1 * g->coord(1, idx[1]) / 14.0);
        v[i] += c * std::exp(Complex(0.0, ph));
      }
    }
  ComplexField f(g, std::move(v));
  auto lap = laplacian(f);
  auto grads = gradient(f);
  ComplexField div(g);
  for (int a = 0; a < 2; ++a) {
    auto d = partial_derivative(grads[a], a);
    for (std::size_t i = 0; i < div.size(); ++i) div[i] += d[i];
  }
  double rel = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < div.size(); ++i) {
    rel = std::max(rel, std::abs(div[i] - lap[i]));
    scale = std::max(scale, std::abs(lap[i]));
  }
  CHECK(rel / scale < 1e-10);

  // integral of a derivative vanishes on the periodic box
  for (int a = 0; a < 2; ++a)
    CHECK(std::abs(integrate(grads[a])) < 1e-10);
}

TEST_CASE("weighted laplacian matches per-axis second derivatives") {
  auto g = make_grid({10.0, 10.0}, {16, 16}, {1.0, 3.0});
  std::vector<Complex> v(g->size());
  std::vector<int> idx(2);
  for (std::size_t i = 0; i < v.size(); ++i) {
    g->unravel(i, idx);
    const double x = g->coord(0, idx[0]), y = g->coord(1, idx[1]);
    v[i] = std::exp(Complex(0.0, 2.0 * kPi * (x + 2.0 * y) / 10.0));
  }
  ComplexField f(g, std::move(v));
  const std::vector<double> w{0.5, 0.25};
  auto lw = weighted_laplacian(f, w);
  const double k1 = 2.0 * kPi / 10.0, k2 = 4.0 * kPi / 10.0;
  const double sym = -(w[0] * k1 * k1 + w[1] * k2 * k2);
  double dev = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    dev = std::max(dev, std::abs(lw[i] - sym * f[i]));
  CHECK(dev < 1e-10);
}
