#include "dqm/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "dqm/detail/fft.hpp"

namespace dqm {

Grid::Grid(std::vector<double> extents, std::vector<int> points,
           std::vector<double> masses)
    : extents_(std::move(extents)),
      masses_(std::move(masses)),
      points_(std::move(points)) {
  const std::size_t rank = points_.size();
  if (rank == 0 || rank > 3)
    throw std::invalid_argument("grid: rank must be 1..3");
  if (extents_.size() != rank || masses_.size() != rank)
    throw std::invalid_argument("grid: extents/points/masses length mismatch");
  spacings_.resize(rank);
  for (std::size_t a = 0; a < rank; ++a) {
    if (points_[a] < 8 || points_[a] % 2 != 0)
      throw std::invalid_argument("grid: axis " + std::to_string(a) +
                                  " needs an even point count >= 8");
    if (!(extents_[a] > 0.0) || !std::isfinite(extents_[a]))
      throw std::invalid_argument("grid: extent must be positive and finite");
    if (!(masses_[a] > 0.0) || !std::isfinite(masses_[a]))
      throw std::invalid_argument("grid: mass must be positive and finite");
    spacings_[a] = extents_[a] / points_[a];
    size_ *= static_cast<std::size_t>(points_[a]);
    cell_volume_ *= spacings_[a];
    box_volume_ *= extents_[a];
  }
  strides_.assign(rank, 1);
  for (int a = static_cast<int>(rank) - 2; a >= 0; --a)
    strides_[a] = strides_[a + 1] * static_cast<std::size_t>(points_[a + 1]);
}

double Grid::wavenumber(int axis, int bin) const {
  const int n = points_[axis];
  const int s = bin <= n / 2 ? bin : bin - n;
  return 2.0 * std::numbers::pi * s / extents_[axis];
}

void Grid::unravel(std::size_t flat, std::span<int> idx) const {
  for (int a = 0; a < rank(); ++a) {
    idx[a] = static_cast<int>(flat / strides_[a]);
    flat %= strides_[a];
  }
}

std::size_t Grid::flatten(std::span<const int> idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < rank(); ++a)
    flat += static_cast<std::size_t>(idx[a]) * strides_[a];
  return flat;
}

bool Grid::operator==(const Grid& other) const {
  return points_ == other.points_ && extents_ == other.extents_ &&
         masses_ == other.masses_;
}

GridPtr make_grid(std::vector<double> extents, std::vector<int> points,
                  std::vector<double> masses) {
  return std::make_shared<const Grid>(std::move(extents), std::move(points),
                                      std::move(masses));
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b))
    throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

namespace {

void check_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x))
      throw std::invalid_argument("field: non-finite sample");
}

void check_finite(const std::vector<Complex>& v) {
  for (const Complex& x : v)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
      throw std::invalid_argument("field: non-finite sample");
}

void check_finite(const std::vector<std::uint8_t>&) {}

}  // namespace

template <typename T>
Field<T>::Field(GridPtr g) : grid(std::move(g)), values(grid->size(), T{}) {}

template <typename T>
Field<T>::Field(GridPtr g, std::vector<T> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid->size())
    throw std::invalid_argument("field: sample count does not match grid");
  check_finite(values);
}

template struct Field<double>;
template struct Field<Complex>;
template struct Field<std::uint8_t>;

namespace {

// Multiplies the spectrum along one axis by i*k (Nyquist zeroed) or by -k^2
// (Nyquist kept), walking the row-major layout.
enum class Symbol { FirstDerivative, SecondDerivative };

void apply_axis_symbol(const Grid& grid, std::vector<Complex>& spec, int axis,
                       Symbol symbol, double weight = 1.0) {
  const int n = grid.points(axis);
  std::vector<Complex> factor(n);
  for (int j = 0; j < n; ++j) {
    const double k = grid.wavenumber(axis, j);
    if (symbol == Symbol::FirstDerivative)
      factor[j] = (j == n / 2) ? Complex(0.0, 0.0) : Complex(0.0, k);
    else
      factor[j] = Complex(-k * k * weight, 0.0);
  }
  const std::size_t stride = grid.stride(axis);
  const std::size_t block = stride * static_cast<std::size_t>(n);
  for (std::size_t base = 0; base < spec.size(); base += block)
    for (int j = 0; j < n; ++j) {
      const std::size_t off = base + static_cast<std::size_t>(j) * stride;
      for (std::size_t i = 0; i < stride; ++i) spec[off + i] *= factor[j];
    }
}

std::vector<Complex> to_spectrum(const ComplexField& f) {
  std::vector<Complex> spec = f.values;
  detail::fft_forward(*f.grid, spec);
  return spec;
}

ComplexField from_spectrum(GridPtr grid, std::vector<Complex> spec) {
  detail::fft_backward(*grid, spec);
  return ComplexField(std::move(grid), std::move(spec));
}

ComplexField complexify(const RealField& f) {
  std::vector<Complex> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = Complex(f[i], 0.0);
  return ComplexField(f.grid, std::move(v));
}

RealField realify(const ComplexField& f) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = f[i].real();
  return RealField(f.grid, std::move(v));
}

}  // namespace

std::vector<ComplexField> gradient(const ComplexField& f) {
  const std::vector<Complex> spec = to_spectrum(f);
  std::vector<ComplexField> out;
  out.reserve(f.grid->rank());
  for (int a = 0; a < f.grid->rank(); ++a) {
    std::vector<Complex> s = spec;
    apply_axis_symbol(*f.grid, s, a, Symbol::FirstDerivative);
    out.push_back(from_spectrum(f.grid, std::move(s)));
  }
  return out;
}

std::vector<RealField> gradient(const RealField& f) {
  auto grads = gradient(complexify(f));
  std::vector<RealField> out;
  out.reserve(grads.size());
  for (auto& g : grads) out.push_back(realify(g));
  return out;
}

ComplexField partial_derivative(const ComplexField& f, int axis) {
  std::vector<Complex> spec = to_spectrum(f);
  apply_axis_symbol(*f.grid, spec, axis, Symbol::FirstDerivative);
  return from_spectrum(f.grid, std::move(spec));
}

ComplexField weighted_laplacian(const ComplexField& f,
                                std::span<const double> weights) {
  if (static_cast<int>(weights.size()) != f.grid->rank())
    throw std::invalid_argument("weighted_laplacian: weight count mismatch");
  // One transform pair: accumulate sum_a -w_a k_a^2 in spectral space.
  std::vector<Complex> spec = to_spectrum(f);
  const Grid& g = *f.grid;
  std::vector<int> idx(g.rank());
  std::vector<std::vector<double>> k2(g.rank());
  for (int a = 0; a < g.rank(); ++a) {
    k2[a].resize(g.points(a));
    for (int j = 0; j < g.points(a); ++j) {
      const double k = g.wavenumber(a, j);
      k2[a][j] = k * k;
    }
  }
  for (std::size_t i = 0; i < spec.size(); ++i) {
    g.unravel(i, idx);
    double sym = 0.0;
    for (int a = 0; a < g.rank(); ++a) sym -= weights[a] * k2[a][idx[a]];
    spec[i] *= sym;
  }
  return from_spectrum(f.grid, std::move(spec));
}

RealField weighted_laplacian(const RealField& f,
                             std::span<const double> weights) {
  return realify(weighted_laplacian(complexify(f), weights));
}

ComplexField laplacian(const ComplexField& f) {
  std::vector<double> ones(f.grid->rank(), 1.0);
  return weighted_laplacian(f, ones);
}

RealField laplacian(const RealField& f) {
  return realify(laplacian(complexify(f)));
}

double integrate(const RealField& f) {
  double sum = 0.0;
  for (double v : f.values) sum += v;
  return sum * f.grid->cell_volume();
}

Complex integrate(const ComplexField& f) {
  Complex sum = 0.0;
  for (const Complex& v : f.values) sum += v;
  return sum * f.grid->cell_volume();
}

}  // namespace dqm
