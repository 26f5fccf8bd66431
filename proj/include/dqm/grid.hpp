#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace dqm {

using Real = double;
using Complex = std::complex<double>;

// Uniform periodic lattice over a D-dimensional box, row-major storage.
// Axis a spans [-L_a/2, L_a/2) with N_a samples at x_a[j] = -L_a/2 + j*dx_a.
// Each axis carries the mass of the particle owning that coordinate.
class Grid {
 public:
  Grid(std::vector<double> extents, std::vector<int> points,
       std::vector<double> masses);

  int rank() const { return static_cast<int>(points_.size()); }
  std::size_t size() const { return size_; }
  double extent(int axis) const { return extents_[axis]; }
  int points(int axis) const { return points_[axis]; }
  double mass(int axis) const { return masses_[axis]; }
  double spacing(int axis) const { return spacings_[axis]; }
  double cell_volume() const { return cell_volume_; }
  double box_volume() const { return box_volume_; }
  double coord(int axis, int index) const {
    return -0.5 * extents_[axis] + spacings_[axis] * index;
  }
  // FFT-order angular wavenumber of bin j: 2*pi*s/L, s = j for j <= N/2, else j-N.
  double wavenumber(int axis, int bin) const;
  std::span<const double> masses() const { return masses_; }
  std::span<const int> shape() const { return points_; }

  std::size_t stride(int axis) const { return strides_[axis]; }
  void unravel(std::size_t flat, std::span<int> idx) const;
  std::size_t flatten(std::span<const int> idx) const;

  bool operator==(const Grid& other) const;

 private:
  std::vector<double> extents_, masses_, spacings_;
  std::vector<int> points_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
  double cell_volume_ = 1.0;
  double box_volume_ = 1.0;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(std::vector<double> extents, std::vector<int> points,
                  std::vector<double> masses);

template <typename T>
struct Field {
  GridPtr grid;
  std::vector<T> values;

  Field() = default;
  explicit Field(GridPtr g);  // zero-filled
  Field(GridPtr g, std::vector<T> v);

  T& operator[](std::size_t i) { return values[i]; }
  const T& operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

using RealField = Field<double>;
using ComplexField = Field<Complex>;
using BoolField = Field<std::uint8_t>;

// Spectral differentiation on the periodic lattice. First derivatives use the
// symmetric wavenumber set with the Nyquist mode zeroed; second derivatives
// keep the Nyquist mode. Exact (to roundoff) for resolved trigonometric data.
std::vector<ComplexField> gradient(const ComplexField& f);
std::vector<RealField> gradient(const RealField& f);
ComplexField laplacian(const ComplexField& f);
RealField laplacian(const RealField& f);
// sum_a w_a d^2f/dx_a^2 in one transform pair.
ComplexField weighted_laplacian(const ComplexField& f, std::span<const double> weights);
RealField weighted_laplacian(const RealField& f, std::span<const double> weights);
ComplexField partial_derivative(const ComplexField& f, int axis);

// Rectangle-rule quadrature (exact for band-limited periodic integrands).
double integrate(const RealField& f);
Complex integrate(const ComplexField& f);

void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace dqm
