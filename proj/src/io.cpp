#include "dqm/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <vector>

#include "dqm/errors.hpp"

namespace dqm {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void write_indices(const Grid& g, std::size_t flat, std::ostream& os) {
  std::vector<int> idx(g.rank());
  g.unravel(flat, idx);
  for (int a = 0; a < g.rank(); ++a) os << idx[a] << ',';
}

template <typename T>
void write_raw(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void write_field_csv(const RealField& f, std::ostream& os) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    write_indices(*f.grid, i, os);
    os << format_double(f[i]) << '\n';
  }
}

void write_field_csv(const ComplexField& f, std::ostream& os) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    write_indices(*f.grid, i, os);
    os << format_double(f[i].real()) << ',' << format_double(f[i].imag())
       << '\n';
  }
}

void write_polar_csv(const PolarField& p, std::ostream& os) {
  for (std::size_t i = 0; i < p.rho.size(); ++i) {
    write_indices(*p.rho.grid, i, os);
    os << format_double(p.rho[i]) << ',' << format_double(p.phase[i]) << ','
       << int(p.node_mask[i]) << '\n';
  }
}

void write_field_binary(const ComplexField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  const Grid& g = *f.grid;
  write_raw(os, static_cast<std::uint32_t>(g.rank()));
  for (int a = 0; a < g.rank(); ++a)
    write_raw(os, static_cast<std::uint32_t>(g.points(a)));
  for (int a = 0; a < g.rank(); ++a) write_raw(os, g.extent(a));
  for (const Complex& v : f.values) {
    write_raw(os, v.real());
    write_raw(os, v.imag());
  }
  if (!os) throw ConfigError("write failed: " + path);
}

ComplexField read_field_binary(const std::string& path,
                               std::vector<double> masses) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open for reading: " + path);
  const auto rank = read_raw<std::uint32_t>(is);
  if (!is || rank == 0 || rank > 3)
    throw ConfigError("corrupt field dump (rank): " + path);
  std::vector<int> points(rank);
  for (auto& p : points) p = static_cast<int>(read_raw<std::uint32_t>(is));
  std::vector<double> extents(rank);
  for (auto& e : extents) e = read_raw<double>(is);
  if (!is) throw ConfigError("corrupt field dump (header): " + path);
  GridPtr grid;
  try {
    grid = make_grid(std::move(extents), std::move(points), std::move(masses));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid field dump header: ") + e.what());
  }
  std::vector<Complex> values(grid->size());
  for (auto& v : values) {
    const double re = read_raw<double>(is);
    const double im = read_raw<double>(is);
    v = Complex(re, im);
  }
  if (!is) throw ConfigError("corrupt field dump (payload): " + path);
  return ComplexField(grid, std::move(values));
}

}  // namespace dqm
