#pragma once

#include <iosfwd>
#include <string>

#include "dqm/wavefield.hpp"

namespace dqm {

// CSV: one row per lattice point, columns are the per-axis indices followed
// by the sample (real) or by real,imag (complex). Doubles print with 17
// significant digits so identical runs produce bit-identical files.
void write_field_csv(const RealField& f, std::ostream& os);
void write_field_csv(const ComplexField& f, std::ostream& os);

// Polar CSV: indices..., rho, S, mask.
void write_polar_csv(const PolarField& p, std::ostream& os);

// Compact binary dump, little-endian: u32 rank, u32 points[rank],
// f64 extents[rank], then f64 samples (re,im interleaved for complex).
void write_field_binary(const ComplexField& f, const std::string& path);
ComplexField read_field_binary(const std::string& path,
                               std::vector<double> masses);

std::string format_double(double v);

}  // namespace dqm
