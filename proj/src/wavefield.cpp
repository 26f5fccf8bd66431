#include "dqm/wavefield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dqm {

namespace {
constexpr double kNodeRel = 1e-12;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_to_pi(double d) {
  return d - kTwoPi * std::floor(d / kTwoPi + 0.5);
}
}  // namespace

WaveField make_wavefield(ComplexField psi, PhysicalParams params) {
  if (params.potential.grid)
    require_same_grid(*psi.grid, *params.potential.grid, "wavefield");
  else
    params.potential = RealField(psi.grid);  // default V = 0
  if (!(params.hbar > 0.0))
    throw std::invalid_argument("wavefield: hbar must be positive");
  if (!std::isfinite(params.lambda))
    throw std::invalid_argument("wavefield: lambda must be finite");
  WaveField w{std::move(psi), std::move(params)};
  const double n2 = norm2(w);
  if (!(n2 > 0.0) || !std::isfinite(n2))
    throw std::invalid_argument("wavefield: norm must be positive and finite");
  return w;
}

RealField density_of(const ComplexField& psi) {
  std::vector<double> rho(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) rho[i] = std::norm(psi[i]);
  return RealField(psi.grid, std::move(rho));
}

double node_threshold(const RealField& rho) {
  double m = 0.0;
  for (double v : rho.values) m = std::max(m, v);
  return kNodeRel * m;
}

BoolField node_mask_of(const RealField& rho) {
  const double eps = node_threshold(rho);
  BoolField mask(rho.grid);
  for (std::size_t i = 0; i < rho.size(); ++i)
    mask[i] = rho[i] <= eps ? 1 : 0;
  return mask;
}

double mask_point_fraction(const BoolField& mask) {
  std::size_t n = 0;
  for (auto m : mask.values) n += m;
  return static_cast<double>(n) / static_cast<double>(mask.size());
}

double mask_mass_fraction(const RealField& rho, const BoolField& mask) {
  double total = 0.0, masked = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    total += rho[i];
    if (mask[i]) masked += rho[i];
  }
  return total > 0.0 ? masked / total : 1.0;
}

void require_mass_mostly_unmasked(const RealField& rho, const BoolField& mask,
                                  const char* what) {
  if (mask_mass_fraction(rho, mask) > 0.5)
    throw std::domain_error(std::string(what) +
                            ": phase undefined (masked cells carry most of "
                            "the probability mass)");
}

double norm2(const WaveField& w) { return integrate(density_of(w.psi)); }

WaveField normalize(const WaveField& w) {
  const double n2 = norm2(w);
  if (!(n2 > 0.0) || !std::isfinite(n2))
    throw std::invalid_argument("normalize: zero or non-finite norm");
  const double scale = 1.0 / std::sqrt(n2);
  ComplexField psi = w.psi;
  for (auto& v : psi.values) v *= scale;
  return WaveField{std::move(psi), w.params};
}

namespace {

// Unwraps theta (radians) in place. Lines are swept axis by axis, axis 0
// first, anchored at the density maximum so the reference path runs through
// well-resolved cells. Adjacent samples are assumed to differ by less than pi
// off the node mask (resolution requirement on S).
void unwrap_phase(const Grid& g, const std::vector<double>& raw,
                  std::vector<double>& out, std::size_t anchor) {
  const int rank = g.rank();
  std::vector<int> anchor_idx(rank), idx(rank);
  g.unravel(anchor, anchor_idx);
  out.assign(raw.size(), 0.0);
  out[anchor] = raw[anchor];
  for (int a = 0; a < rank; ++a) {
    for (std::size_t flat = 0; flat < raw.size(); ++flat) {
      g.unravel(flat, idx);
      if (idx[a] != anchor_idx[a]) continue;
      bool in_stage = true;
      for (int b = a + 1; b < rank; ++b)
        if (idx[b] != anchor_idx[b]) in_stage = false;
      if (!in_stage) continue;
      const std::size_t stride = g.stride(a);
      const int n = g.points(a);
      // walk up and down from the anchor plane along axis a
      std::size_t cur = flat;
      for (int j = anchor_idx[a] + 1; j < n; ++j) {
        const std::size_t nxt = cur + stride;
        out[nxt] = out[cur] + wrap_to_pi(raw[nxt] - raw[cur]);
        cur = nxt;
      }
      cur = flat;
      for (int j = anchor_idx[a] - 1; j >= 0; --j) {
        const std::size_t nxt = cur - stride;
        out[nxt] = out[cur] + wrap_to_pi(raw[nxt] - raw[cur]);
        cur = nxt;
      }
    }
  }
}

}  // namespace

PolarField to_polar(const WaveField& w) {
  RealField rho = density_of(w.psi);
  BoolField mask = node_mask_of(rho);
  require_mass_mostly_unmasked(rho, mask, "to_polar");

  std::size_t anchor = 0;
  for (std::size_t i = 1; i < rho.size(); ++i)
    if (rho[i] > rho[anchor]) anchor = i;

  std::vector<double> raw(w.psi.size());
  for (std::size_t i = 0; i < w.psi.size(); ++i) raw[i] = std::arg(w.psi[i]);
  std::vector<double> theta;
  unwrap_phase(*w.psi.grid, raw, theta, anchor);

  RealField phase(w.psi.grid);
  for (std::size_t i = 0; i < theta.size(); ++i)
    phase[i] = w.params.hbar * theta[i];

  PolarField p{std::move(rho), std::move(phase), std::move(mask), 0.0, 0.0};
  p.mask_point_fraction = mask_point_fraction(p.node_mask);
  p.mask_mass_fraction = mask_mass_fraction(p.rho, p.node_mask);
  return p;
}

WaveField from_polar(const PolarField& p, PhysicalParams params) {
  require_same_grid(*p.rho.grid, *p.phase.grid, "from_polar");
  std::vector<Complex> psi(p.rho.size());
  for (std::size_t i = 0; i < p.rho.size(); ++i) {
    if (p.rho[i] < 0.0)
      throw std::invalid_argument("from_polar: negative density");
    const double s = p.node_mask.values.empty() || !p.node_mask[i]
                         ? p.phase[i]
                         : 0.0;
    psi[i] = std::sqrt(p.rho[i]) *
             std::exp(Complex(0.0, s / params.hbar));
  }
  return make_wavefield(ComplexField(p.rho.grid, std::move(psi)),
                        std::move(params));
}

Complex expectation(const ComplexField& op_psi, const WaveField& w) {
  require_same_grid(*op_psi.grid, *w.psi.grid, "expectation");
  Complex sum = 0.0;
  for (std::size_t i = 0; i < op_psi.size(); ++i)
    sum += std::conj(w.psi[i]) * op_psi[i];
  return sum * w.psi.grid->cell_volume();
}

}  // namespace dqm
