#pragma once

#include <vector>

#include "dqm/grid.hpp"

namespace dqm::detail {

// In-place complex DFT over the full grid (row-major). backward applies the
// 1/N normalization so backward(forward(x)) == x up to roundoff.
void fft_forward(const Grid& grid, std::vector<Complex>& data);
void fft_backward(const Grid& grid, std::vector<Complex>& data);

}  // namespace dqm::detail
