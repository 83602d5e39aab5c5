#pragma once

#include <complex>
#include <vector>

#include "qnls/grid.hpp"

namespace qnls {

using cxd = std::complex<double>;

/// In-place forward DFT (unnormalized) on a tensor grid.
void fft_forward(const Grid& g, std::vector<cxd>& data);
/// In-place inverse DFT, normalized by 1/N so that inverse(forward(x)) == x.
void fft_inverse(const Grid& g, std::vector<cxd>& data);

} // namespace qnls
