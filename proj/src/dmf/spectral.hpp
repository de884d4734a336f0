#pragma once

#include "dmf/types.hpp"

namespace dmf {

// Full SVD of the data matrix with singular values grouped into distinct-value
// blocks. Adjacent values join a group iff |y_i - y_{i+1}| <= group_tol *
// max(1, y_1); values at or below that threshold count as zero for the rank.
// Sign convention: the largest-magnitude entry of each left singular vector is
// made positive (paired columns of U and V flip together).
SpectralDecomposition spectral_decompose(const ProblemSpec& spec, double group_tol = 1e-9);

}  // namespace dmf
