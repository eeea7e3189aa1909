#pragma once

#include <complex>
#include <vector>

namespace specext::detail {

// Unnormalized multidimensional DFT, in place, row-major data.
//   sign = -1:  out[k] = sum_l in[l] e^{-2 pi i <k, l/N>}
//   sign = +1:  out[k] = sum_l in[l] e^{+2 pi i <k, l/N>}
// Plans are cached per (sizes, sign); safe to call concurrently.
void dft(std::vector<std::complex<double>>& data, const std::vector<int>& sizes,
         int sign);

}  // namespace specext::detail
