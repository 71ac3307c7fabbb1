#pragma once

#include <vector>

#include "vortexsim/field.hpp"

namespace vortexsim {

// Unnormalized 2D DFT over a row-major ny x nx array.
// sign = -1 forward, +1 inverse.
void fft2(std::vector<cplx>& data, int ny, int nx, int sign);

// DFT with the array origin at index (ny/2, nx/2) on both sides.
void centered_fft2(std::vector<cplx>& data, int ny, int nx, int sign);

// spatial frequency (rad/m) of FFT bin n in standard (unshifted) order
double fft_frequency(int n, int count, double pitch);

}  // namespace vortexsim
