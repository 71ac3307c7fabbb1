#pragma once

#include "vortexsim/field.hpp"

namespace vortexsim {

struct LgParams {
    int p = 0;
    int l = 0;
    double w0 = 100e-6;  // m
    double z = 0.0;      // m from the waist
};

double rayleigh_range(double w0, double wavelength);
double beam_radius(double w0, double wavelength, double z);

// generalized Laguerre polynomial L_n^a(x)
double laguerre(int n, double a, double x);

// unit-power LG_p^l field, phase exp(+i l phi), phi = atan2(y, x)
ScalarField lg_mode(const GridSpec& grid, double wavelength, const LgParams& params);

ScalarField gaussian(const GridSpec& grid, double wavelength, double w0);

}  // namespace vortexsim
