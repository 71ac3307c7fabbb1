#pragma once

#include <string>
#include <variant>

#include "vortexsim/field.hpp"

namespace vortexsim {

// stepped azimuthal phase; sector k spans [2pi k/sectors, 2pi (k+1)/sectors) from +x
struct StaircaseMask {
    int charge = 1;
    int sectors = 8;
    double power_transmittance = 0.95;
};

struct SpiralPlate {
    int charge = 1;
};

// first diffraction order only
struct ForkedGrating {
    int charge = 1;
    double efficiency = 1.0;
};

struct ThinLens {
    double f = 0.2;  // m
};

// tilt about the vertical axis: fx = f cos(tilt), fy = f / cos(tilt)
struct TiltedLens {
    double f = 0.2;     // m
    double tilt = 0.0;  // rad
};

struct CircularAperture {
    double radius = 1e-3;  // m
};

using OpticalElement = std::variant<StaircaseMask, SpiralPlate, ForkedGrating, ThinLens, TiltedLens, CircularAperture>;

void validate(const OpticalElement& e);
std::string element_name(const OpticalElement& e);

// topological charge the element imprints (0 for lenses and apertures)
int element_charge(const OpticalElement& e);

ScalarField apply(const OpticalElement& e, const ScalarField& field);

// complex transmission at (x, y) for wavelength lambda
cplx transmission(const OpticalElement& e, double x, double y, double wavelength);

}  // namespace vortexsim
