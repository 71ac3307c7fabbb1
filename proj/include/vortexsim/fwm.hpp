#pragma once

#include <array>

#include "vortexsim/field.hpp"

namespace vortexsim {

struct FwmConfig {
    double lambda1 = 780e-9;
    double lambda2 = 776e-9;
    double lambda_ir = 5.23e-6;
    double lambda_bl = 420e-9;
    double coupling = 1.0;
    int ir_charge = 0;           // 0: fundamental Gaussian idler
    double ir_waist = 100e-6;    // m
    double cell_length = 0.05;   // m
    int slices = 1;

    void validate() const;
    // wavelength that closes the frequency sum exactly; used for the generated blue field
    double blue_wavelength() const;
};

// in-plane propagation angles from the z axis (x-z plane), rad
struct BeamGeometry {
    double theta1 = 0.0;
    double theta2 = 0.0;

    static BeamGeometry crossing(double alpha) { return BeamGeometry{0.0, alpha}; }
    double alpha() const;
    void validate() const;
};

using Vec3 = std::array<double, 3>;

Vec3 direction(double theta);

struct PhaseMatchSolution {
    Vec3 d_ir{};
    Vec3 d_bl{};
    double theta_ir = 0.0;
    double theta_bl = 0.0;
    double residual = 0.0;  // |k1 + k2 - kIR - kBL|, rad/m
    bool bl_inside = false; // dBL strictly between d1 and d2 (or equal to both when collinear)
};

class PhaseMatchError : public Error {
public:
    PhaseMatchError(const std::string& what, double best) : Error(what), best_residual(best) {}
    double best_residual;
};

PhaseMatchSolution phase_match(const BeamGeometry& geom, const FwmConfig& cfg);

int expected_charge(int l780, int l776, int l_ir = 0);

// idler profile used in the product, peak amplitude 1
ScalarField idler_field(const GridSpec& grid, const FwmConfig& cfg);

ScalarField fwm_blue_field(const ScalarField& e780, const ScalarField& e776, const FwmConfig& cfg);

// tilted pumps in the d1 frame, slice-wise product through the cell, dBL carrier removed, then propagated z_out
ScalarField fwm_scene(const ScalarField& e780, const ScalarField& e776, const BeamGeometry& geom, const FwmConfig& cfg,
                      double z_out, PhaseMatchSolution* match = nullptr);

}  // namespace vortexsim
