#pragma once

#include <string>

#include "vortexsim/elements.hpp"
#include "vortexsim/field.hpp"

namespace vortexsim {

struct PropagationPlan {
    double dz = 0.0;         // m, signed
    double bandlimit = 1.0;  // fraction of Nyquist kept along each axis
};

struct SamplingCheck {
    bool ok = true;
    std::string criterion;  // "extent", "transfer-phase" or empty
    std::string diagnostic;
    int suggested_nx = 0;
    int suggested_ny = 0;
};

// intensity moments; radius_x/y are 2 sigma (the 1/e^2 radius of a Gaussian)
struct BeamMoments {
    double cx = 0.0, cy = 0.0;
    double var_x = 0.0, var_y = 0.0, cov_xy = 0.0;
    double radius_x = 0.0, radius_y = 0.0;
};

BeamMoments beam_moments(const IntensityImage& img);
BeamMoments beam_moments(const ScalarField& f);

SamplingCheck sampling_ok(const ScalarField& field, double dz);

// throws SamplingError when sampling_ok fails
ScalarField propagate(const ScalarField& field, double dz);
ScalarField propagate(const ScalarField& field, const PropagationPlan& plan);

IntensityImage focal_image(const ScalarField& field, const OpticalElement& lens, double z_obs);

// single-FFT Fresnel integral over distance z > 0; output pitch is lambda z / (n pitch)
ScalarField fresnel_transform(const ScalarField& field, double z);

// band-limited interpolation onto a grid `factor` times finer
ScalarField upsample(const ScalarField& field, int factor);

// field at the back focal plane of a lens f when `field` sits in its front focal plane,
// cropped to `out`; out pitch must equal lambda f / (n pitch)
ScalarField fourier_relay(const ScalarField& field, double f, const GridSpec& out);
GridSpec relay_input_grid(const GridSpec& out, double wavelength, double f, int pad);

}  // namespace vortexsim
