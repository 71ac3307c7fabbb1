#pragma once

#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "vortexsim/field.hpp"

namespace vortexsim {

// ---- azimuthal decomposition ----

struct OamSpectrum {
    int l_min = -8;
    int l_max = 8;
    std::vector<double> weights;  // fraction of ring power per l, index l - l_min
    double residual = 0.0;        // ring power outside [l_min, l_max]

    double weight(int l) const;
};

OamSpectrum oam_spectrum(const ScalarField& field, double cx = 0.0, double cy = 0.0, int l_min = -8, int l_max = 8);

int dominant_charge(const OamSpectrum& spec);

// on-axis intensity over peak intensity
double on_axis_ratio(const ScalarField& field);
bool is_doughnut(const ScalarField& field, double threshold = 1e-9);

// ---- tilted-lens stripes ----

struct StripeReading {
    int count = 0;
    int sign = 0;
    double contrast = 0.0;
    double plane_z = 0.0;       // m behind the lens
    bool inconclusive = false;
    double stripe_angle = 0.0;  // deg in [0, 180), dark-stripe direction from +x
    double anisotropy = 1.0;    // major/minor second-moment ratio
};

StripeReading count_stripes(const IntensityImage& image);

struct TiltedLensSetup {
    double f = 0.2;                                   // m
    double tilt = 6.0 * std::numbers::pi / 180.0;     // rad
    double relay_magnification = 32.0;                // beam expander ahead of the lens
    int upsample = 2;
    std::vector<double> z_scan;                       // empty: 21 planes over [0.85 f, 1.15 f]

    std::vector<double> planes() const;
};

struct PlaneScore {
    double z = 0.0;
    int count = 0;
    double contrast = 0.0;
};

struct TiltedLensResult {
    StripeReading reading;
    IntensityImage image;  // best plane
    std::vector<PlaneScore> scan;
};

TiltedLensResult tilted_lens_reading(const ScalarField& field, const TiltedLensSetup& setup = {});

// ---- interferograms ----

struct SphericalReference {
    double curvature_radius = 0.05;  // m
};

struct TiltedPlaneReference {
    double angle = 0.0;  // rad, tilt in the x-z plane
};

using Reference = std::variant<SphericalReference, TiltedPlaneReference>;

// uniform-amplitude reference carrying the same power as the field
IntensityImage interferogram(const ScalarField& field, const Reference& ref);

int count_spiral_arms(const IntensityImage& image);

struct ForkReading {
    int surplus = 0;   // extra fringes on one side of the core
    int winding = 0;   // signed phase winding of the demodulated sideband
};

ForkReading count_fork_surplus(const IntensityImage& image);

// ---- shared helpers ----

double bilinear(const IntensityImage& img, double x, double y);
cplx bilinear(const ScalarField& f, double x, double y);

}  // namespace vortexsim
