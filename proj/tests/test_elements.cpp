#include <doctest.h>

#include <numbers>

#include "helpers.hpp"
#include "vortexsim/diagnostics.hpp"
#include "vortexsim/elements.hpp"
#include "vortexsim/modes.hpp"

using namespace vortexsim;

namespace {
const double kLam = 776e-9;
ScalarField beam() { return gaussian(testutil::kGrid, kLam, 100e-6); }
}  // namespace

TEST_CASE("element charges and names") {
    CHECK(element_charge(StaircaseMask{2}) == 2);
    CHECK(element_charge(SpiralPlate{-3}) == -3);
    CHECK(element_charge(ForkedGrating{1, 0.5}) == 1);
    CHECK(element_charge(ThinLens{0.1}) == 0);
    CHECK(element_charge(TiltedLens{0.2, 0.1}) == 0);
    CHECK(element_charge(CircularAperture{1e-3}) == 0);
    CHECK(element_name(StaircaseMask{1}) == "staircase_mask");
}

TEST_CASE("element validation") {
    CHECK_THROWS_AS(validate(StaircaseMask{1, 1, 0.95}), Error);
    CHECK_THROWS_AS(validate(StaircaseMask{1, 8, 1.5}), Error);
    CHECK_THROWS_AS(validate(ForkedGrating{1, 0.0}), Error);
    CHECK_THROWS_AS(validate(ThinLens{0.0}), Error);
    CHECK_THROWS_AS(validate(TiltedLens{0.2, 2.0}), Error);
    CHECK_THROWS_AS(validate(CircularAperture{-1.0}), Error);
    CHECK_NOTHROW(validate(StaircaseMask{1}));
}

TEST_CASE("spiral plate is lossless and imprints its charge") {
    for (int l : {-2, 1, 3}) {
        const auto out = apply(SpiralPlate{l}, beam());
        CHECK(power(out) == doctest::Approx(power(beam())).epsilon(1e-12));
        CHECK(dominant_charge(oam_spectrum(out)) == l);
    }
}

TEST_CASE("staircase transmittance and stepped phase") {
    const auto out = apply(StaircaseMask{1, 8, 0.9}, beam());
    CHECK(power(out) / power(beam()) == doctest::Approx(0.9).epsilon(1e-9));
    // stepped phase is constant across a sector: two points at 10 and 30 deg share a phase
    const cplx a = transmission(StaircaseMask{1, 8, 1.0}, std::cos(0.17), std::sin(0.17), kLam);
    const cplx b = transmission(StaircaseMask{1, 8, 1.0}, std::cos(0.52), std::sin(0.52), kLam);
    CHECK(std::abs(a - b) < 1e-12);
}

TEST_CASE("staircase purity follows the stepped-phase Fourier coefficient") {
    // field exp(i*2pi*floor(N*phi/2pi)/N) has weight sinc^2(pi/N) at l = 1
    for (int sectors : {4, 8, 16}) {
        const double arg = std::numbers::pi / sectors;
        const double oracle = std::pow(std::sin(arg) / arg, 2);
        const double dx = 8.0 * 100e-6 / 1024;
        const auto g = gaussian(GridSpec{1024, 1024, dx, dx}, kLam, 100e-6);
        const double w = oam_spectrum(apply(StaircaseMask{1, sectors, 1.0}, g)).weight(1);
        CHECK(w == doctest::Approx(oracle).epsilon(0.01));
    }
}

TEST_CASE("forked grating scales power by its efficiency") {
    const auto out = apply(ForkedGrating{1, 0.64}, beam());
    CHECK(power(out) / power(beam()) == doctest::Approx(0.64).epsilon(1e-12));
}

TEST_CASE("sequential charges accumulate") {
    const auto out = apply(StaircaseMask{1}, apply(ForkedGrating{1, 0.8}, beam()));
    CHECK(dominant_charge(oam_spectrum(out)) == 2);
}

TEST_CASE("thin lens applies the paraxial quadratic phase") {
    const double f = 0.2, x = 300e-6, y = -100e-6;
    const double k = 2.0 * std::numbers::pi / kLam;
    const cplx t = transmission(ThinLens{f}, x, y, kLam);
    CHECK(std::abs(t) == doctest::Approx(1.0));
    const cplx want = std::exp(cplx(0.0, -k * (x * x + y * y) / (2.0 * f)));
    CHECK(std::abs(t - want) < 1e-12);
}

TEST_CASE("tilted lens focal lengths follow the two-axis tilt model") {
    const double f = 0.2, tilt = 6.0 * std::numbers::pi / 180.0;
    const double k = 2.0 * std::numbers::pi / kLam;
    const double x = 200e-6, y = 150e-6;
    const double phase = -k * (x * x / (f * std::cos(tilt)) + y * y * std::cos(tilt) / f) / 2.0;
    CHECK(std::abs(transmission(TiltedLens{f, tilt}, x, y, kLam) - std::exp(cplx(0.0, phase))) < 1e-12);
}

TEST_CASE("circular aperture blocks outside its radius") {
    CHECK(transmission(CircularAperture{1e-4}, 0.5e-4, 0.5e-4, kLam) == cplx(1.0, 0.0));
    CHECK(transmission(CircularAperture{1e-4}, 1e-4, 1e-4, kLam) == cplx(0.0, 0.0));
    const auto out = apply(CircularAperture{100e-6}, beam());
    // Gaussian power inside r = w0 is 1 - exp(-2)
    CHECK(power(out) / power(beam()) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(0.01));
}
