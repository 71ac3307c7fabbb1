#include <doctest.h>

#include <numbers>

#include "helpers.hpp"
#include "vortexsim/diagnostics.hpp"
#include "vortexsim/modes.hpp"

using namespace vortexsim;

namespace {
const double kLam = 780e-9;
ScalarField lg(int p, int l) { return lg_mode(testutil::kGrid, kLam, {p, l, 100e-6, 0.0}); }
}  // namespace

TEST_CASE("pure LG modes put all ring power at their charge") {
    for (int l = -4; l <= 4; ++l) {
        const OamSpectrum s = oam_spectrum(lg(0, l));
        CHECK(dominant_charge(s) == l);
        CHECK(s.weight(l) > 0.999999);
        CHECK(s.residual < 1e-5);
    }
}

TEST_CASE("weights of a superposition are the squared coefficients") {
    // radial profiles differ, so the oracle uses the ring-integrated powers of each term
    const auto a = lg(0, 1), b = lg(0, -2);
    const cplx ca(0.8, 0.0), cb(0.0, 0.6);
    const OamSpectrum s = oam_spectrum(scaled(a, ca) + scaled(b, cb));
    const double pa = std::norm(ca), pb = std::norm(cb);
    CHECK(s.weight(1) == doctest::Approx(pa / (pa + pb)).epsilon(1e-3));
    CHECK(s.weight(-2) == doctest::Approx(pb / (pa + pb)).epsilon(1e-3));
    CHECK(dominant_charge(s) == 1);
}

TEST_CASE("spectrum is invariant under global phase and scaling") {
    const auto f = scaled(lg(1, 2), cplx(0.7, 0.1)) + lg(0, -1);
    const OamSpectrum s0 = oam_spectrum(f);
    for (cplx c : {cplx(0.0, 1.0), cplx(-3.0, 0.0), std::polar(1e-4, 1.1)}) {
        const OamSpectrum s1 = oam_spectrum(scaled(f, c));
        for (int l = s0.l_min; l <= s0.l_max; ++l) CHECK(std::abs(s1.weight(l) - s0.weight(l)) <= 1e-9);
    }
}

TEST_CASE("mirroring negates the dominant charge") {
    for (int l : {-3, -1, 1, 2}) CHECK(dominant_charge(oam_spectrum(mirrored_x(lg(0, l)))) == -l);
}

TEST_CASE("out-of-range charges land in the residual") {
    const OamSpectrum s = oam_spectrum(lg(0, 5), 0.0, 0.0, -2, 2);
    CHECK(s.residual > 0.999);
    CHECK_THROWS_AS(oam_spectrum(lg(0, 1), 0.0, 0.0, 3, 1), Error);
    CHECK_THROWS_AS(oam_spectrum(zero_field(testutil::kGrid, kLam)), Error);
}

TEST_CASE("dominant charge ties go to the smaller magnitude, then positive") {
    OamSpectrum s;
    s.l_min = -2;
    s.l_max = 2;
    s.weights = {0.0, 0.3, 0.0, 0.3, 0.0};
    CHECK(dominant_charge(s) == 1);
    s.weights = {0.4, 0.0, 0.0, 0.0, 0.4};
    CHECK(dominant_charge(s) == 2);
    s.weights = {0.4, 0.0, 0.4, 0.0, 0.0};
    CHECK(dominant_charge(s) == 0);
}

TEST_CASE("off-centre analysis follows the supplied centre") {
    const GridSpec& g = testutil::kGrid;
    auto f = lg(0, 2);
    // shift by 10 columns
    ScalarField shifted(g, kLam);
    for (int i = 0; i < g.ny; ++i)
        for (int j = 10; j < g.nx; ++j) shifted.at(i, j) = f.at(i, j - 10);
    CHECK(oam_spectrum(shifted, 10 * g.dx, 0.0).weight(2) > 0.999);
    CHECK(oam_spectrum(shifted).weight(2) < 0.9);
}

TEST_CASE("doughnut flag and on-axis ratio") {
    CHECK(is_doughnut(lg(0, 1)));
    CHECK_FALSE(is_doughnut(lg(0, 0)));
    CHECK(on_axis_ratio(lg(0, 0)) == doctest::Approx(1.0));
    CHECK(on_axis_ratio(lg(0, -2)) <= 1e-9);
}
