#include <doctest.h>

#include <numbers>

#include "helpers.hpp"
#include "vortexsim/modes.hpp"
#include "vortexsim/propagation.hpp"

using namespace vortexsim;

TEST_CASE("generalized Laguerre polynomials match closed forms") {
    for (double a : {0.0, 1.0, 2.5}) {
        for (double x : {0.0, 0.3, 1.7, 4.0}) {
            CHECK(laguerre(0, a, x) == doctest::Approx(1.0));
            CHECK(laguerre(1, a, x) == doctest::Approx(1.0 + a - x));
            CHECK(laguerre(2, a, x) == doctest::Approx(0.5 * x * x - (a + 2.0) * x + 0.5 * (a + 1.0) * (a + 2.0)));
        }
    }
    CHECK_THROWS_AS(laguerre(-1, 0.0, 1.0), Error);
}

TEST_CASE("Rayleigh range and beam radius") {
    const double w0 = 100e-6, lam = 780e-9;
    const double zr = std::numbers::pi * w0 * w0 / lam;
    CHECK(rayleigh_range(w0, lam) == doctest::Approx(zr));
    CHECK(beam_radius(w0, lam, zr) == doctest::Approx(w0 * std::sqrt(2.0)));
    CHECK(beam_radius(w0, lam, -2.0 * zr) == doctest::Approx(w0 * std::sqrt(5.0)));
}

TEST_CASE("LG modes are unit power with a dark core for l != 0") {
    for (int l = -3; l <= 3; ++l) {
        const auto f = lg_mode(testutil::kGrid, 780e-9, {0, l, 100e-6, 0.0});
        CHECK(power(f) == doctest::Approx(1.0).epsilon(1e-12));
        if (l != 0) CHECK(std::abs(on_axis(f)) == 0.0);
        else CHECK(std::abs(on_axis(f)) > 0.0);
    }
}

TEST_CASE("LG phase winds l times around the axis") {
    for (int l = -3; l <= 3; ++l) {
        const auto f = lg_mode(testutil::kGrid, 780e-9, {0, l, 100e-6, 0.0});
        const int r = 20;  // pixels
        const int ci = 256, cj = 256;
        double total = 0.0;
        cplx prev = f.at(ci, cj + r);
        const int n = 400;
        for (int k = 1; k <= n; ++k) {
            const double a = 2.0 * std::numbers::pi * k / n;
            const cplx cur = f.at(ci + static_cast<int>(std::lround(r * std::sin(a))), cj + static_cast<int>(std::lround(r * std::cos(a))));
            total += std::arg(cur * std::conj(prev));
            prev = cur;
        }
        CHECK(std::lround(total / (2.0 * std::numbers::pi)) == l);
    }
}

TEST_CASE("LG field at z agrees with propagating the waist field") {
    const double w0 = 100e-6, lam = 780e-9;
    const double z = 0.7 * rayleigh_range(w0, lam);
    for (LgParams p : {LgParams{0, 1, w0, 0.0}, LgParams{1, -2, w0, 0.0}}) {
        const auto at_waist = lg_mode(testutil::kGrid, lam, p);
        LgParams pz = p;
        pz.z = z;
        const auto analytic = lg_mode(testutil::kGrid, lam, pz);
        // the propagator keeps the exp(ikz) carrier; the analytic mode does not. The remaining gap is the paraxial error
        const cplx carrier = std::exp(cplx(0.0, -2.0 * std::numbers::pi / lam * z));
        CHECK(relative_error(scaled(propagate(at_waist, z), carrier), analytic) < 1e-4);
    }
}

TEST_CASE("modes that do not fit the grid are a sampling error") {
    CHECK_THROWS_AS(lg_mode(testutil::kSmall, 780e-9, {0, 0, 400e-6, 0.0}), SamplingError);
    CHECK_THROWS_AS(lg_mode(testutil::kSmall, 780e-9, {-1, 0, 100e-6, 0.0}), Error);
}
