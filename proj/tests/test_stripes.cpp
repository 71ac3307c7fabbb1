#include <doctest.h>

#include <numbers>

#include "helpers.hpp"
#include "vortexsim/diagnostics.hpp"
#include "vortexsim/modes.hpp"

using namespace vortexsim;

namespace {

const double kLam = 780e-9;

// Hermite-Gaussian-like intensity with n dark lines running at `stripe_angle` from +x
IntensityImage hg_pattern(int n, double stripe_angle) {
    const double angle = stripe_angle + std::numbers::pi / 2;
    const GridSpec g{256, 256, 4e-6, 4e-6};
    const double w = 80e-6;
    IntensityImage img{g, std::vector<double>(g.size())};
    for (int i = 0; i < g.ny; ++i)
        for (int j = 0; j < g.nx; ++j) {
            const double x = g.x(j), y = g.y(i);
            const double u = (x * std::cos(angle) + y * std::sin(angle)) * std::sqrt(2.0) / w;
            const double v = (-x * std::sin(angle) + y * std::cos(angle)) * std::sqrt(2.0) / w;
            // physicists' Hermite polynomial by recurrence
            double h0 = 1.0, h1 = 2.0 * u;
            double h = n == 0 ? h0 : h1;
            for (int k = 1; k < n; ++k) {
                h = 2.0 * u * h1 - 2.0 * k * h0;
                h0 = h1;
                h1 = h;
            }
            img.values[static_cast<std::size_t>(i) * g.nx + j] = h * h * std::exp(-(u * u + v * v));
        }
    return img;
}

}  // namespace

TEST_CASE("synthetic Hermite-Gaussian patterns give their dark-line count") {
    for (int n : {1, 2, 3}) {
        const StripeReading r = count_stripes(hg_pattern(n, std::numbers::pi / 4));
        CHECK(r.count == n);
        CHECK(r.sign == 1);
        CHECK(r.contrast > 0.9);
        const StripeReading m = count_stripes(hg_pattern(n, -std::numbers::pi / 4));
        CHECK(m.count == n);
        CHECK(m.sign == -1);
    }
}

TEST_CASE("degenerate images read zero") {
    const StripeReading spot = count_stripes(hg_pattern(0, 0.0));
    CHECK(spot.count == 0);
    IntensityImage flat{GridSpec{64, 64, 1e-6, 1e-6}, std::vector<double>(64 * 64, 2.0)};
    const StripeReading r = count_stripes(flat);
    CHECK(r.count == 0);
    CHECK(r.contrast == 0.0);
}

TEST_CASE("focused Gaussian through the tilted lens reads zero") {
    const auto r = tilted_lens_reading(gaussian(testutil::kGrid, kLam, 100e-6)).reading;
    CHECK(r.count == 0);
}

TEST_CASE("tilted-lens reading agrees with the OAM spectrum for pure LG inputs") {
    for (int l = -3; l <= 3; ++l) {
        const auto f = lg_mode(testutil::kGrid, kLam, {0, l, 100e-6, 0.0});
        const StripeReading r = tilted_lens_reading(f).reading;
        CHECK(r.sign * r.count == dominant_charge(oam_spectrum(f)));
        CHECK(r.count == std::abs(l));
        if (l != 0) CHECK(r.contrast >= 0.5);
    }
}

TEST_CASE("mirroring the field flips the stripe inclination") {
    for (int l : {1, -2}) {
        const auto f = lg_mode(testutil::kGrid, kLam, {0, l, 100e-6, 0.0});
        const StripeReading a = tilted_lens_reading(f).reading;
        const StripeReading b = tilted_lens_reading(mirrored_x(f)).reading;
        CHECK(a.count == b.count);
        CHECK(a.sign == -b.sign);
    }
}

TEST_CASE("plane scan records every plane and picks the best contrast") {
    TiltedLensSetup setup;
    setup.z_scan = {0.17, 0.2, 0.23};
    const auto res = tilted_lens_reading(lg_mode(testutil::kGrid, kLam, {0, 1, 100e-6, 0.0}), setup);
    REQUIRE(res.scan.size() == 3);
    double best = 0.0;
    for (const auto& p : res.scan) best = std::max(best, p.contrast);
    CHECK(res.reading.contrast == best);
    CHECK(res.image.grid.nx == 2 * testutil::kGrid.nx);
    CHECK(TiltedLensSetup{}.planes().size() == 21);
    CHECK(TiltedLensSetup{}.planes().front() == doctest::Approx(0.85 * 0.2));
}

TEST_CASE("low-contrast readings are flagged inconclusive") {
    TiltedLensSetup setup;
    setup.z_scan = {0.02};  // far from focus: no stripes resolved
    const auto r = tilted_lens_reading(lg_mode(testutil::kGrid, kLam, {0, 1, 100e-6, 0.0}), setup).reading;
    CHECK(r.count == 0);
    CHECK(r.inconclusive);
}
