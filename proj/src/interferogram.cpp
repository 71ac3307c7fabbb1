#include <algorithm>
#include <cmath>
#include <numbers>

#include "vortexsim/diagnostics.hpp"
#include "vortexsim/fft.hpp"

namespace vortexsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kRing = 256;
constexpr int kMaxArms = 16;
constexpr double kArmVisibility = 1e-3;

}  // namespace

IntensityImage interferogram(const ScalarField& field, const Reference& ref) {
    const auto& g = field.grid();
    const double amp = std::sqrt(power(field) / (g.extent_x() * g.extent_y()));
    const double k = field.k();
    IntensityImage img{g, std::vector<double>(g.size())};
    for (int i = 0; i < g.ny; ++i) {
        const double y = g.y(i);
        for (int j = 0; j < g.nx; ++j) {
            const double x = g.x(j);
            double ph = 0.0;
            if (const auto* s = std::get_if<SphericalReference>(&ref))
                ph = k * (x * x + y * y) / (2.0 * s->curvature_radius);
            else
                ph = k * std::sin(std::get<TiltedPlaneReference>(ref).angle) * x;
            const cplx e = field.at(i, j) + amp * cplx(std::cos(ph), std::sin(ph));
            img.values[static_cast<std::size_t>(i) * g.nx + j] = std::norm(e);
        }
    }
    return img;
}

int count_spiral_arms(const IntensityImage& image) {
    // each ring's intensity carries the azimuthal harmonic |l| of the field/reference cross term
    const auto& g = image.grid;
    const double step = std::min(g.dx, g.dy);
    const double r_max = std::min({-g.x(0), g.x(g.nx - 1), -g.y(0), g.y(g.ny - 1)});
    std::vector<double> energy(kMaxArms + 1, 0.0);
    std::vector<double> ring(kRing);
    for (int kr = 0;; ++kr) {
        const double r = (kr + 0.5) * step;
        if (r > r_max) break;
        for (int n = 0; n < kRing; ++n) {
            const double a = 2.0 * kPi * n / kRing;
            ring[n] = bilinear(image, r * std::cos(a), r * std::sin(a));
        }
        for (int m = 0; m <= kMaxArms; ++m) {
            cplx c(0.0, 0.0);
            for (int n = 0; n < kRing; ++n) {
                const double a = 2.0 * kPi * m * n / kRing;
                c += ring[n] * cplx(std::cos(a), -std::sin(a));
            }
            energy[m] += std::norm(c / double(kRing)) * r;
        }
    }
    if (!(energy[0] > 0.0)) return 0;
    const auto best = std::max_element(energy.begin() + 1, energy.end());
    if (*best / energy[0] < kArmVisibility) return 0;
    return static_cast<int>(best - energy.begin());
}

ForkReading count_fork_surplus(const IntensityImage& image) {
    // isolate one carrier sideband, then count the phase winding around the axis
    const auto& g = image.grid;
    double mean = 0.0;
    for (double v : image.values) mean += v;
    mean /= static_cast<double>(image.values.size());
    std::vector<cplx> spec(image.values.size());
    for (std::size_t n = 0; n < spec.size(); ++n) spec[n] = image.values[n] - mean;
    centered_fft2(spec, g.ny, g.nx, -1);

    const int ci = g.ny / 2, cj = g.nx / 2;
    const int guard = std::max(4, std::min(g.nx, g.ny) / 16);  // carrier must sit beyond the self-interference halo
    int pi_ = ci, pj = cj;
    double best = -1.0;
    for (int i = 0; i < g.ny; ++i)
        for (int j = cj; j < g.nx; ++j) {
            const int di = i - ci, dj = j - cj;
            if (di * di + dj * dj < guard * guard) continue;
            if (dj == 0 && di <= 0) continue;
            const double v = std::norm(spec[static_cast<std::size_t>(i) * g.nx + j]);
            if (v > best) {
                best = v;
                pi_ = i;
                pj = j;
            }
        }
    ForkReading out;
    if (best <= 0.0) return out;
    const int di0 = pi_ - ci, dj0 = pj - cj;
    const double rad = 0.5 * std::hypot(di0, dj0);
    std::vector<cplx> side(spec.size(), cplx(0.0, 0.0));
    for (int i = 0; i < g.ny; ++i)
        for (int j = 0; j < g.nx; ++j) {
            const int di = i - pi_, dj = j - pj;
            if (di * di + dj * dj > rad * rad) continue;
            const int ti = ci + di, tj = cj + dj;
            if (ti < 0 || ti >= g.ny || tj < 0 || tj >= g.nx) continue;
            side[static_cast<std::size_t>(ti) * g.nx + tj] = spec[static_cast<std::size_t>(i) * g.nx + j];
        }
    centered_fft2(side, g.ny, g.nx, +1);
    ScalarField demod(g, 1.0, std::move(side));

    // contour where the demodulated amplitude is strongest
    const double step = std::min(g.dx, g.dy);
    const double r_lim = 0.5 * std::min({-g.x(0), g.x(g.nx - 1), -g.y(0), g.y(g.ny - 1)});
    double r_best = 2.0 * step, a_best = -1.0;
    for (double r = 2.0 * step; r <= r_lim; r += step) {
        double s = 0.0;
        for (int n = 0; n < kRing; ++n) {
            const double a = 2.0 * kPi * n / kRing;
            s += std::abs(bilinear(demod, r * std::cos(a), r * std::sin(a)));
        }
        if (s > a_best) {
            a_best = s;
            r_best = r;
        }
    }
    double total = 0.0;
    cplx prev = bilinear(demod, r_best, 0.0);
    for (int n = 1; n <= kRing; ++n) {
        const double a = 2.0 * kPi * n / kRing;
        const cplx cur = bilinear(demod, r_best * std::cos(a), r_best * std::sin(a));
        total += std::arg(cur * std::conj(prev));
        prev = cur;
    }
    out.winding = static_cast<int>(std::lround(total / (2.0 * kPi)));
    out.surplus = std::abs(out.winding);
    return out;
}

}  // namespace vortexsim
