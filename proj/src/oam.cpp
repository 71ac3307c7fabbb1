#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "vortexsim/diagnostics.hpp"

namespace vortexsim {

namespace {

constexpr int kRingSamples = 256;

template <class Get>
auto interp(const GridSpec& g, double x, double y, Get get) -> decltype(get(0, 0)) {
    using T = decltype(get(0, 0));
    const double fj = x / g.dx + g.nx / 2;
    const double fi = y / g.dy + g.ny / 2;
    const int j0 = static_cast<int>(std::floor(fj));
    const int i0 = static_cast<int>(std::floor(fi));
    if (j0 < 0 || i0 < 0 || j0 + 1 >= g.nx || i0 + 1 >= g.ny) return T{};
    const double tx = fj - j0;
    const double ty = fi - i0;
    return (1 - ty) * ((1 - tx) * get(i0, j0) + tx * get(i0, j0 + 1)) + ty * ((1 - tx) * get(i0 + 1, j0) + tx * get(i0 + 1, j0 + 1));
}

}  // namespace

double bilinear(const IntensityImage& img, double x, double y) {
    return interp(img.grid, x, y, [&](int i, int j) { return img.at(i, j); });
}

cplx bilinear(const ScalarField& f, double x, double y) {
    return interp(f.grid(), x, y, [&](int i, int j) { return f.at(i, j); });
}

double OamSpectrum::weight(int l) const {
    if (l < l_min || l > l_max) return 0.0;
    return weights[static_cast<std::size_t>(l - l_min)];
}

OamSpectrum oam_spectrum(const ScalarField& field, double cx, double cy, int l_min, int l_max) {
    if (l_min > l_max) throw Error("empty charge range");
    if (l_max - l_min >= kRingSamples) throw Error("charge range wider than the ring sampling");
    if (!(power(field) > 0.0)) throw Error("cannot analyse a zero-power field");
    const auto& g = field.grid();
    const double x_lo = g.x(0), x_hi = g.x(g.nx - 1);
    const double y_lo = g.y(0), y_hi = g.y(g.ny - 1);
    if (cx < x_lo || cx > x_hi || cy < y_lo || cy > y_hi) throw Error("spectrum centre outside the grid");

    const double step = std::min(g.dx, g.dy);
    const double r_max = std::min({cx - x_lo, x_hi - cx, cy - y_lo, y_hi - cy});
    const int nl = l_max - l_min + 1;

    std::vector<double> cosv(kRingSamples), sinv(kRingSamples);
    for (int n = 0; n < kRingSamples; ++n) {
        const double a = 2.0 * std::numbers::pi * n / kRingSamples;
        cosv[n] = std::cos(a);
        sinv[n] = std::sin(a);
    }

    std::vector<double> acc(nl, 0.0);
    double total = 0.0;
    std::vector<cplx> ring(kRingSamples);
    for (int kr = 0;; ++kr) {
        const double r = (kr + 0.5) * step;
        if (r > r_max) break;
        double ring_power = 0.0;
        for (int n = 0; n < kRingSamples; ++n) {
            ring[n] = bilinear(field, cx + r * cosv[n], cy + r * sinv[n]);
            ring_power += std::norm(ring[n]);
        }
        // Parseval: sum over all harmonics of |a_m|^2 equals the ring mean of |E|^2
        const double w = r * step;
        total += ring_power / kRingSamples * w;
        for (int l = l_min; l <= l_max; ++l) {
            cplx a(0.0, 0.0);
            for (int n = 0; n < kRingSamples; ++n) {
                const int idx = static_cast<int>((static_cast<long>(l) * n % kRingSamples + kRingSamples) % kRingSamples);
                a += ring[n] * cplx(cosv[idx], -sinv[idx]);
            }
            a /= kRingSamples;
            acc[l - l_min] += std::norm(a) * w;
        }
    }
    if (!(total > 0.0)) throw Error("cannot analyse a zero-power field");

    OamSpectrum spec;
    spec.l_min = l_min;
    spec.l_max = l_max;
    spec.weights.resize(nl);
    double in_range = 0.0;
    for (int i = 0; i < nl; ++i) {
        spec.weights[i] = acc[i] / total;
        in_range += spec.weights[i];
    }
    spec.residual = std::max(0.0, 1.0 - in_range);
    return spec;
}

int dominant_charge(const OamSpectrum& spec) {
    int best = spec.l_min;
    double bw = -1.0;
    for (int l = spec.l_min; l <= spec.l_max; ++l) {
        const double w = spec.weight(l);
        const double tol = 1e-12 * std::max(w, bw);
        if (w > bw + tol) {
            best = l;
            bw = w;
        } else if (std::abs(w - bw) <= tol) {
            const bool smaller = std::abs(l) < std::abs(best);
            const bool same_pos = std::abs(l) == std::abs(best) && l > best;
            if (smaller || same_pos) {
                best = l;
                bw = std::max(w, bw);
            }
        }
    }
    return best;
}

double on_axis_ratio(const ScalarField& field) {
    double peak = 0.0;
    for (const auto& v : field.samples()) peak = std::max(peak, std::norm(v));
    if (!(peak > 0.0)) return 0.0;
    return std::norm(on_axis(field)) / peak;
}

bool is_doughnut(const ScalarField& field, double threshold) {
    double peak = 0.0;
    for (const auto& v : field.samples()) peak = std::max(peak, std::norm(v));
    return peak > 0.0 && on_axis_ratio(field) <= threshold;
}

}  // namespace vortexsim
