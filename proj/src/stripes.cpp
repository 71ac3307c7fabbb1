#include <algorithm>
#include <cmath>
#include <numbers>

#include "vortexsim/diagnostics.hpp"
#include "vortexsim/elements.hpp"
#include "vortexsim/propagation.hpp"

namespace vortexsim {

namespace {

constexpr double kLobeFloor = 0.1;       // lobe peaks below this fraction of the profile maximum are ignored
constexpr double kDarkThreshold = 0.25;  // stripe must stay below this fraction of the weaker adjacent lobe
constexpr double kMinContrast = 0.5;
constexpr double kCoreFloor = 0.1;       // moment window: pixels above this fraction of the image peak
constexpr int kSegmentPoints = 41;

}  // namespace

StripeReading count_stripes(const IntensityImage& image) {
    StripeReading out;
    const auto& g = image.grid;
    const auto [mn, mx] = std::minmax_element(image.values.begin(), image.values.end());
    if (image.values.empty() || !(*mx > 0.0) || *mx == *mn) return out;

    // moments of the bright core only; far-field tails of non-LG beams would isotropize them
    IntensityImage core = image;
    const double floor_v = kCoreFloor * *mx;
    for (auto& v : core.values)
        if (v < floor_v) v = 0.0;
    const BeamMoments m = beam_moments(core);
    const double a = m.var_x, b = m.cov_xy, c = m.var_y;
    const double half = 0.5 * (a - c);
    const double root = std::sqrt(half * half + b * b);
    const double lam_major = 0.5 * (a + c) + root;
    const double lam_minor = std::max(0.5 * (a + c) - root, 1e-300);
    double ux = 1.0, uy = 0.0;
    if (b != 0.0) {
        ux = lam_major - c;
        uy = b;
        const double n = std::hypot(ux, uy);
        ux /= n;
        uy /= n;
    } else if (c > a) {
        ux = 0.0;
        uy = 1.0;
    }
    // dark stripes run across the lobe axis
    const double sx = -uy, sy = ux;
    out.anisotropy = lam_major / lam_minor;
    double ang = std::atan2(sy, sx) * 180.0 / std::numbers::pi;
    ang = std::fmod(ang + 360.0, 180.0);
    out.stripe_angle = ang;

    const double pix = std::min(g.dx, g.dy);
    const double len = 4.0 * std::sqrt(lam_major);
    const int np = static_cast<int>(std::floor(len / (0.5 * pix)));
    std::vector<double> prof(2 * np + 1);
    for (int n = -np; n <= np; ++n) {
        const double t = n * 0.5 * pix;
        prof[n + np] = bilinear(image, m.cx + t * ux, m.cy + t * uy);
    }
    const double pmax = *std::max_element(prof.begin(), prof.end());
    std::vector<int> maxima;
    for (std::size_t n = 1; n + 1 < prof.size(); ++n)
        if (prof[n] > prof[n - 1] && prof[n] >= prof[n + 1] && prof[n] >= kLobeFloor * pmax) maxima.push_back(static_cast<int>(n));

    const double h = 1.5 * std::sqrt(lam_minor);
    int count = 0;
    double ratio_sum = 0.0;
    for (std::size_t q = 0; q + 1 < maxima.size(); ++q) {
        const int lo = maxima[q], hi = maxima[q + 1];
        const int at = static_cast<int>(std::min_element(prof.begin() + lo, prof.begin() + hi + 1) - prof.begin());
        const double peak = std::min(prof[lo], prof[hi]);
        const double t = (at - np) * 0.5 * pix;
        const double px = m.cx + t * ux, py = m.cy + t * uy;
        double seg_max = 0.0, seg_sum = 0.0;
        for (int s = 0; s < kSegmentPoints; ++s) {
            const double u = -h + 2.0 * h * s / (kSegmentPoints - 1);
            const double v = bilinear(image, px + u * sx, py + u * sy);
            seg_max = std::max(seg_max, v);
            seg_sum += v;
        }
        if (seg_max / peak < kDarkThreshold) {
            ++count;
            ratio_sum += seg_sum / kSegmentPoints / peak;
        }
    }
    // n parallel stripes stretch the beam to a moment ratio near 2n + 1; ring fringes do not
    if (count > 0 && out.anisotropy < count + 1.0) count = 0;
    if (count > 0) {
        out.count = count;
        out.contrast = std::clamp(1.0 - ratio_sum / count, 0.0, 1.0);
        out.sign = ang < 90.0 ? 1 : -1;
    }
    return out;
}

std::vector<double> TiltedLensSetup::planes() const {
    if (!z_scan.empty()) return z_scan;
    std::vector<double> zs(21);
    for (int n = 0; n < 21; ++n) zs[n] = f * (0.85 + 0.30 * n / 20.0);
    return zs;
}

TiltedLensResult tilted_lens_reading(const ScalarField& field, const TiltedLensSetup& setup) {
    if (!(setup.relay_magnification > 0.0)) throw Error("relay magnification must be positive");
    if (!(setup.f > 0.0)) throw Error("tilted-lens focal length must be positive");
    if (!(power(field) > 0.0)) throw Error("cannot read a zero-power field");
    const auto& g = field.grid();
    const double M = setup.relay_magnification;
    GridSpec relayed{g.nx, g.ny, g.dx * M, g.dy * M};
    ScalarField at_lens(relayed, field.wavelength(), field.samples());
    at_lens = scaled(at_lens, 1.0 / M);
    at_lens = upsample(at_lens, setup.upsample);
    at_lens = apply(TiltedLens{setup.f, setup.tilt}, at_lens);

    TiltedLensResult res;
    bool have = false;
    for (double z : setup.planes()) {
        IntensityImage img = intensity(fresnel_transform(at_lens, z));
        StripeReading r = count_stripes(img);
        r.plane_z = z;
        res.scan.push_back(PlaneScore{z, r.count, r.contrast});
        const bool better = !have || r.contrast > res.reading.contrast ||
                            (r.contrast == res.reading.contrast && z < res.reading.plane_z);
        if (better) {
            res.reading = r;
            res.image = std::move(img);
            have = true;
        }
    }
    if (res.reading.contrast < kMinContrast) {
        res.reading.count = 0;
        res.reading.sign = 0;
        res.reading.inconclusive = true;
    }
    return res;
}

}  // namespace vortexsim
