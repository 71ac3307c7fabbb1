#include "vortexsim/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vortexsim/fft.hpp"

namespace vortexsim {

namespace {

constexpr double kPi = std::numbers::pi;

int round_up_16(double n) {
    const int m = static_cast<int>(std::ceil(n));
    return std::max(16, (m + 15) / 16 * 16);
}

struct AxisSpread {
    double centroid = 0.0;   // m
    double variance = 0.0;   // m^2
    double cross = 0.0;      // <(x - xbar) kx>, dimensionless
    double k_mean = 0.0;     // rad/m
    double k_var = 0.0;      // rad^2/m^2
};

// spatial and spectral second moments along both axes
void spreads(const ScalarField& field, AxisSpread& ax, AxisSpread& ay) {
    const auto& g = field.grid();
    const auto& e = field.samples();
    const BeamMoments m = beam_moments(field);
    ax.centroid = m.cx;
    ay.centroid = m.cy;
    ax.variance = m.var_x;
    ay.variance = m.var_y;

    std::vector<cplx> spec = e;
    fft2(spec, g.ny, g.nx, -1);
    double pk = 0.0, skx = 0.0, sky = 0.0;
    for (int i = 0; i < g.ny; ++i) {
        const double ky = fft_frequency(i, g.ny, g.dy);
        for (int j = 0; j < g.nx; ++j) {
            const double kx = fft_frequency(j, g.nx, g.dx);
            const double w = std::norm(spec[static_cast<std::size_t>(i) * g.nx + j]);
            pk += w;
            skx += w * kx;
            sky += w * ky;
        }
    }
    ax.k_mean = skx / pk;
    ay.k_mean = sky / pk;
    double vkx = 0.0, vky = 0.0;
    std::vector<cplx> dxs(spec.size()), dys(spec.size());
    for (int i = 0; i < g.ny; ++i) {
        const double ky = fft_frequency(i, g.ny, g.dy);
        for (int j = 0; j < g.nx; ++j) {
            const double kx = fft_frequency(j, g.nx, g.dx);
            const std::size_t n = static_cast<std::size_t>(i) * g.nx + j;
            const double w = std::norm(spec[n]);
            vkx += w * (kx - ax.k_mean) * (kx - ax.k_mean);
            vky += w * (ky - ay.k_mean) * (ky - ay.k_mean);
            dxs[n] = cplx(0.0, kx) * spec[n];
            dys[n] = cplx(0.0, ky) * spec[n];
        }
    }
    ax.k_var = vkx / pk;
    ay.k_var = vky / pk;

    fft2(dxs, g.ny, g.nx, +1);
    fft2(dys, g.ny, g.nx, +1);
    const double inv_n = 1.0 / static_cast<double>(g.size());
    double p = 0.0, cx = 0.0, cy = 0.0;
    for (int i = 0; i < g.ny; ++i) {
        const double y = g.y(i) - ay.centroid;
        for (int j = 0; j < g.nx; ++j) {
            const double x = g.x(j) - ax.centroid;
            const std::size_t n = static_cast<std::size_t>(i) * g.nx + j;
            p += std::norm(e[n]);
            cx += x * (std::conj(e[n]) * dxs[n] * inv_n).imag();
            cy += y * (std::conj(e[n]) * dys[n] * inv_n).imag();
        }
    }
    ax.cross = cx / p;
    ay.cross = cy / p;
}

struct AxisVerdict {
    double need_extent = 0.0;    // criterion (a)
    double need_phase = 0.0;     // criterion (b), as an extent
};

AxisVerdict judge_axis(const AxisSpread& s, double dz, double k, double pitch) {
    AxisVerdict v;
    const double centroid = s.centroid + dz * s.k_mean / k;
    const double var = s.variance + 2.0 * dz * s.cross / k + dz * dz * s.k_var / (k * k);
    const double w = 2.0 * std::sqrt(std::max(var, 0.0));
    v.need_extent = 2.0 * (std::abs(centroid) + 3.0 * w);
    double kb = std::abs(s.k_mean) + 3.0 * std::sqrt(s.k_var);
    kb = std::min({kb, kPi / pitch, 0.999 * k});
    const double kz = std::sqrt(k * k - kb * kb);
    // phase step dz kb/kz * (2 pi / extent) < pi  <=>  extent > 2 dz kb / kz
    v.need_phase = 2.0 * std::abs(dz) * kb / kz;
    return v;
}

}  // namespace

BeamMoments beam_moments(const IntensityImage& img) {
    const auto& g = img.grid;
    double p = 0.0, sx = 0.0, sy = 0.0;
    for (int i = 0; i < g.ny; ++i)
        for (int j = 0; j < g.nx; ++j) {
            const double v = img.at(i, j);
            p += v;
            sx += v * g.x(j);
            sy += v * g.y(i);
        }
    BeamMoments m;
    if (!(p > 0.0)) return m;
    m.cx = sx / p;
    m.cy = sy / p;
    double vx = 0.0, vy = 0.0, cxy = 0.0;
    for (int i = 0; i < g.ny; ++i) {
        const double y = g.y(i) - m.cy;
        for (int j = 0; j < g.nx; ++j) {
            const double x = g.x(j) - m.cx;
            const double v = img.at(i, j);
            vx += v * x * x;
            vy += v * y * y;
            cxy += v * x * y;
        }
    }
    m.var_x = vx / p;
    m.var_y = vy / p;
    m.cov_xy = cxy / p;
    m.radius_x = 2.0 * std::sqrt(m.var_x);
    m.radius_y = 2.0 * std::sqrt(m.var_y);
    return m;
}

BeamMoments beam_moments(const ScalarField& f) { return beam_moments(intensity(f)); }

SamplingCheck sampling_ok(const ScalarField& field, double dz) {
    SamplingCheck out;
    const auto& g = field.grid();
    out.suggested_nx = g.nx;
    out.suggested_ny = g.ny;
    if (dz == 0.0) return out;
    if (!(power(field) > 0.0)) return out;

    AxisSpread sx, sy;
    spreads(field, sx, sy);
    const double k = field.k();
    const AxisVerdict vx = judge_axis(sx, dz, k, g.dx);
    const AxisVerdict vy = judge_axis(sy, dz, k, g.dy);

    const bool extent_ok = vx.need_extent <= g.extent_x() && vy.need_extent <= g.extent_y();
    const bool phase_ok = vx.need_phase < g.extent_x() && vy.need_phase < g.extent_y();
    out.ok = extent_ok && phase_ok;
    if (out.ok) return out;

    const double need_x = std::max(vx.need_extent, vx.need_phase * 1.05);
    const double need_y = std::max(vy.need_extent, vy.need_phase * 1.05);
    out.suggested_nx = std::max(g.nx, round_up_16(need_x / g.dx));
    out.suggested_ny = std::max(g.ny, round_up_16(need_y / g.dy));
    std::ostringstream os;
    if (!extent_ok) {
        out.criterion = "extent";
        os << "extent: beam at dz=" << dz << " m needs " << vx.need_extent << " x " << vy.need_extent
           << " m including the 4w guard, grid spans " << g.extent_x() << " x " << g.extent_y() << " m";
    } else {
        out.criterion = "transfer-phase";
        os << "transfer-phase: transfer-function phase step reaches pi at dz=" << dz << " m; need extent above "
           << vx.need_phase << " x " << vy.need_phase << " m";
    }
    os << "; suggested grid " << out.suggested_nx << "x" << out.suggested_ny << " at the same pitch";
    out.diagnostic = os.str();
    return out;
}

ScalarField propagate(const ScalarField& field, double dz) { return propagate(field, PropagationPlan{dz, 1.0}); }

ScalarField propagate(const ScalarField& field, const PropagationPlan& plan) {
    if (!(plan.bandlimit > 0.0 && plan.bandlimit <= 1.0)) throw Error("bandlimit must be in (0, 1]");
    if (!std::isfinite(plan.dz)) throw Error("propagation distance must be finite");
    const SamplingCheck chk = sampling_ok(field, plan.dz);
    if (!chk.ok) throw SamplingError("sampling check failed: " + chk.diagnostic);
    if (plan.dz == 0.0 && plan.bandlimit == 1.0) return field;

    const auto& g = field.grid();
    const double k = field.k();
    const double kx_lim = plan.bandlimit * kPi / g.dx;
    const double ky_lim = plan.bandlimit * kPi / g.dy;
    std::vector<cplx> spec = field.samples();
    fft2(spec, g.ny, g.nx, -1);
    const double inv_n = 1.0 / static_cast<double>(g.size());
    for (int i = 0; i < g.ny; ++i) {
        const double ky = fft_frequency(i, g.ny, g.dy);
        for (int j = 0; j < g.nx; ++j) {
            const double kx = fft_frequency(j, g.nx, g.dx);
            cplx& s = spec[static_cast<std::size_t>(i) * g.nx + j];
            const double kt2 = kx * kx + ky * ky;
            if (kt2 > k * k || (plan.bandlimit < 1.0 && (std::abs(kx) > kx_lim || std::abs(ky) > ky_lim))) {
                s = 0.0;
                continue;
            }
            const double ph = plan.dz * std::sqrt(k * k - kt2);
            s *= cplx(std::cos(ph), std::sin(ph)) * inv_n;
        }
    }
    fft2(spec, g.ny, g.nx, +1);
    return ScalarField(g, field.wavelength(), std::move(spec));
}

IntensityImage focal_image(const ScalarField& field, const OpticalElement& lens, double z_obs) {
    return intensity(propagate(apply(lens, field), z_obs));
}

ScalarField fresnel_transform(const ScalarField& field, double z) {
    if (!(z > 0.0)) throw Error("Fresnel transform distance must be positive");
    const auto& g = field.grid();
    const double lambda = field.wavelength();
    const double k = field.k();
    std::vector<cplx> buf = field.samples();
    for (int i = 0; i < g.ny; ++i) {
        const double y = g.y(i);
        for (int j = 0; j < g.nx; ++j) {
            const double x = g.x(j);
            const double ph = 0.5 * k * (x * x + y * y) / z;
            buf[static_cast<std::size_t>(i) * g.nx + j] *= cplx(std::cos(ph), std::sin(ph));
        }
    }
    centered_fft2(buf, g.ny, g.nx, -1);
    GridSpec out{g.nx, g.ny, lambda * z / (g.nx * g.dx), lambda * z / (g.ny * g.dy)};
    const cplx pre = cplx(0.0, -1.0) * (g.dx * g.dy / (lambda * z));
    for (int i = 0; i < out.ny; ++i) {
        const double v = out.y(i);
        for (int j = 0; j < out.nx; ++j) {
            const double u = out.x(j);
            const double ph = k * z + 0.5 * k * (u * u + v * v) / z;
            buf[static_cast<std::size_t>(i) * out.nx + j] *= pre * cplx(std::cos(ph), std::sin(ph));
        }
    }
    return ScalarField(out, lambda, std::move(buf));
}

ScalarField upsample(const ScalarField& field, int factor) {
    if (factor < 1) throw Error("upsample factor must be at least 1");
    if (factor == 1) return field;
    const auto& g = field.grid();
    std::vector<cplx> spec = field.samples();
    centered_fft2(spec, g.ny, g.nx, -1);
    GridSpec big{g.nx * factor, g.ny * factor, g.dx / factor, g.dy / factor};
    std::vector<cplx> pad(big.size(), cplx(0.0, 0.0));
    const double inv_n = 1.0 / static_cast<double>(g.size());
    for (int i = 0; i < g.ny; ++i) {
        const int bi = big.ny / 2 + (i - g.ny / 2);
        for (int j = 0; j < g.nx; ++j) {
            const int bj = big.nx / 2 + (j - g.nx / 2);
            pad[static_cast<std::size_t>(bi) * big.nx + bj] = spec[static_cast<std::size_t>(i) * g.nx + j] * inv_n;
        }
    }
    centered_fft2(pad, big.ny, big.nx, +1);
    return ScalarField(big, field.wavelength(), std::move(pad));
}

GridSpec relay_input_grid(const GridSpec& out, double wavelength, double f, int pad) {
    if (pad < 1) throw Error("relay pad factor must be at least 1");
    if (!(f > 0.0)) throw Error("relay focal length must be positive");
    const int nx = out.nx * pad;
    const int ny = out.ny * pad;
    return GridSpec{nx, ny, wavelength * f / (nx * out.dx), wavelength * f / (ny * out.dy)};
}

ScalarField fourier_relay(const ScalarField& field, double f, const GridSpec& out) {
    out.validate();
    const auto& g = field.grid();
    const double lambda = field.wavelength();
    const double px = lambda * f / (g.nx * g.dx);
    const double py = lambda * f / (g.ny * g.dy);
    if (std::abs(px - out.dx) > 1e-9 * out.dx || std::abs(py - out.dy) > 1e-9 * out.dy)
        throw Error("relay output pitch does not match lambda f / extent of the input grid");
    if (out.nx > g.nx || out.ny > g.ny) throw Error("relay output grid larger than input grid");
    std::vector<cplx> spec = field.samples();
    centered_fft2(spec, g.ny, g.nx, -1);
    const cplx pre = cplx(0.0, -1.0) * (g.dx * g.dy / (lambda * f));
    std::vector<cplx> crop(out.size());
    for (int i = 0; i < out.ny; ++i) {
        const int si = g.ny / 2 + (i - out.ny / 2);
        for (int j = 0; j < out.nx; ++j) {
            const int sj = g.nx / 2 + (j - out.nx / 2);
            crop[static_cast<std::size_t>(i) * out.nx + j] = pre * spec[static_cast<std::size_t>(si) * g.nx + sj];
        }
    }
    return ScalarField(out, lambda, std::move(crop));
}

}  // namespace vortexsim
