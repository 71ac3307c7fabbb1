#include "vortexsim/modes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

namespace vortexsim {

double rayleigh_range(double w0, double wavelength) { return std::numbers::pi * w0 * w0 / wavelength; }

double beam_radius(double w0, double wavelength, double z) {
    const double zr = rayleigh_range(w0, wavelength);
    return w0 * std::sqrt(1.0 + (z / zr) * (z / zr));
}

double laguerre(int n, double a, double x) {
    if (n < 0) throw Error("laguerre order must be nonnegative");
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = 1.0 + a - x;
    for (int m = 1; m < n; ++m) {
        const double next = ((2.0 * m + 1.0 + a - x) * cur - (m + a) * prev) / (m + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

ScalarField lg_mode(const GridSpec& grid, double wavelength, const LgParams& params) {
    grid.validate();
    if (params.p < 0) throw Error("radial index p must be nonnegative");
    if (!(params.w0 > 0.0)) throw Error("waist must be positive");
    ScalarField field(grid, wavelength);

    const double zr = rayleigh_range(params.w0, wavelength);
    const double w = beam_radius(params.w0, wavelength, params.z);
    const double extent = std::min(grid.extent_x(), grid.extent_y());
    if (extent < 6.0 * w) {
        std::ostringstream os;
        os << "grid too small for mode: extent " << extent << " m, need at least " << 6.0 * w << " m (6 w(z))";
        throw SamplingError(os.str());
    }

    const int al = std::abs(params.l);
    const double k = 2.0 * std::numbers::pi / wavelength;
    const double z = params.z;
    // 1/R(z) written to stay finite at z = 0
    const double inv_r = z / (z * z + zr * zr);
    const double gouy = (2 * params.p + al + 1) * std::atan2(z, zr);

    for (int i = 0; i < grid.ny; ++i) {
        const double y = grid.y(i);
        for (int j = 0; j < grid.nx; ++j) {
            const double x = grid.x(j);
            const double r2 = x * x + y * y;
            const double s = std::sqrt(2.0 * r2) / w;
            const double amp = std::pow(s, al) * laguerre(params.p, al, 2.0 * r2 / (w * w)) * std::exp(-r2 / (w * w));
            const double phase = params.l * std::atan2(y, x) + 0.5 * k * r2 * inv_r - gouy;
            field.at(i, j) = amp * cplx(std::cos(phase), std::sin(phase));
        }
    }
    return normalize(field);
}

ScalarField gaussian(const GridSpec& grid, double wavelength, double w0) {
    return lg_mode(grid, wavelength, LgParams{0, 0, w0, 0.0});
}

}  // namespace vortexsim
