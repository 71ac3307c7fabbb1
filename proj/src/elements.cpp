#include "vortexsim/elements.hpp"

#include <cmath>
#include <numbers>

namespace vortexsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

cplx unit_phase(double ph) { return cplx(std::cos(ph), std::sin(ph)); }

double azimuth_0_2pi(double x, double y) {
    double phi = std::atan2(y, x);
    if (phi < 0.0) phi += kTwoPi;
    return phi;
}

}  // namespace

void validate(const OpticalElement& e) {
    std::visit(overloaded{
                   [](const StaircaseMask& m) {
                       if (m.sectors < 2) throw Error("staircase mask needs at least 2 sectors");
                       if (!(m.power_transmittance > 0.0 && m.power_transmittance <= 1.0))
                           throw Error("staircase power_transmittance must be in (0, 1]");
                   },
                   [](const SpiralPlate&) {},
                   [](const ForkedGrating& g) {
                       if (!(g.efficiency > 0.0 && g.efficiency <= 1.0)) throw Error("grating efficiency must be in (0, 1]");
                   },
                   [](const ThinLens& l) {
                       if (l.f == 0.0 || !std::isfinite(l.f)) throw Error("lens focal length must be nonzero");
                   },
                   [](const TiltedLens& l) {
                       if (l.f == 0.0 || !std::isfinite(l.f)) throw Error("lens focal length must be nonzero");
                       if (!(l.tilt >= 0.0 && l.tilt < std::numbers::pi / 2)) throw Error("lens tilt must be in [0, pi/2)");
                   },
                   [](const CircularAperture& a) {
                       if (!(a.radius > 0.0)) throw Error("aperture radius must be positive");
                   },
               },
               e);
}

std::string element_name(const OpticalElement& e) {
    return std::visit(overloaded{
                          [](const StaircaseMask&) { return std::string("staircase_mask"); },
                          [](const SpiralPlate&) { return std::string("spiral_plate"); },
                          [](const ForkedGrating&) { return std::string("forked_grating"); },
                          [](const ThinLens&) { return std::string("thin_lens"); },
                          [](const TiltedLens&) { return std::string("tilted_lens"); },
                          [](const CircularAperture&) { return std::string("circular_aperture"); },
                      },
                      e);
}

int element_charge(const OpticalElement& e) {
    return std::visit(overloaded{
                          [](const StaircaseMask& m) { return m.charge; },
                          [](const SpiralPlate& s) { return s.charge; },
                          [](const ForkedGrating& g) { return g.charge; },
                          [](const auto&) { return 0; },
                      },
                      e);
}

cplx transmission(const OpticalElement& e, double x, double y, double wavelength) {
    const double k = kTwoPi / wavelength;
    return std::visit(overloaded{
                          [&](const StaircaseMask& m) {
                              const double phi = azimuth_0_2pi(x, y);
                              int sector = static_cast<int>(std::floor(m.sectors * phi / kTwoPi));
                              if (sector >= m.sectors) sector = m.sectors - 1;
                              return std::sqrt(m.power_transmittance) * unit_phase(m.charge * kTwoPi * sector / m.sectors);
                          },
                          [&](const SpiralPlate& s) { return unit_phase(s.charge * std::atan2(y, x)); },
                          [&](const ForkedGrating& g) { return std::sqrt(g.efficiency) * unit_phase(g.charge * std::atan2(y, x)); },
                          [&](const ThinLens& l) { return unit_phase(-k * (x * x + y * y) / (2.0 * l.f)); },
                          [&](const TiltedLens& l) {
                              const double c = std::cos(l.tilt);
                              const double fx = l.f * c;
                              const double fy = l.f / c;
                              return unit_phase(-k * (x * x / (2.0 * fx) + y * y / (2.0 * fy)));
                          },
                          [&](const CircularAperture& a) { return cplx(x * x + y * y <= a.radius * a.radius ? 1.0 : 0.0, 0.0); },
                      },
                      e);
}

ScalarField apply(const OpticalElement& e, const ScalarField& field) {
    validate(e);
    ScalarField out = field;
    const auto& g = field.grid();
    for (int i = 0; i < g.ny; ++i) {
        const double y = g.y(i);
        for (int j = 0; j < g.nx; ++j) out.at(i, j) *= transmission(e, g.x(j), y, field.wavelength());
    }
    return out;
}

}  // namespace vortexsim
