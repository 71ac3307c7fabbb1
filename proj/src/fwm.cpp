#include "vortexsim/fwm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vortexsim/modes.hpp"
#include "vortexsim/propagation.hpp"

namespace vortexsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxCrossing = 20e-3;

double wavenumber(double lambda) { return 2.0 * kPi / lambda; }

bool same_wavelength(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

ScalarField ramped(const ScalarField& f, double k, double angle) {
    if (angle == 0.0) return f;
    ScalarField out = f;
    const auto& g = f.grid();
    const double kx = k * std::sin(angle);
    for (int j = 0; j < g.nx; ++j) {
        const double ph = kx * g.x(j);
        const cplx r(std::cos(ph), std::sin(ph));
        for (int i = 0; i < g.ny; ++i) out.at(i, j) *= r;
    }
    return out;
}

}  // namespace

void FwmConfig::validate() const {
    for (double l : {lambda1, lambda2, lambda_ir, lambda_bl})
        if (!(l > 0.0) || !std::isfinite(l)) throw Error("fwm wavelengths must be positive");
    const double lhs = 1.0 / lambda1 + 1.0 / lambda2;
    const double rhs = 1.0 / lambda_ir + 1.0 / lambda_bl;
    if (std::abs(lhs - rhs) > 1e-3 * lhs) {
        std::ostringstream os;
        os << "fwm wavelengths violate the frequency sum rule by " << std::abs(lhs - rhs) / lhs << " (limit 1e-3)";
        throw Error(os.str());
    }
    if (!std::isfinite(coupling)) throw Error("fwm coupling must be finite");
    if (!(ir_waist > 0.0)) throw Error("ir_waist must be positive");
    if (!(cell_length >= 0.0)) throw Error("cell_length must be nonnegative");
    if (slices < 1) throw Error("slices must be at least 1");
}

double FwmConfig::blue_wavelength() const { return 1.0 / (1.0 / lambda1 + 1.0 / lambda2 - 1.0 / lambda_ir); }

double BeamGeometry::alpha() const { return std::abs(theta2 - theta1); }

void BeamGeometry::validate() const {
    if (!std::isfinite(theta1) || !std::isfinite(theta2)) throw Error("beam angles must be finite");
    if (alpha() > kMaxCrossing) throw Error("crossing angle exceeds the 20 mrad guard");
}

Vec3 direction(double theta) { return Vec3{std::sin(theta), 0.0, std::cos(theta)}; }

int expected_charge(int l780, int l776, int l_ir) { return l780 + l776 - l_ir; }

PhaseMatchSolution phase_match(const BeamGeometry& geom, const FwmConfig& cfg) {
    cfg.validate();
    geom.validate();
    const double k1 = wavenumber(cfg.lambda1);
    const double k2 = wavenumber(cfg.lambda2);
    const double kir = wavenumber(cfg.lambda_ir);
    const double kbl = wavenumber(cfg.blue_wavelength());
    const double Kx = k1 * std::sin(geom.theta1) + k2 * std::sin(geom.theta2);
    const double Kz = k1 * std::cos(geom.theta1) + k2 * std::cos(geom.theta2);
    const double thK = std::atan2(Kx, Kz);
    const double tol = 1e-9 * kbl;

    auto g = [&](double th) { return std::hypot(Kx - kbl * std::sin(th), Kz - kbl * std::cos(th)) - kir; };

    PhaseMatchSolution sol;
    double th_bl = thK;
    const double g0 = g(thK);
    if (std::abs(g0) > tol) {
        if (g0 > 0.0) {
            std::ostringstream os;
            os << "no phase-matched direction: best residual " << g0 << " rad/m exceeds " << tol << " rad/m";
            throw PhaseMatchError(os.str(), g0);
        }
        // g rises monotonically away from the pump-sum direction; search on the d2 side
        const double side = geom.theta2 >= geom.theta1 ? 1.0 : -1.0;
        double lo = 0.0, hi = kPi;
        for (int it = 0; it < 200 && hi - lo > 1e-18; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (g(thK + side * mid) < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        const double a = g(thK + side * lo);
        const double b = g(thK + side * hi);
        th_bl = thK + side * (std::abs(a) <= std::abs(b) ? lo : hi);
    }

    const double rx = Kx - kbl * std::sin(th_bl);
    const double rz = Kz - kbl * std::cos(th_bl);
    sol.theta_bl = th_bl;
    sol.theta_ir = std::atan2(rx, rz);
    sol.d_bl = direction(sol.theta_bl);
    sol.d_ir = direction(sol.theta_ir);
    const double ex = rx - kir * sol.d_ir[0];
    const double ez = rz - kir * sol.d_ir[2];
    sol.residual = std::hypot(ex, ez);
    if (sol.residual > tol) {
        std::ostringstream os;
        os << "phase matching did not converge: residual " << sol.residual << " rad/m";
        throw PhaseMatchError(os.str(), sol.residual);
    }
    const double lo_t = std::min(geom.theta1, geom.theta2);
    const double hi_t = std::max(geom.theta1, geom.theta2);
    sol.bl_inside = geom.alpha() == 0.0 ? th_bl == geom.theta1 : (th_bl > lo_t && th_bl < hi_t);
    return sol;
}

ScalarField idler_field(const GridSpec& grid, const FwmConfig& cfg) {
    ScalarField ir = lg_mode(grid, cfg.lambda_ir, LgParams{0, cfg.ir_charge, cfg.ir_waist, 0.0});
    double peak = 0.0;
    for (const auto& v : ir.samples()) peak = std::max(peak, std::abs(v));
    return scaled(ir, 1.0 / peak);
}

ScalarField fwm_blue_field(const ScalarField& e780, const ScalarField& e776, const FwmConfig& cfg) {
    cfg.validate();
    if (!(e780.grid() == e776.grid())) throw Error("grid mismatch between pump fields");
    if (!same_wavelength(e780.wavelength(), cfg.lambda1)) throw Error("first pump wavelength does not match lambda1");
    if (!same_wavelength(e776.wavelength(), cfg.lambda2)) throw Error("second pump wavelength does not match lambda2");
    const ScalarField ir = idler_field(e780.grid(), cfg);
    std::vector<cplx> s(e780.samples().size());
    for (std::size_t n = 0; n < s.size(); ++n)
        s[n] = cfg.coupling * e780.samples()[n] * e776.samples()[n] * std::conj(ir.samples()[n]);
    return ScalarField(e780.grid(), cfg.blue_wavelength(), std::move(s));
}

ScalarField fwm_scene(const ScalarField& e780, const ScalarField& e776, const BeamGeometry& geom, const FwmConfig& cfg,
                      double z_out, PhaseMatchSolution* match) {
    cfg.validate();
    if (!(e780.grid() == e776.grid())) throw Error("grid mismatch between pump fields");
    if (!same_wavelength(e780.wavelength(), cfg.lambda1)) throw Error("first pump wavelength does not match lambda1");
    if (!same_wavelength(e776.wavelength(), cfg.lambda2)) throw Error("second pump wavelength does not match lambda2");
    const PhaseMatchSolution sol = phase_match(geom, cfg);
    if (match) *match = sol;

    const auto& grid = e780.grid();
    const double lam_bl = cfg.blue_wavelength();
    const ScalarField p1 = ramped(e780, wavenumber(cfg.lambda1), 0.0);
    const ScalarField p2 = ramped(e776, wavenumber(cfg.lambda2), geom.theta2 - geom.theta1);
    const ScalarField ir = ramped(idler_field(grid, cfg), wavenumber(cfg.lambda_ir), sol.theta_ir - geom.theta1);

    ScalarField acc(grid, lam_bl);
    for (int s = 0; s < cfg.slices; ++s) {
        const double zs = cfg.slices == 1 ? 0.0 : -0.5 * cfg.cell_length + (s + 0.5) * cfg.cell_length / cfg.slices;
        const ScalarField a = propagate(p1, zs);
        const ScalarField b = propagate(p2, zs);
        std::vector<cplx> prod(a.samples().size());
        for (std::size_t n = 0; n < prod.size(); ++n)
            prod[n] = cfg.coupling * a.samples()[n] * b.samples()[n] * std::conj(ir.samples()[n]);
        const ScalarField back = propagate(ScalarField(grid, lam_bl, std::move(prod)), -zs);
        for (std::size_t n = 0; n < acc.samples().size(); ++n) acc.samples()[n] += back.samples()[n];
    }
    if (cfg.slices > 1) acc = scaled(acc, 1.0 / cfg.slices);

    const ScalarField blue = ramped(acc, wavenumber(lam_bl), -(sol.theta_bl - geom.theta1));
    return propagate(blue, z_out);
}

}  // namespace vortexsim
