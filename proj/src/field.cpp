#include "vortexsim/field.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

namespace vortexsim {

void GridSpec::validate() const {
    if (nx < 16 || ny < 16) throw Error("grid too small");
    if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy))
        throw Error("grid pitch must be positive and finite");
}

std::string describe(const GridSpec& g) {
    std::ostringstream os;
    os << g.nx << "x" << g.ny << " @ " << g.dx << " x " << g.dy << " m";
    return os.str();
}

static void check_wavelength(double wavelength) {
    if (!(wavelength > 0.0) || !std::isfinite(wavelength)) throw Error("wavelength must be positive");
}

ScalarField::ScalarField(const GridSpec& grid, double wavelength)
    : grid_(grid), wavelength_(wavelength) {
    grid_.validate();
    check_wavelength(wavelength);
    samples_.assign(grid_.size(), cplx(0.0, 0.0));
}

ScalarField::ScalarField(const GridSpec& grid, double wavelength, std::vector<cplx> samples)
    : grid_(grid), wavelength_(wavelength), samples_(std::move(samples)) {
    grid_.validate();
    check_wavelength(wavelength);
    if (samples_.size() != grid_.size()) throw Error("sample count does not match grid");
    for (const auto& s : samples_)
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) throw Error("nonfinite sample");
}

double ScalarField::k() const { return 2.0 * std::numbers::pi / wavelength_; }

ScalarField zero_field(const GridSpec& grid, double wavelength) { return ScalarField(grid, wavelength); }

double power(const ScalarField& f) {
    double s = 0.0;
    for (const auto& v : f.samples()) s += std::norm(v);
    return s * f.grid().cell_area();
}

static void require_compatible(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid() == b.grid())) throw Error("grid mismatch");
    if (a.wavelength() != b.wavelength()) throw Error("wavelength mismatch");
}

cplx overlap(const ScalarField& a, const ScalarField& b) {
    require_compatible(a, b);
    const auto& sa = a.samples();
    const auto& sb = b.samples();
    double re = 0.0, im = 0.0;
    for (std::size_t n = 0; n < sa.size(); ++n) {
        const cplx v = std::conj(sa[n]) * sb[n];
        re += v.real();
        im += v.imag();
    }
    return cplx(re, im) * a.grid().cell_area();
}

ScalarField normalize(const ScalarField& f) {
    const double p = power(f);
    if (!(p > 0.0)) throw Error("cannot normalize zero power");
    return scaled(f, 1.0 / std::sqrt(p));
}

ScalarField scaled(const ScalarField& f, cplx c) {
    ScalarField out = f;
    for (auto& v : out.samples()) v *= c;
    return out;
}

ScalarField conjugated(const ScalarField& f) {
    ScalarField out = f;
    for (auto& v : out.samples()) v = std::conj(v);
    return out;
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    require_compatible(a, b);
    ScalarField out = a;
    for (std::size_t n = 0; n < out.samples().size(); ++n) out.samples()[n] += b.samples()[n];
    return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    require_compatible(a, b);
    ScalarField out = a;
    for (std::size_t n = 0; n < out.samples().size(); ++n) out.samples()[n] -= b.samples()[n];
    return out;
}

ScalarField mirrored_x(const ScalarField& f) {
    const auto& g = f.grid();
    ScalarField out(g, f.wavelength());
    // column j sits at (j - nx/2)dx; its mirror is column nx - j (mod nx for odd wrap)
    for (int i = 0; i < g.ny; ++i)
        for (int j = 0; j < g.nx; ++j) {
            const int m = (2 * (g.nx / 2) - j + g.nx) % g.nx;
            out.at(i, m) = f.at(i, j);
        }
    return out;
}

IntensityImage intensity(const ScalarField& f) {
    IntensityImage img{f.grid(), {}};
    img.values.resize(f.samples().size());
    for (std::size_t n = 0; n < img.values.size(); ++n) img.values[n] = std::norm(f.samples()[n]);
    return img;
}

cplx on_axis(const ScalarField& f) { return f.at(f.grid().ny / 2, f.grid().nx / 2); }

double relative_error(const ScalarField& a, const ScalarField& b) {
    require_compatible(a, b);
    double num = 0.0, den = 0.0;
    for (std::size_t n = 0; n < a.samples().size(); ++n) {
        num += std::norm(a.samples()[n] - b.samples()[n]);
        den += std::norm(b.samples()[n]);
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : INFINITY;
    return std::sqrt(num / den);
}

// ---- VTXF ----

namespace {

constexpr char kMagic[4] = {'V', 'T', 'X', 'F'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 4 * 3 + 8 * 3;

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

void put_f64(std::vector<unsigned char>& out, double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

struct Reader {
    const std::vector<unsigned char>& bytes;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (bytes.size() - pos < n) throw Error("unexpected end of payload");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(bytes[pos + b]) << (8 * b);
        pos += 4;
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes[pos + b]) << (8 * b);
        pos += 8;
        return std::bit_cast<double>(v);
    }
};

}  // namespace

std::vector<unsigned char> encode_vtxf(const ScalarField& f) {
    const auto& g = f.grid();
    std::vector<unsigned char> out;
    out.reserve(kHeaderBytes + 16 * g.size());
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(g.nx));
    put_u32(out, static_cast<std::uint32_t>(g.ny));
    put_f64(out, g.dx);
    put_f64(out, g.dy);
    put_f64(out, f.wavelength());
    for (const auto& v : f.samples()) {
        put_f64(out, v.real());
        put_f64(out, v.imag());
    }
    return out;
}

ScalarField decode_vtxf(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw Error("not a VTXF file");
    Reader r{bytes, 4};
    const std::uint32_t version = r.u32();
    if (version != kVersion) throw Error("unsupported VTXF version " + std::to_string(version));
    GridSpec g;
    const std::uint32_t nx = r.u32();
    const std::uint32_t ny = r.u32();
    if (nx > (1u << 16) || ny > (1u << 16)) throw Error("VTXF grid dimensions out of range");
    g.nx = static_cast<int>(nx);
    g.ny = static_cast<int>(ny);
    g.dx = r.f64();
    g.dy = r.f64();
    const double wavelength = r.f64();
    g.validate();
    const std::size_t count = g.size();
    r.need(16 * count);
    std::vector<cplx> samples(count);
    for (std::size_t n = 0; n < count; ++n) {
        const double re = r.f64();
        const double im = r.f64();
        samples[n] = cplx(re, im);
    }
    if (r.pos != bytes.size()) throw Error("trailing bytes after payload");
    for (const auto& s : samples)
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) throw Error("nonfinite sample in payload");
    return ScalarField(g, wavelength, std::move(samples));
}

void save_field(const ScalarField& f, const std::string& path) {
    const auto bytes = encode_vtxf(f);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + path + " for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error("write failed for " + path);
}

ScalarField load_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return decode_vtxf(bytes);
}

}  // namespace vortexsim
