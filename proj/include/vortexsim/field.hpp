#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vortexsim {

using cplx = std::complex<double>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// raised when a grid cannot represent a requested propagation
class SamplingError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

struct GridSpec {
    int nx = 0;
    int ny = 0;
    double dx = 0.0;  // m per column
    double dy = 0.0;  // m per row

    void validate() const;

    double x(int j) const { return (j - nx / 2) * dx; }
    double y(int i) const { return (i - ny / 2) * dy; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    double extent_x() const { return nx * dx; }
    double extent_y() const { return ny * dy; }
    double cell_area() const { return dx * dy; }

    bool operator==(const GridSpec&) const = default;
};

std::string describe(const GridSpec& g);

class ScalarField {
public:
    ScalarField(const GridSpec& grid, double wavelength);
    ScalarField(const GridSpec& grid, double wavelength, std::vector<cplx> samples);

    const GridSpec& grid() const { return grid_; }
    double wavelength() const { return wavelength_; }
    double k() const;

    cplx& at(int i, int j) { return samples_[static_cast<std::size_t>(i) * grid_.nx + j]; }
    const cplx& at(int i, int j) const { return samples_[static_cast<std::size_t>(i) * grid_.nx + j]; }

    std::vector<cplx>& samples() { return samples_; }
    const std::vector<cplx>& samples() const { return samples_; }

private:
    GridSpec grid_;
    double wavelength_;
    std::vector<cplx> samples_;
};

struct IntensityImage {
    GridSpec grid;
    std::vector<double> values;

    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.nx + j]; }
};

ScalarField zero_field(const GridSpec& grid, double wavelength);

double power(const ScalarField& f);
cplx overlap(const ScalarField& a, const ScalarField& b);
ScalarField normalize(const ScalarField& f);

ScalarField scaled(const ScalarField& f, cplx c);
ScalarField conjugated(const ScalarField& f);
ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);

// reflect x -> -x about the grid centre column
ScalarField mirrored_x(const ScalarField& f);

IntensityImage intensity(const ScalarField& f);
cplx on_axis(const ScalarField& f);

// relative L2 distance ||a-b|| / ||b||
double relative_error(const ScalarField& a, const ScalarField& b);

void save_field(const ScalarField& f, const std::string& path);
ScalarField load_field(const std::string& path);

std::vector<unsigned char> encode_vtxf(const ScalarField& f);
ScalarField decode_vtxf(const std::vector<unsigned char>& bytes);

}  // namespace vortexsim
