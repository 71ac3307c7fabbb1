#include "vortexsim/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace vortexsim {

ImageSummary summarize(const IntensityImage& img) {
    ImageSummary s;
    if (img.values.empty()) return s;
    const auto [mn, mx] = std::minmax_element(img.values.begin(), img.values.end());
    s.min = *mn;
    s.max = *mx;
    double p = 0.0, sx = 0.0, sy = 0.0;
    const auto& g = img.grid;
    for (int i = 0; i < g.ny; ++i)
        for (int j = 0; j < g.nx; ++j) {
            const double v = img.at(i, j);
            p += v;
            sx += v * g.x(j);
            sy += v * g.y(i);
        }
    if (p > 0.0) {
        s.centroid_x = sx / p;
        s.centroid_y = sy / p;
    }
    return s;
}

std::vector<unsigned char> encode_pgm(const IntensityImage& img) {
    const auto& g = img.grid;
    const std::string header = "P5\n" + std::to_string(g.nx) + " " + std::to_string(g.ny) + "\n255\n";
    std::vector<unsigned char> out(header.begin(), header.end());
    const double mx = img.values.empty() ? 0.0 : *std::max_element(img.values.begin(), img.values.end());
    out.reserve(out.size() + g.size());
    for (int i = g.ny - 1; i >= 0; --i)
        for (int j = 0; j < g.nx; ++j) {
            const double v = mx > 0.0 ? img.at(i, j) / mx : 0.0;
            out.push_back(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
        }
    return out;
}

void write_pgm(const IntensityImage& img, const std::string& path) {
    const auto bytes = encode_pgm(img);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + path + " for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error("write failed for " + path);
}

}  // namespace vortexsim
