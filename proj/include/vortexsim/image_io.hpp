#pragma once

#include <string>
#include <vector>

#include "vortexsim/field.hpp"

namespace vortexsim {

struct ImageSummary {
    double min = 0.0;
    double max = 0.0;
    double centroid_x = 0.0;  // m
    double centroid_y = 0.0;  // m
};

ImageSummary summarize(const IntensityImage& img);

// 8-bit binary PGM, max-normalized, top row is the largest y
std::vector<unsigned char> encode_pgm(const IntensityImage& img);
void write_pgm(const IntensityImage& img, const std::string& path);

}  // namespace vortexsim
