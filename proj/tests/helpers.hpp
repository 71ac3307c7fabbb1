#pragma once

#include <cmath>
#include <complex>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "vortexsim/field.hpp"

namespace testutil {

inline const vortexsim::GridSpec kGrid{512, 512, 4e-6, 4e-6};
inline const vortexsim::GridSpec kSmall{128, 128, 8e-6, 8e-6};

// fresh directory under the system temp dir
inline std::filesystem::path scratch_dir(const std::string& tag) {
    static int counter = 0;
    auto p = std::filesystem::temp_directory_path() / ("vortexsim-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline vortexsim::ScalarField random_field(const vortexsim::GridSpec& g, double wavelength, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    vortexsim::ScalarField f(g, wavelength);
    for (auto& s : f.samples()) s = {n(rng), n(rng)};
    return f;
}

}  // namespace testutil
