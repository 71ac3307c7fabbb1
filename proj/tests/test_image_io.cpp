#include <doctest.h>

#include <fstream>
#include <iterator>

#include "helpers.hpp"
#include "vortexsim/image_io.hpp"

using namespace vortexsim;

TEST_CASE("PGM encoding is max-normalized with the largest y on top") {
    const GridSpec g{16, 16, 1e-6, 1e-6};
    IntensityImage img{g, std::vector<double>(g.size(), 0.0)};
    img.values[static_cast<std::size_t>(15) * 16 + 3] = 4.0;  // row 15 is the largest y
    img.values[0] = 2.0;
    const auto bytes = encode_pgm(img);
    const std::string header = "P5\n16 16\n255\n";
    REQUIRE(bytes.size() == header.size() + 256);
    CHECK(std::string(bytes.begin(), bytes.begin() + header.size()) == header);
    CHECK(bytes[header.size() + 3] == 255);
    CHECK(bytes[header.size() + 15 * 16] == 128);
}

TEST_CASE("all-zero image encodes as black") {
    const GridSpec g{16, 16, 1e-6, 1e-6};
    const auto bytes = encode_pgm(IntensityImage{g, std::vector<double>(g.size(), 0.0)});
    for (std::size_t n = bytes.size() - 256; n < bytes.size(); ++n) CHECK(bytes[n] == 0);
}

TEST_CASE("summary reports extremes and centroid") {
    const GridSpec g{16, 16, 1e-6, 1e-6};
    IntensityImage img{g, std::vector<double>(g.size(), 0.0)};
    img.values[static_cast<std::size_t>(8) * 16 + 10] = 1.0;
    img.values[static_cast<std::size_t>(8) * 16 + 12] = 1.0;
    const ImageSummary s = summarize(img);
    CHECK(s.max == 1.0);
    CHECK(s.min == 0.0);
    CHECK(s.centroid_x == doctest::Approx(3e-6));
    CHECK(s.centroid_y == doctest::Approx(0.0));
}

TEST_CASE("write_pgm writes the encoded bytes") {
    const auto dir = testutil::scratch_dir("pgm");
    const GridSpec g{16, 16, 1e-6, 1e-6};
    IntensityImage img{g, std::vector<double>(g.size(), 1.0)};
    write_pgm(img, (dir / "a.pgm").string());
    std::ifstream is(dir / "a.pgm", std::ios::binary);
    const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
    CHECK(bytes == encode_pgm(img));
    std::filesystem::remove_all(dir);
}
