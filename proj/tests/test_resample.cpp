#include <catch2/catch_amalgamated.hpp>

#include "ssfn/resample.hpp"
#include "ssfn/rng.hpp"

using namespace ssfn;

namespace {

HsiCube random_cube(int l, int h, int w, std::uint64_t seed) {
    HsiCube c(l, h, w);
    Rng rng(seed);
    for (float& v : c.data) v = static_cast<float>(rand_unit(rng));
    return c;
}

// independently coded Catmull-Rom kernel for the oracle
double cubic_ref(double x) {
    const double a = -0.5;
    x = std::abs(x);
    if (x < 1.0) return (a + 2.0) * x * x * x - (a + 3.0) * x * x + 1.0;
    if (x < 2.0) return a * x * x * x - 5.0 * a * x * x + 8.0 * a * x - 4.0 * a;
    return 0.0;
}

// dense 2-D evaluation of the separable resampling formula: per axis, taps at
// clamped indices with widened support on downscale and per-axis weight
// normalization
std::vector<double> resize_oracle(const std::vector<double>& src, int in_h, int in_w, int out_h,
                                  int out_w, bool antialias) {
    auto axis = [antialias](int in_size, int out_size, int i) {
        const double ratio = static_cast<double>(in_size) / out_size;
        const double kscale = (antialias && ratio > 1.0) ? ratio : 1.0;
        const double center = (i + 0.5) * ratio - 0.5;
        std::vector<std::pair<int, double>> taps;
        double sum = 0.0;
        for (int j = static_cast<int>(std::ceil(center - 2.0 * kscale));
             j <= static_cast<int>(std::floor(center + 2.0 * kscale)); ++j) {
            const double w = cubic_ref((j - center) / kscale) / kscale;
            taps.emplace_back(std::clamp(j, 0, in_size - 1), w);
            sum += w;
        }
        for (auto& [idx, w] : taps) w /= sum;
        return taps;
    };
    std::vector<double> out(static_cast<std::size_t>(out_h) * out_w);
    for (int oy = 0; oy < out_h; ++oy) {
        const auto ty = axis(in_h, out_h, oy);
        for (int ox = 0; ox < out_w; ++ox) {
            const auto tx = axis(in_w, out_w, ox);
            double acc = 0.0;
            for (const auto& [sy, wy] : ty)
                for (const auto& [sx, wx] : tx)
                    acc += wy * wx * src[static_cast<std::size_t>(sy) * in_w + sx];
            out[static_cast<std::size_t>(oy) * out_w + ox] = acc;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("resampling to the same size is the identity") {
    HsiCube cube = random_cube(3, 9, 7, 11);
    HsiCube out = bicubic_resize(cube, 9, 7);
    REQUIRE(out.data == cube.data);
}

TEST_CASE("a constant band stays constant at any size") {
    HsiCube cube(2, 8, 8);
    for (float& v : cube.data) v = 0.37f;
    for (auto [h, w] : {std::pair{4, 4}, {16, 16}, {5, 13}, {2, 2}}) {
        HsiCube out = bicubic_resize(cube, h, w);
        for (float v : out.data) REQUIRE(v == Catch::Approx(0.37f).margin(1e-6));
    }
}

TEST_CASE("downscaling a ramp matches the dense kernel-sum oracle") {
    HsiCube cube(1, 8, 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) cube.at(0, y, x) = static_cast<float>(y * 8 + x) / 64.0f;
    HsiCube out = bicubic_resize(cube, 2, 2, true);
    std::vector<double> src(cube.data.begin(), cube.data.end());
    std::vector<double> ref = resize_oracle(src, 8, 8, 2, 2, true);
    for (int i = 0; i < 4; ++i) REQUIRE(out.data[i] == Catch::Approx(ref[i]).margin(1e-6));
}

TEST_CASE("random resampling matches the oracle in both directions") {
    HsiCube cube = random_cube(2, 12, 10, 17);
    for (auto [h, w] : {std::pair{6, 5}, {24, 20}, {7, 13}}) {
        HsiCube out = bicubic_resize(cube, h, w, true);
        for (int l = 0; l < 2; ++l) {
            std::vector<double> src(cube.band(l), cube.band(l) + 120);
            std::vector<double> ref = resize_oracle(src, 12, 10, h, w, true);
            for (int i = 0; i < h * w; ++i) {
                const double clamped = std::clamp(ref[i], 0.0, 1.0);
                REQUIRE(out.band(l)[i] == Catch::Approx(clamped).margin(1e-6));
            }
        }
    }
}

TEST_CASE("non-positive target sizes are rejected") {
    HsiCube cube = random_cube(1, 4, 4, 3);
    REQUIRE_THROWS_AS(bicubic_resize(cube, 0, 4), std::invalid_argument);
}

TEST_CASE("degrade divides the spatial size by the scale") {
    HsiCube cube = random_cube(31, 128, 128, 23);
    HsiCube lr = degrade(cube, DegradationSpec{4, true});
    REQUIRE(lr.bands == 31);
    REQUIRE(lr.height == 32);
    REQUIRE(lr.width == 32);
}

TEST_CASE("degrade with scale 1 is the identity") {
    HsiCube cube = random_cube(3, 8, 8, 29);
    REQUIRE(degrade(cube, DegradationSpec{1, true}).data == cube.data);
}

TEST_CASE("degrade after upsample preserves constants") {
    HsiCube cube(2, 8, 8);
    for (float& v : cube.data) v = 0.61f;
    HsiCube up = bicubic_resize(cube, 32, 32);
    HsiCube back = degrade(up, DegradationSpec{4, true});
    REQUIRE(back.height == 8);
    for (float v : back.data) REQUIRE(v == Catch::Approx(0.61f).margin(1e-6));
}

TEST_CASE("degrade rejects indivisible dimensions") {
    HsiCube cube = random_cube(1, 10, 10, 31);
    REQUIRE_THROWS_AS(degrade(cube, DegradationSpec{4, true}), std::invalid_argument);
}

TEST_CASE("tensor upsample agrees with the cube path") {
    HsiCube cube = random_cube(3, 6, 6, 37);
    HsiCube up_cube = bicubic_resize(cube, 24, 24);
    Tensor4<float> t(1, 3, 6, 6);
    std::copy(cube.data.begin(), cube.data.end(), t.data.begin());
    Tensor4<float> up_t = bicubic_upsample(t, 4);
    for (std::size_t i = 0; i < up_cube.data.size(); ++i)
        REQUIRE(up_t.data[i] == up_cube.data[i]);
}
