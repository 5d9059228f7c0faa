// Copyright 2026 The djf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "core/filters.hpp"
#include "support/oracles.hpp"
#include "support/test_util.hpp"

using namespace djf;
using test::max_abs_diff;
using test::random_tensor;

TEST_CASE("nearest_downsample: stated convention and identity") {
    Tensor img(1, 2, 2, std::vector<float>{1, 2, 3, 4});
    const Tensor down = nearest_downsample(img, 2);
    REQUIRE(down.size() == 1);
    CHECK(down.data()[0] == 1.0f);

    const Tensor any = random_tensor<float>(2, 6, 4, 5);
    CHECK(test::bitwise_equal(nearest_downsample(any, 1), any));

    Tensor constant(1, 4, 4, std::vector<float>(16, 0.25f));
    const Tensor dc = nearest_downsample(constant, 2);
    for (std::size_t i = 0; i < dc.size(); ++i) CHECK(dc.data()[i] == 0.25f);

    CHECK_THROWS_AS(nearest_downsample(Tensor(1, 5, 4), 2), ShapeError);
}

TEST_CASE("bicubic: constant image stays constant") {
    Tensor constant(2, 5, 4, std::vector<float>(40, 0.6f));
    const Tensor up = bicubic_resize(constant, 11, 9);
    for (std::size_t i = 0; i < up.size(); ++i) {
        CHECK(up.data()[i] == doctest::Approx(0.6f).epsilon(1e-6));
    }
}

TEST_CASE("bicubic: reproduces a linear ramp in the interior") {
    Tensor ramp(1, 1, 8);
    for (std::size_t x = 0; x < 8; ++x) ramp.at(0, 0, x) = static_cast<float>(x);
    const Tensor up = bicubic_resize(ramp, 1, 16);
    // src = (x + 0.5)/2 - 0.5; interior outputs must lie on the ramp.
    for (std::size_t x = 4; x < 12; ++x) {
        const double src = (x + 0.5) / 2.0 - 0.5;
        CHECK(up.at(0, 0, x) == doctest::Approx(src).epsilon(1e-5));
    }
}

TEST_CASE("bicubic matches the non-separable oracle") {
    for (int trial = 0; trial < 12; ++trial) {
        const Tensor img = random_tensor<float>(trial % 2 + 1, 6, 6, 600 + trial);
        const std::size_t oh = 5 + (trial * 3) % 12;
        const std::size_t ow = 4 + (trial * 5) % 14;
        CHECK(max_abs_diff(bicubic_resize(img, oh, ow), test::naive_bicubic(img, oh, ow)) <=
              1e-6);
    }
    // downscale path too
    const Tensor img = random_tensor<float>(1, 12, 10, 9);
    CHECK(max_abs_diff(bicubic_resize(img, 5, 4), test::naive_bicubic(img, 5, 4)) <= 1e-6);
}

TEST_CASE("jbu: constant guidance reduces to pure spatial interpolation") {
    const Tensor low = random_tensor<float>(1, 4, 4, 11);
    Tensor guidance(3, 8, 8, std::vector<float>(192, 0.5f));
    JBUParams p{1.0, 0.1, 2};
    const Tensor out = joint_bilateral_upsample(low, guidance, p);

    // Spatial-only oracle: range term cancels when guidance is constant.
    Tensor spatial(1, 8, 8);
    for (std::size_t y = 0; y < 8; ++y) {
        for (std::size_t x = 0; x < 8; ++x) {
            double acc = 0.0, norm = 0.0;
            for (int dy = -2; dy <= 2; ++dy) {
                for (int dx = -2; dx <= 2; ++dx) {
                    const double oy = y / 2.0 - (static_cast<int>(y / 2) + dy);
                    const double ox = x / 2.0 - (static_cast<int>(x / 2) + dx);
                    const double w = std::exp(-(oy * oy + ox * ox) / 2.0);
                    const std::size_t ly = static_cast<std::size_t>(
                        std::clamp<int>(static_cast<int>(y / 2) + dy, 0, 3));
                    const std::size_t lx = static_cast<std::size_t>(
                        std::clamp<int>(static_cast<int>(x / 2) + dx, 0, 3));
                    acc += w * low.at(0, ly, lx);
                    norm += w;
                }
            }
            spatial.at(0, y, x) = static_cast<float>(acc / norm);
        }
    }
    CHECK(max_abs_diff(out, spatial) <= 1e-6);

    // A huge sigma_range makes any guidance behave like a constant one.
    const Tensor textured = random_tensor<float>(3, 8, 8, 12);
    JBUParams wide = p;
    wide.sigma_range = 1e6;
    CHECK(max_abs_diff(joint_bilateral_upsample(low, textured, wide), spatial) <= 1e-6);
}

TEST_CASE("jbu matches the brute-force oracle on random instances") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 25; ++trial) {
        std::uniform_int_distribution<int> spick(1, 3);
        const int s = spick(rng);
        const std::size_t lh = 3 + trial % 4;
        const std::size_t lw = 3 + (trial + 1) % 4;
        const Tensor low = random_tensor<float>(1, lh, lw, 700 + trial);
        const Tensor guidance = random_tensor<float>(trial % 2 ? 3 : 1, lh * s, lw * s,
                                                     800 + trial);
        JBUParams p{0.5 + 0.25 * (trial % 4), 0.05 + 0.05 * (trial % 3), 1 + trial % 3};
        CHECK(max_abs_diff(joint_bilateral_upsample(low, guidance, p),
                           test::naive_jbu(low, guidance, p)) <= 1e-6);
    }
}

TEST_CASE("jbu rejects non-integer scale ratios") {
    CHECK_THROWS_AS(joint_bilateral_upsample(Tensor(1, 4, 4), Tensor(3, 9, 8), JBUParams{}),
                    ShapeError);
    CHECK_THROWS_AS(joint_bilateral_upsample(Tensor(1, 4, 4), Tensor(3, 8, 12), JBUParams{}),
                    ShapeError);
}

TEST_CASE("guided filter: constant guidance degenerates to a double box mean") {
    const Tensor target = random_tensor<float>(1, 8, 8, 21);
    Tensor guidance(1, 8, 8, std::vector<float>(64, 0.3f));
    GFParams p{2, 1e-4};
    const Tensor out = guided_filter(target, guidance, p);
    const Tensor twice = box_mean(box_mean(target, 2), 2);
    CHECK(max_abs_diff(out, twice) <= 1e-5);
}

TEST_CASE("guided filter: self-guidance with tiny epsilon is near identity") {
    const Tensor img = random_tensor<float>(1, 10, 10, 22);
    const Tensor out = guided_filter(img, img, GFParams{2, 1e-8});
    CHECK(max_abs_diff(out, img) <= 1e-3);
}

TEST_CASE("guided filter matches the per-window oracle") {
    for (int trial = 0; trial < 15; ++trial) {
        const Tensor target = random_tensor<float>(1, 8, 8, 900 + trial);
        const Tensor guidance = random_tensor<float>(1, 8, 8, 950 + trial);
        GFParams p{1 + trial % 3, 1e-4 + 1e-3 * (trial % 2)};
        CHECK(max_abs_diff(guided_filter(target, guidance, p),
                           test::naive_guided_filter(target, guidance, p)) <= 1e-6);
    }
    CHECK_THROWS_AS(guided_filter(Tensor(1, 4, 4), Tensor(1, 5, 4), GFParams{}), ShapeError);
}

TEST_CASE("box mean equals naive summation exactly on integer images") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> val(0, 255);
    Tensor img(1, 9, 7);
    for (std::size_t i = 0; i < img.size(); ++i) img.data()[i] = static_cast<float>(val(rng));
    for (int r : {1, 2, 3}) {
        const Tensor fast = box_mean(img, r);
        const Tensor slow = test::naive_box_mean(img, r);
        for (std::size_t i = 0; i < fast.size(); ++i) {
            CHECK(fast.data()[i] == slow.data()[i]);
        }
    }
}

TEST_CASE("all four operators map constants to the same constant") {
    Tensor c1(1, 8, 8, std::vector<float>(64, 0.42f));
    Tensor g3(3, 16, 16, std::vector<float>(768, 0.42f));
    const Tensor a = nearest_downsample(c1, 2);
    const Tensor b = bicubic_resize(c1, 16, 16);
    const Tensor c = joint_bilateral_upsample(c1, g3, JBUParams{1.0, 0.1, 2});
    const Tensor d = guided_filter(c1, c1, GFParams{2, 1e-4});
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.data()[i] == doctest::Approx(0.42f));
    for (std::size_t i = 0; i < b.size(); ++i) {
        CHECK(b.data()[i] == doctest::Approx(0.42f).epsilon(1e-6));
    }
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(c.data()[i] == doctest::Approx(0.42f).epsilon(1e-6));
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(d.data()[i] == doctest::Approx(0.42f).epsilon(1e-6));
    }
}

TEST_CASE("jbu and gf outputs stay within the input range (plus slack)") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const Tensor low = random_tensor<float>(1, 4, 4, 1000 + trial, 0.2f, 0.8f);
        const Tensor guidance = random_tensor<float>(3, 8, 8, 1100 + trial);
        const Tensor up = joint_bilateral_upsample(low, guidance, JBUParams{1.0, 0.1, 2});
        const auto [lo, hi] = std::minmax_element(low.data(), low.data() + low.size());
        for (std::size_t i = 0; i < up.size(); ++i) {
            CHECK(up.data()[i] >= *lo - 1e-6f);
            CHECK(up.data()[i] <= *hi + 1e-6f);
        }

        const Tensor target = random_tensor<float>(1, 8, 8, 1200 + trial, 0.2f, 0.8f);
        const Tensor guide = random_tensor<float>(1, 8, 8, 1300 + trial);
        const Tensor gf = guided_filter(target, guide, GFParams{2, 1e-4});
        const auto [tlo, thi] = std::minmax_element(target.data(), target.data() + target.size());
        for (std::size_t i = 0; i < gf.size(); ++i) {
            CHECK(gf.data()[i] >= *tlo - 1e-6f);
            CHECK(gf.data()[i] <= *thi + 1e-6f);
        }
    }
}

TEST_CASE("nearest_downsample inverts constant-block upsampling") {
    // An image constant within each 2x2 block downsamples to those constants;
    // replicating them back reproduces the image.
    Tensor img(1, 4, 4);
    const float blocks[4] = {0.1f, 0.4f, 0.7f, 0.9f};
    for (std::size_t y = 0; y < 4; ++y) {
        for (std::size_t x = 0; x < 4; ++x) {
            img.at(0, y, x) = blocks[(y / 2) * 2 + x / 2];
        }
    }
    const Tensor down = nearest_downsample(img, 2);
    Tensor up(1, 4, 4);
    for (std::size_t y = 0; y < 4; ++y) {
        for (std::size_t x = 0; x < 4; ++x) up.at(0, y, x) = down.at(0, y / 2, x / 2);
    }
    CHECK(test::bitwise_equal(up, img));
}

TEST_CASE("luminance") {
    Tensor rgb(3, 1, 1, std::vector<float>{1.0f, 1.0f, 1.0f});
    CHECK(luminance(rgb).data()[0] == doctest::Approx(1.0f));
    const Tensor single = random_tensor<float>(1, 3, 3, 51);
    CHECK(test::bitwise_equal(luminance(single), single));
    CHECK_THROWS_AS(luminance(Tensor(2, 3, 3)), ShapeError);
}
