// Copyright 2026 The FisherLens Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>

#include "fisherlens/dataset.hpp"
#include "fisherlens/error.hpp"
#include "fisherlens/image.hpp"
#include "support.hpp"

using namespace fisherlens;

namespace {

RgbImage one_pixel(int r, int g, int b) {
    return RgbImage(1, 1, {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                           static_cast<std::uint8_t>(b)});
}

GrayImage ramp(int w, int h) {
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) img.at(x, y) = static_cast<std::uint8_t>(y * w + x);
    }
    return img;
}

}  // namespace

TEST_CASE("gray_average on the table pixel and the zero pixel") {
    CHECK(gray_average(one_pixel(134, 21, 107)).at(0, 0) == 87);
    CHECK(gray_average(one_pixel(0, 0, 0)).at(0, 0) == 0);
}

TEST_CASE("gray_luminosity worked values") {
    CHECK(gray_luminosity(one_pixel(134, 21, 107)).at(0, 0) == 64);
    // 0.3 * 255 = 76.5 rounds half up
    CHECK(gray_luminosity(one_pixel(255, 0, 0)).at(0, 0) == 77);
}

TEST_CASE("both grayscale formulas map (v, v, v) to v") {
    for (int v = 0; v < 256; ++v) {
        CHECK(gray_average(one_pixel(v, v, v)).at(0, 0) == v);
        CHECK(gray_luminosity(one_pixel(v, v, v)).at(0, 0) == v);
    }
}

TEST_CASE("luminosity is within half a level of the real-valued formula") {
    Rng rng(7);
    for (int i = 0; i < 20000; ++i) {
        const int r = static_cast<int>(randint(rng, 0, 255));
        const int g = static_cast<int>(randint(rng, 0, 255));
        const int b = static_cast<int>(randint(rng, 0, 255));
        const double exact = (30.0 * r + 59.0 * g + 11.0 * b) / 100.0;
        const int got = gray_luminosity(one_pixel(r, g, b)).at(0, 0);
        REQUIRE(std::abs(got - exact) <= 0.5);
        REQUIRE(gray_average(one_pixel(r, g, b)).at(0, 0) == (r + g + b) / 3);
    }
}

TEST_CASE("grayscale preserves dimensions") {
    RgbImage img(5, 3, std::vector<std::uint8_t>(45, 9));
    const auto g = gray_luminosity(img);
    CHECK(g.width() == 5);
    CHECK(g.height() == 3);
    CHECK(gray_average(img).data().size() == 15);
}

TEST_CASE("image constructors validate data length") {
    CHECK_THROWS_AS(GrayImage(2, 2, std::vector<std::uint8_t>(3)), ArgumentError);
    CHECK_THROWS_AS(RgbImage(2, 2, std::vector<std::uint8_t>(4)), ArgumentError);
}

TEST_CASE("crop") {
    const GrayImage img = ramp(4, 4);
    CHECK(crop(img, {0, 0, 4, 4}) == img);

    const GrayImage inner = crop(img, {1, 1, 2, 2});
    CHECK(inner == GrayImage(2, 2, {5, 6, 9, 10}));

    CHECK_THROWS_AS(crop(img, {3, 3, 2, 2}), BoundsError);
    try {
        crop(img, {3, 3, 2, 2});
    } catch (const BoundsError& e) {
        CHECK(std::string(e.what()).find("(3, 3, 2, 2)") != std::string::npos);
    }
    CHECK_THROWS_AS(crop(img, {-1, 0, 2, 2}), BoundsError);
    CHECK_THROWS_AS(crop(img, {0, 0, 0, 2}), BoundsError);
}

TEST_CASE("crop composes by translation") {
    Rng rng(11);
    const GrayImage img = testing::random_image(rng, 20, 15);
    for (int t = 0; t < 200; ++t) {
        const int aw = static_cast<int>(randint(rng, 1, 20));
        const int ah = static_cast<int>(randint(rng, 1, 15));
        const Rect a{static_cast<int>(randint(rng, 0, 20 - aw)), static_cast<int>(randint(rng, 0, 15 - ah)), aw, ah};
        const int bw = static_cast<int>(randint(rng, 1, aw));
        const int bh = static_cast<int>(randint(rng, 1, ah));
        const Rect b{static_cast<int>(randint(rng, 0, aw - bw)), static_cast<int>(randint(rng, 0, ah - bh)), bw, bh};
        REQUIRE(crop(crop(img, a), b) == crop(img, {a.x + b.x, a.y + b.y, b.w, b.h}));
    }
}

TEST_CASE("resize_bilinear") {
    Rng rng(3);
    const GrayImage img = testing::random_image(rng, 9, 7);
    CHECK(resize_bilinear(img, 9, 7) == img);

    const GrayImage flat(5, 4, 200);
    for (auto [w, h] : {std::pair{1, 1}, {3, 9}, {17, 2}, {5, 4}}) {
        CHECK(resize_bilinear(flat, w, h) == GrayImage(w, h, 200));
    }

    // Hand evaluation of src = (dst + 0.5) * 0.5 - 0.5 at the four centers:
    // -0.25 -> clamp 0, 0.25, 0.75, 1.25 -> clamp 1.
    const GrayImage two(2, 1, {0, 100});
    CHECK(resize_bilinear(two, 4, 1) == GrayImage(4, 1, {0, 25, 75, 100}));

    CHECK_THROWS_AS(resize_bilinear(img, 0, 3), ArgumentError);
    CHECK_THROWS_AS(resize_bilinear(img, 3, 0), ArgumentError);
}

TEST_CASE("integral image basics") {
    const IntegralImage one(GrayImage(1, 1, {5}));
    CHECK(one.rect_sum({0, 0, 1, 1}) == 5);
    CHECK(one.rect_sqsum({0, 0, 1, 1}) == 25);

    const IntegralImage zero(GrayImage(6, 4, 0));
    for (int y = 0; y <= 4; ++y) {
        for (int x = 0; x <= 6; ++x) {
            CHECK(zero.sum(x, y) == 0);
            CHECK(zero.sqsum(x, y) == 0);
        }
    }
}

TEST_CASE("integral rect sums equal naive sums on random images") {
    Rng rng(2026);
    for (int img_i = 0; img_i < 10; ++img_i) {
        const GrayImage img = testing::random_image(rng, 32, 32);
        const IntegralImage ii(img);
        for (int y = 0; y <= 32; ++y) {
            CHECK(ii.sum(0, y) == 0);
            for (int x = 1; x <= 32; ++x) REQUIRE(ii.sum(x, y) >= ii.sum(x - 1, y));
        }
        for (int r = 0; r < 100; ++r) {
            const int w = static_cast<int>(randint(rng, 1, 32));
            const int h = static_cast<int>(randint(rng, 1, 32));
            const Rect rect{static_cast<int>(randint(rng, 0, 32 - w)), static_cast<int>(randint(rng, 0, 32 - h)), w, h};
            std::int64_t s = 0;
            std::int64_t sq = 0;
            for (int y = rect.y; y < rect.y + h; ++y) {
                for (int x = rect.x; x < rect.x + w; ++x) {
                    s += img.at(x, y);
                    sq += img.at(x, y) * img.at(x, y);
                }
            }
            REQUIRE(ii.rect_sum(rect) == s);
            REQUIRE(ii.rect_sqsum(rect) == sq);
        }
    }
}

TEST_CASE("integral does not overflow on a saturated 4096x4096 image") {
    const IntegralImage ii(GrayImage(4096, 4096, 255));
    CHECK(ii.rect_sum({0, 0, 4096, 4096}) == std::int64_t{255} * 4096 * 4096);
    CHECK(ii.rect_sqsum({0, 0, 4096, 4096}) == std::int64_t{255 * 255} * 4096 * 4096);
}

TEST_CASE("iou") {
    CHECK(iou({0, 0, 10, 10}, {0, 0, 10, 10}) == doctest::Approx(1.0));
    CHECK(iou({0, 0, 10, 10}, {5, 0, 10, 10}) == doctest::Approx(50.0 / 150.0));
    CHECK(iou({0, 0, 10, 10}, {20, 20, 5, 5}) == 0.0);
}
