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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fisherlens {

struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    long long area() const { return static_cast<long long>(w) * h; }
    friend bool operator==(const Rect&, const Rect&) = default;
};

std::string to_string(const Rect& r);

/// Intersection over union; 0 when either rect is empty.
double iou(const Rect& a, const Rect& b);

/// Row-major 8-bit grayscale image.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, std::uint8_t fill = 0);
    GrayImage(int width, int height, std::vector<std::uint8_t> data);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return data_.empty(); }

    std::uint8_t at(int x, int y) const { return data_[index(x, y)]; }
    std::uint8_t& at(int x, int y) { return data_[index(x, y)]; }

    const std::vector<std::uint8_t>& data() const { return data_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Row-major interleaved R, G, B image.
class RgbImage {
public:
    struct Pixel {
        std::uint8_t r, g, b;
    };

    RgbImage() = default;
    RgbImage(int width, int height, std::vector<std::uint8_t> data);

    int width() const { return width_; }
    int height() const { return height_; }

    Pixel at(int x, int y) const {
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * width_ + x);
        return {data_[i], data_[i + 1], data_[i + 2]};
    }
    void set(int x, int y, Pixel p) {
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * width_ + x);
        data_[i] = p.r;
        data_[i + 1] = p.g;
        data_[i + 2] = p.b;
    }

    const std::vector<std::uint8_t>& data() const { return data_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

enum class GrayMethod { average, luminosity };

GrayMethod parse_gray_method(const std::string& name);
const char* to_string(GrayMethod m);

/// floor((R + G + B) / 3) per pixel.
GrayImage gray_average(const RgbImage& img);

/// round-half-up(0.3 R + 0.59 G + 0.11 B) per pixel, evaluated in exact
/// integer hundredths.
GrayImage gray_luminosity(const RgbImage& img);

GrayImage to_gray(const RgbImage& img, GrayMethod method);

/// Throws BoundsError when r does not lie inside img.
GrayImage crop(const GrayImage& img, const Rect& r);

/// Bilinear resampling with pixel-center alignment:
/// src = (dst + 0.5) * (in / out) - 0.5, clamped to the border.
GrayImage resize_bilinear(const GrayImage& img, int out_w, int out_h);

/// Zero-padded summed-area tables of intensities and squared intensities.
class IntegralImage {
public:
    IntegralImage() = default;
    explicit IntegralImage(const GrayImage& img);

    /// Source image dimensions (the tables are one larger on each axis).
    int image_width() const { return width_ - 1; }
    int image_height() const { return height_ - 1; }

    std::int64_t sum(int x, int y) const { return sums_[idx(x, y)]; }
    std::int64_t sqsum(int x, int y) const { return sq_sums_[idx(x, y)]; }

    std::int64_t rect_sum(const Rect& r) const {
        return sum(r.x + r.w, r.y + r.h) - sum(r.x + r.w, r.y) - sum(r.x, r.y + r.h) +
               sum(r.x, r.y);
    }
    std::int64_t rect_sqsum(const Rect& r) const {
        return sqsum(r.x + r.w, r.y + r.h) - sqsum(r.x + r.w, r.y) -
               sqsum(r.x, r.y + r.h) + sqsum(r.x, r.y);
    }

private:
    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;   // image width + 1
    int height_ = 0;  // image height + 1
    std::vector<std::int64_t> sums_;
    std::vector<std::int64_t> sq_sums_;
};

inline IntegralImage integral(const GrayImage& img) { return IntegralImage(img); }

}  // namespace fisherlens
