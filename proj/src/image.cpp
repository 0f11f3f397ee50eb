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

#include "fisherlens/image.hpp"

#include <algorithm>
#include <cmath>

#include "fisherlens/error.hpp"

namespace fisherlens {

namespace {

void check_dims(int width, int height) {
    if (width < 0 || height < 0) {
        throw ArgumentError("image dimensions must be non-negative, got " +
                            std::to_string(width) + "x" + std::to_string(height));
    }
}

std::uint8_t round_half_up_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace

std::string to_string(const Rect& r) {
    return "(" + std::to_string(r.x) + ", " + std::to_string(r.y) + ", " +
           std::to_string(r.w) + ", " + std::to_string(r.h) + ")";
}

double iou(const Rect& a, const Rect& b) {
    const int x0 = std::max(a.x, b.x);
    const int y0 = std::max(a.y, b.y);
    const int x1 = std::min(a.x + a.w, b.x + b.w);
    const int y1 = std::min(a.y + a.h, b.y + b.h);
    if (x1 <= x0 || y1 <= y0) return 0.0;
    const double inter = static_cast<double>(x1 - x0) * (y1 - y0);
    const double uni = static_cast<double>(a.area() + b.area()) - inter;
    return uni > 0 ? inter / uni : 0.0;
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * height) {
        throw ArgumentError("gray image data length " + std::to_string(data_.size()) +
                            " does not match " + std::to_string(width) + "x" +
                            std::to_string(height));
    }
}

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * height * 3) {
        throw ArgumentError("rgb image data length " + std::to_string(data_.size()) +
                            " does not match " + std::to_string(width) + "x" +
                            std::to_string(height) + "x3");
    }
}

GrayMethod parse_gray_method(const std::string& name) {
    if (name == "luminosity") return GrayMethod::luminosity;
    if (name == "average") return GrayMethod::average;
    throw ArgumentError("unknown grayscale method '" + name + "' (expected luminosity|average)");
}

const char* to_string(GrayMethod m) {
    return m == GrayMethod::average ? "average" : "luminosity";
}

GrayImage gray_average(const RgbImage& img) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(img.width()) * img.height());
    const auto& src = img.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const unsigned total = src[3 * i] + src[3 * i + 1] + src[3 * i + 2];
        out[i] = static_cast<std::uint8_t>(total / 3);
    }
    return GrayImage(img.width(), img.height(), std::move(out));
}

GrayImage gray_luminosity(const RgbImage& img) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(img.width()) * img.height());
    const auto& src = img.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        // 0.3/0.59/0.11 as hundredths keeps x.5 ties exact.
        const unsigned hundredths = 30u * src[3 * i] + 59u * src[3 * i + 1] + 11u * src[3 * i + 2];
        out[i] = static_cast<std::uint8_t>((hundredths + 50u) / 100u);
    }
    return GrayImage(img.width(), img.height(), std::move(out));
}

GrayImage to_gray(const RgbImage& img, GrayMethod method) {
    return method == GrayMethod::average ? gray_average(img) : gray_luminosity(img);
}

GrayImage crop(const GrayImage& img, const Rect& r) {
    if (r.w <= 0 || r.h <= 0 || r.x < 0 || r.y < 0 || r.x + r.w > img.width() ||
        r.y + r.h > img.height()) {
        throw BoundsError("crop rect " + to_string(r) + " outside " +
                          std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                          " image");
    }
    GrayImage out(r.w, r.h);
    for (int i = 0; i < r.h; ++i) {
        for (int j = 0; j < r.w; ++j) out.at(j, i) = img.at(r.x + j, r.y + i);
    }
    return out;
}

GrayImage resize_bilinear(const GrayImage& img, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) {
        throw ArgumentError("resize target must be at least 1x1, got " + std::to_string(out_w) +
                            "x" + std::to_string(out_h));
    }
    if (img.empty()) throw ArgumentError("cannot resize an empty image");
    if (out_w == img.width() && out_h == img.height()) return img;

    const double sx = static_cast<double>(img.width()) / out_w;
    const double sy = static_cast<double>(img.height()) / out_h;

    struct Tap {
        int i0, i1;
        double frac;
    };
    auto taps = [](int out, int in, double scale) {
        std::vector<Tap> t(static_cast<std::size_t>(out));
        for (int d = 0; d < out; ++d) {
            double s = (d + 0.5) * scale - 0.5;
            s = std::clamp(s, 0.0, static_cast<double>(in - 1));
            const int i0 = static_cast<int>(std::floor(s));
            const int i1 = std::min(i0 + 1, in - 1);
            t[d] = {i0, i1, s - i0};
        }
        return t;
    };
    const auto tx = taps(out_w, img.width(), sx);
    const auto ty = taps(out_h, img.height(), sy);

    GrayImage out(out_w, out_h);
    for (int y = 0; y < out_h; ++y) {
        const Tap& v = ty[y];
        for (int x = 0; x < out_w; ++x) {
            const Tap& u = tx[x];
            const double top = img.at(u.i0, v.i0) * (1 - u.frac) + img.at(u.i1, v.i0) * u.frac;
            const double bot = img.at(u.i0, v.i1) * (1 - u.frac) + img.at(u.i1, v.i1) * u.frac;
            out.at(x, y) = round_half_up_u8(top * (1 - v.frac) + bot * v.frac);
        }
    }
    return out;
}

IntegralImage::IntegralImage(const GrayImage& img)
    : width_(img.width() + 1), height_(img.height() + 1) {
    const std::size_t n = static_cast<std::size_t>(width_) * height_;
    sums_.assign(n, 0);
    sq_sums_.assign(n, 0);
    for (int y = 0; y < img.height(); ++y) {
        std::int64_t row = 0;
        std::int64_t row_sq = 0;
        for (int x = 0; x < img.width(); ++x) {
            const std::int64_t v = img.at(x, y);
            row += v;
            row_sq += v * v;
            sums_[idx(x + 1, y + 1)] = sums_[idx(x + 1, y)] + row;
            sq_sums_[idx(x + 1, y + 1)] = sq_sums_[idx(x + 1, y)] + row_sq;
        }
    }
}

}  // namespace fisherlens
