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

#include "fisherlens/kernels.hpp"

#include <cstddef>

#include "fisherlens/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fisherlens::kernels {

namespace {

int grid_count(int extent, int window, int step) {
    return extent < window ? 0 : (extent - window) / step + 1;
}

void check_multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ArgumentError("multiply: inner dimensions differ (" + std::to_string(a.cols()) +
                            " vs " + std::to_string(b.rows()) + ")");
    }
}

}  // namespace

std::vector<Rect> scan_windows_serial(const ScaledCascade& cascade, const IntegralImage& ii,
                                      int step) {
    const int ww = cascade.window_w();
    const int wh = cascade.window_h();
    const int nx = grid_count(ii.image_width(), ww, step);
    const int ny = grid_count(ii.image_height(), wh, step);
    std::vector<Rect> hits;
    for (int gy = 0; gy < ny; ++gy) {
        for (int gx = 0; gx < nx; ++gx) {
            if (cascade.passes(ii, gx * step, gy * step)) hits.push_back({gx * step, gy * step, ww, wh});
        }
    }
    return hits;
}

std::vector<Rect> scan_windows_parallel(const ScaledCascade& cascade, const IntegralImage& ii,
                                        int step) {
    const int ww = cascade.window_w();
    const int wh = cascade.window_h();
    const int nx = grid_count(ii.image_width(), ww, step);
    const int ny = grid_count(ii.image_height(), wh, step);
    std::vector<std::vector<Rect>> rows(static_cast<std::size_t>(ny));

#pragma omp parallel for schedule(dynamic, 4)
    for (int gy = 0; gy < ny; ++gy) {
        auto& row = rows[static_cast<std::size_t>(gy)];
        for (int gx = 0; gx < nx; ++gx) {
            if (cascade.passes(ii, gx * step, gy * step)) row.push_back({gx * step, gy * step, ww, wh});
        }
    }

    std::vector<Rect> hits;
    for (const auto& row : rows) hits.insert(hits.end(), row.begin(), row.end());
    return hits;
}

Matrix gram_serial(const Matrix& x) {
    const std::size_t n = x.rows();
    Matrix g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = dot(x.row(i), x.row(j));
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

Matrix gram_parallel(const Matrix& x) {
    const auto n = static_cast<std::ptrdiff_t>(x.rows());
    Matrix g(x.rows(), x.rows());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        for (std::ptrdiff_t j = 0; j <= i; ++j) {
            const double v = dot(x.row(static_cast<std::size_t>(i)), x.row(static_cast<std::size_t>(j)));
            g(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
            g(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = v;
        }
    }
    return g;
}

namespace {

void multiply_row(const Matrix& a, const Matrix& b, Matrix& out, std::size_t i) {
    auto dst = out.row(i);
    const auto src = a.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
        const double aik = src[k];
        if (aik == 0.0) continue;
        const auto brow = b.row(k);
        for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aik * brow[j];
    }
}

}  // namespace

Matrix multiply_serial(const Matrix& a, const Matrix& b) {
    check_multiply(a, b);
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) multiply_row(a, b, out, i);
    return out;
}

Matrix multiply_parallel(const Matrix& a, const Matrix& b) {
    check_multiply(a, b);
    Matrix out(a.rows(), b.cols());
    const auto n = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) multiply_row(a, b, out, static_cast<std::size_t>(i));
    return out;
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

void check_probe(const Matrix& points, std::span<const double> probe) {
    if (probe.size() != points.cols()) {
        throw ArgumentError("probe has " + std::to_string(probe.size()) + " components, expected " +
                            std::to_string(points.cols()));
    }
}

}  // namespace

std::vector<double> squared_distances_serial(const Matrix& points, std::span<const double> probe) {
    check_probe(points, probe);
    std::vector<double> out(points.rows());
    for (std::size_t i = 0; i < points.rows(); ++i) out[i] = squared_distance(points.row(i), probe);
    return out;
}

std::vector<double> squared_distances_parallel(const Matrix& points,
                                               std::span<const double> probe) {
    check_probe(points, probe);
    std::vector<double> out(points.rows());
    const auto n = static_cast<std::ptrdiff_t>(points.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = squared_distance(points.row(static_cast<std::size_t>(i)), probe);
    }
    return out;
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
    omp_set_num_threads(n > 0 ? n : omp_get_num_procs());
#else
    (void)n;
#endif
}

}  // namespace fisherlens::kernels
