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

// Data-parallel inner loops. Each kernel has a serial reference and an OpenMP
// version; both produce bitwise-identical results (per-element accumulation
// order is the same, and parallel partial results are merged in index order).

#include <span>
#include <vector>

#include "fisherlens/cascade.hpp"
#include "fisherlens/image.hpp"
#include "fisherlens/linalg.hpp"

namespace fisherlens::kernels {

/// Top-left corners of every passing window on the grid (0, step, 2*step, ...),
/// in row-major order.
std::vector<Rect> scan_windows_serial(const ScaledCascade& cascade, const IntegralImage& ii,
                                      int step);
std::vector<Rect> scan_windows_parallel(const ScaledCascade& cascade, const IntegralImage& ii,
                                        int step);

/// X Xᵀ for row-sample matrix X.
Matrix gram_serial(const Matrix& x);
Matrix gram_parallel(const Matrix& x);

/// A · B.
Matrix multiply_serial(const Matrix& a, const Matrix& b);
Matrix multiply_parallel(const Matrix& a, const Matrix& b);

/// Squared Euclidean distance from probe to every row of points.
std::vector<double> squared_distances_serial(const Matrix& points, std::span<const double> probe);
std::vector<double> squared_distances_parallel(const Matrix& points,
                                               std::span<const double> probe);

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int max_threads();
/// n <= 0 restores one thread per processor.
void set_threads(int n);

}  // namespace fisherlens::kernels
