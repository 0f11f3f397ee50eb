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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fisherlens/cascade.hpp"
#include "fisherlens/emotion.hpp"
#include "fisherlens/image.hpp"
#include "fisherlens/linalg.hpp"

namespace fisherlens {

/// n flattened faces (one per row, intensities scaled to [0, 1]) and their labels.
struct SampleMatrix {
    Matrix rows;
    std::vector<EmotionLabel> labels;
};

/// Flattens equally sized faces row-major and divides by 255.
SampleMatrix make_samples(std::span<const GrayImage> faces, std::span<const EmotionLabel> labels);

std::vector<double> flatten(const GrayImage& face);

/// Distinct labels in code order.
std::vector<EmotionLabel> distinct_labels(std::span<const EmotionLabel> labels);

struct PcaResult {
    std::vector<double> mean;
    Matrix basis;                     // d x k, orthonormal columns
    std::vector<double> eigenvalues;  // top k, descending
};

/// PCA through the n x n Gram matrix of centered rows (divided by n).
/// Throws ArgumentError unless 1 <= k <= n-1 and RankError when one of the top
/// k eigenvalues is numerically zero.
PcaResult pca_fit(const Matrix& x, std::size_t k, Exec exec = Exec::parallel);

/// Fisher discriminant directions (k x (c-1)) for projected samples y. Solves
/// S_b v = lambda S_w v after a Cholesky reduction of the ridged S_w. Columns
/// are unit length; they are S_w-orthogonal, not mutually orthogonal.
Matrix lda_fit(const Matrix& y, std::span<const EmotionLabel> labels);

struct FisherModel {
    int face_w = 0;
    int face_h = 0;
    std::vector<double> mean;              // d
    Matrix projection;                     // d x f, unit columns
    Matrix projected_train;                // n x f
    std::vector<EmotionLabel> train_labels;
    std::vector<EmotionLabel> class_list;  // distinct labels, code order

    std::size_t dims() const { return mean.size(); }
    std::size_t fisher_dims() const { return projection.cols(); }
};

struct TrainOptions {
    std::optional<std::size_t> pca_dims;  // default n - c
    Exec exec = Exec::parallel;
};

/// PCA to n-c dimensions then LDA to c-1; W = W_pca W_lda with renormalized
/// columns. Deterministic for a given sample order.
FisherModel train_fisherface(const SampleMatrix& samples, int face_w, int face_h,
                             const TrainOptions& opts = {});

struct Prediction {
    EmotionLabel label = EmotionLabel::neutral;
    double distance = 0;
    std::optional<std::pair<EmotionLabel, double>> runner_up;  // nearest other class
};

/// Nearest projected training sample (lowest index on ties). x is a flattened
/// face already scaled to [0, 1].
Prediction predict_vector(const FisherModel& model, std::span<const double> x);
Prediction predict(const FisherModel& model, const GrayImage& face);

/// Wᵀ(x - mean).
std::vector<double> project(const FisherModel& model, std::span<const double> x);

inline constexpr int kModelFormatVersion = 1;

/// JSON document; reals printed with 17 significant digits.
std::string save_model(const FisherModel& model);
/// Throws LoadError (version, truncated or consistency).
FisherModel load_model(std::string_view document);

void write_model(const std::filesystem::path& path, const FisherModel& model);
FisherModel read_model(const std::filesystem::path& path);

}  // namespace fisherlens
