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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fisherlens/dataset.hpp"
#include "fisherlens/emotion.hpp"
#include "fisherlens/image.hpp"

namespace fisherlens {

struct TrialConfig {
    std::uint64_t seed = 42;
    double fraction = 0.8;
    std::optional<std::vector<EmotionLabel>> subset;
    int trials = 10;
    std::optional<std::size_t> pca_dims;
};

/// Rows are true labels, columns predictions, both in `classes` order.
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;
    explicit ConfusionMatrix(std::vector<EmotionLabel> classes);

    const std::vector<EmotionLabel>& classes() const { return classes_; }
    std::size_t size() const { return classes_.size(); }
    std::size_t index_of(EmotionLabel l) const;

    void add(EmotionLabel truth, EmotionLabel predicted, std::uint64_t n = 1);
    std::uint64_t at(std::size_t row, std::size_t col) const { return counts_[row * size() + col]; }

    std::uint64_t total() const;
    std::uint64_t correct() const;
    /// trace / total (0 for an empty matrix).
    double accuracy() const;
    double recall(std::size_t row) const;
    double precision(std::size_t col) const;

    /// Element-wise sum; the class lists must match.
    ConfusionMatrix& operator+=(const ConfusionMatrix& other);

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
    std::vector<EmotionLabel> classes_;
    std::vector<std::uint64_t> counts_;
};

struct TrialResult {
    double accuracy = 0;
    ConfusionMatrix matrix;
};

struct TrialReport {
    TrialConfig config;
    std::vector<double> per_trial;
    double mean = 0;
    double std = 0;  // sample (n-1); 0 for a single trial
    ConfusionMatrix pooled;
};

/// Keeps the records (and matching faces) whose label is in subset, in order.
struct FilteredSet {
    DatasetManifest manifest;
    std::vector<GrayImage> faces;
};
FilteredSet filter_subset(const DatasetManifest& manifest, std::span<const GrayImage> faces,
                          std::span<const EmotionLabel> subset);

/// Filter, split with seed ^ trial_index, train, classify the held-out part.
/// faces[i] is the loaded image of manifest.records[i].
TrialResult run_trial(const DatasetManifest& manifest, std::span<const GrayImage> faces,
                      const TrialConfig& cfg, std::uint64_t trial_index);

/// Trials 0..trials-1 (run concurrently), reported in index order.
TrialReport run_repeated(const DatasetManifest& manifest, std::span<const GrayImage> faces,
                         const TrialConfig& cfg);

struct Confusion {
    EmotionLabel truth;
    EmotionLabel predicted;
    std::uint64_t count;
};

/// The k largest non-zero off-diagonal cells, ties in (row, col) order.
std::vector<Confusion> top_confusions(const ConfusionMatrix& cm, std::size_t k);

struct RenderedReport {
    std::string text;
    std::string json;
};

/// Human table plus a JSON document carrying the same numbers (4 decimals).
RenderedReport render_report(const TrialReport& report);

/// Parses "happy,anger" or "1,2" into labels; ArgumentError on unknown names.
std::vector<EmotionLabel> parse_subset(const std::string& text);

}  // namespace fisherlens
