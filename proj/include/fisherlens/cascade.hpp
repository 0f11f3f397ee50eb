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
#include <string_view>
#include <vector>

#include "fisherlens/image.hpp"

namespace fisherlens {

struct HaarRect {
    Rect rect;  // base-window coordinates
    double weight = 0;
};

struct HaarFeature {
    std::vector<HaarRect> rects;
    bool tilted = false;
};

/// Decision stump: left_val when the normalized feature is below threshold.
struct WeakClassifier {
    HaarFeature feature;
    double threshold = 0;
    double left_val = 0;
    double right_val = 0;
};

struct Stage {
    std::vector<WeakClassifier> classifiers;
    double stage_threshold = 0;
};

struct CascadeModel {
    std::string name;
    int window_w = 0;
    int window_h = 0;
    std::vector<Stage> stages;
};

struct Detection {
    Rect rect;
    int neighbors = 0;

    friend bool operator==(const Detection&, const Detection&) = default;
};

enum class Exec { serial, parallel };

struct DetectParams {
    double scale_factor = 1.1;
    int min_neighbors = 3;
    int min_size = 24;
    Exec exec = Exec::parallel;
};

/// Parses a stump-based Haar cascade. Accepts the legacy opencv-haar-classifier
/// layout (size / stages / trees / stage_threshold) and the newer
/// opencv-cascade-classifier layout (width / height / internalNodes / features).
/// Throws ParseError (with line), SchemaError or UnsupportedFeatureError.
CascadeModel parse_cascade(std::string_view document, std::string_view fallback_name = "cascade");

/// Reads and parses a cascade file; the file stem names models lacking one.
CascadeModel load_cascade(const std::filesystem::path& path);

/// File names tried first, in this order, by load_cascade_dir.
std::span<const std::string_view> default_cascade_order();

/// Loads every *.xml cascade in dir: the default_cascade_order() names that
/// exist come first, then the remaining files in lexicographic order.
std::vector<CascadeModel> load_cascade_dir(const std::filesystem::path& dir);

/// Round-half-up of each coordinate scaled by s.
Rect scale_rect(const Rect& r, double s);

/// A cascade with every rect pre-scaled to one window size. Immutable; safe to
/// share between threads.
class ScaledCascade {
public:
    ScaledCascade(const CascadeModel& model, double scale);

    int window_w() const { return window_w_; }
    int window_h() const { return window_h_; }

    /// Verdict for the window whose top-left corner is (x, y). The window must
    /// lie inside the image the integral was built from.
    bool passes(const IntegralImage& ii, int x, int y) const;

private:
    struct ScaledRect {
        int x, y, w, h;
        double weight;
    };
    struct Stump {
        std::size_t first_rect, rect_count;
        double threshold, left_val, right_val;
    };
    struct StageRange {
        std::size_t first_stump, stump_count;
        double threshold;
    };

    int window_w_ = 0;
    int window_h_ = 0;
    double inv_area_ = 0;
    std::vector<ScaledRect> rects_;
    std::vector<Stump> stumps_;
    std::vector<StageRange> stages_;
};

/// Variance-normalized cascade verdict for one window. window.w/h must equal
/// round(base window * scale).
bool eval_window(const CascadeModel& model, const IntegralImage& ii, const Rect& window,
                 double scale);

/// Clusters similar rects (transitively) and averages each cluster of at
/// least max(1, min_neighbors) members. Output is canonically sorted.
std::vector<Detection> group_rects(std::span<const Rect> raw, int min_neighbors,
                                   double eps = 0.2);

/// Orders detections by descending area, then ascending (y, x, w, h).
void sort_detections(std::vector<Detection>& dets);

std::vector<Detection> detect_multiscale(const CascadeModel& model, const GrayImage& img,
                                         const DetectParams& params = {});

/// Runs the models in order; the first one with any detection wins and its
/// largest detection is returned. consulted, when given, receives the number
/// of models that were run.
std::optional<Rect> detect_face_sequence(std::span<const CascadeModel> models,
                                         const GrayImage& img, const DetectParams& params = {},
                                         std::size_t* consulted = nullptr);

}  // namespace fisherlens
