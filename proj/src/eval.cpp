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

#include "fisherlens/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fisherlens/error.hpp"
#include "fisherlens/fisherface.hpp"

namespace fisherlens {

ConfusionMatrix::ConfusionMatrix(std::vector<EmotionLabel> classes)
    : classes_(std::move(classes)), counts_(classes_.size() * classes_.size(), 0) {}

std::size_t ConfusionMatrix::index_of(EmotionLabel l) const {
    const auto it = std::find(classes_.begin(), classes_.end(), l);
    if (it == classes_.end()) {
        throw ArgumentError("label " + std::string(to_string(l)) + " is not in the confusion matrix");
    }
    return static_cast<std::size_t>(it - classes_.begin());
}

void ConfusionMatrix::add(EmotionLabel truth, EmotionLabel predicted, std::uint64_t n) {
    counts_[index_of(truth) * size() + index_of(predicted)] += n;
}

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
}

std::uint64_t ConfusionMatrix::correct() const {
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < size(); ++i) t += at(i, i);
    return t;
}

double ConfusionMatrix::accuracy() const {
    const auto t = total();
    return t == 0 ? 0.0 : static_cast<double>(correct()) / static_cast<double>(t);
}

double ConfusionMatrix::recall(std::size_t row) const {
    std::uint64_t t = 0;
    for (std::size_t c = 0; c < size(); ++c) t += at(row, c);
    return t == 0 ? 0.0 : static_cast<double>(at(row, row)) / static_cast<double>(t);
}

double ConfusionMatrix::precision(std::size_t col) const {
    std::uint64_t t = 0;
    for (std::size_t r = 0; r < size(); ++r) t += at(r, col);
    return t == 0 ? 0.0 : static_cast<double>(at(col, col)) / static_cast<double>(t);
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    if (classes_.empty() && counts_.empty()) {
        *this = other;
        return *this;
    }
    if (other.classes_ != classes_) throw ArgumentError("cannot pool confusion matrices over different classes");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    return *this;
}

FilteredSet filter_subset(const DatasetManifest& manifest, std::span<const GrayImage> faces,
                          std::span<const EmotionLabel> subset) {
    const std::set<EmotionLabel> keep(subset.begin(), subset.end());
    FilteredSet out;
    out.manifest.face_w = manifest.face_w;
    out.manifest.face_h = manifest.face_h;
    for (std::size_t i = 0; i < manifest.records.size(); ++i) {
        if (!keep.count(manifest.records[i].label)) continue;
        out.manifest.records.push_back(manifest.records[i]);
        out.faces.push_back(faces[i]);
    }
    return out;
}

namespace {

void check_subset(const TrialConfig& cfg) {
    if (!cfg.subset) return;
    const std::set<EmotionLabel> distinct(cfg.subset->begin(), cfg.subset->end());
    if (distinct.size() < 2) {
        throw ArgumentError("subset must name at least 2 distinct emotions, got " +
                            std::to_string(distinct.size()));
    }
}

TrialResult trial_on(const DatasetManifest& manifest, std::span<const GrayImage> faces,
                     const TrialConfig& cfg, std::uint64_t trial_index) {
    Rng rng(cfg.seed ^ trial_index);
    const SplitResult parts = split(manifest, cfg.fraction, rng);

    std::vector<GrayImage> train_faces;
    std::vector<EmotionLabel> train_labels;
    for (auto i : parts.train_index) {
        train_faces.push_back(faces[i]);
        train_labels.push_back(manifest.records[i].label);
    }
    TrainOptions opts;
    opts.pca_dims = cfg.pca_dims;
    const FisherModel model =
        train_fisherface(make_samples(train_faces, train_labels), manifest.face_w, manifest.face_h, opts);

    TrialResult result{0.0, ConfusionMatrix(distinct_labels(train_labels))};
    for (auto i : parts.test_index) {
        const Prediction p = predict(model, faces[i]);
        result.matrix.add(manifest.records[i].label, p.label);
    }
    result.accuracy = result.matrix.accuracy();
    return result;
}

}  // namespace

TrialResult run_trial(const DatasetManifest& manifest, std::span<const GrayImage> faces,
                      const TrialConfig& cfg, std::uint64_t trial_index) {
    if (faces.size() != manifest.records.size()) {
        throw ArgumentError("run_trial: " + std::to_string(faces.size()) + " faces for " +
                            std::to_string(manifest.records.size()) + " records");
    }
    check_subset(cfg);
    if (cfg.subset) {
        const FilteredSet filtered = filter_subset(manifest, faces, *cfg.subset);
        return trial_on(filtered.manifest, filtered.faces, cfg, trial_index);
    }
    return trial_on(manifest, faces, cfg, trial_index);
}

TrialReport run_repeated(const DatasetManifest& manifest, std::span<const GrayImage> faces,
                         const TrialConfig& cfg) {
    if (cfg.trials < 1) throw ArgumentError("trials must be >= 1");
    if (faces.size() != manifest.records.size()) {
        throw ArgumentError("run_repeated: face count does not match the manifest");
    }
    check_subset(cfg);
    FilteredSet filtered;
    if (cfg.subset) filtered = filter_subset(manifest, faces, *cfg.subset);
    const DatasetManifest& m = cfg.subset ? filtered.manifest : manifest;
    const std::span<const GrayImage> f = cfg.subset ? std::span<const GrayImage>(filtered.faces) : faces;

    const int n = cfg.trials;
    std::vector<TrialResult> results(static_cast<std::size_t>(n));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 1)
    for (int t = 0; t < n; ++t) {
        try {
            results[static_cast<std::size_t>(t)] = trial_on(m, f, cfg, static_cast<std::uint64_t>(t));
        } catch (...) {
            errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    TrialReport report;
    report.config = cfg;
    for (const auto& r : results) {
        report.per_trial.push_back(r.accuracy);
        report.pooled += r.matrix;
    }
    double sum = 0;
    for (double a : report.per_trial) sum += a;
    report.mean = sum / n;
    if (n > 1) {
        double ss = 0;
        for (double a : report.per_trial) ss += (a - report.mean) * (a - report.mean);
        report.std = std::sqrt(ss / (n - 1));
    }
    return report;
}

std::vector<Confusion> top_confusions(const ConfusionMatrix& cm, std::size_t k) {
    if (k < 1) throw ArgumentError("top_confusions: k must be >= 1");
    std::vector<Confusion> cells;
    for (std::size_t r = 0; r < cm.size(); ++r) {
        for (std::size_t c = 0; c < cm.size(); ++c) {
            if (r != c && cm.at(r, c) > 0) cells.push_back({cm.classes()[r], cm.classes()[c], cm.at(r, c)});
        }
    }
    // Cells were collected in (row, col) order, so a stable sort keeps that tie order.
    std::stable_sort(cells.begin(), cells.end(),
                     [](const Confusion& a, const Confusion& b) { return a.count > b.count; });
    if (cells.size() > k) cells.resize(k);
    return cells;
}

namespace {

double round4(double v) { return std::round(v * 1e4) / 1e4; }

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", round4(v));
    return buf;
}

std::string pad(std::string s, std::size_t width, bool left = false) {
    if (s.size() >= width) return s;
    const std::string fill(width - s.size(), ' ');
    return left ? s + fill : fill + s;
}

}  // namespace

RenderedReport render_report(const TrialReport& report) {
    const ConfusionMatrix& cm = report.pooled;
    const auto& cfg = report.config;
    std::string subset = "all";
    if (cfg.subset) {
        subset.clear();
        for (std::size_t i = 0; i < cfg.subset->size(); ++i) {
            if (i) subset += ',';
            subset += to_string((*cfg.subset)[i]);
        }
    }
    const auto confusions = top_confusions(cm, 5);

    std::ostringstream t;
    t << "trials: " << cfg.trials << "  seed: " << cfg.seed << "  split: " << fixed4(cfg.fraction)
      << "  subset: " << subset << "\n";
    t << "accuracy: " << fixed4(report.mean) << " +/- " << fixed4(report.std)
      << " (mean +/- sample std over trials)\n";
    t << "per-trial:";
    for (double a : report.per_trial) t << ' ' << fixed4(a);
    t << "\npooled: " << cm.correct() << "/" << cm.total() << " correct, accuracy "
      << fixed4(cm.accuracy()) << "\n\n";

    t << pad("class", 10, true) << pad("precision", 11) << pad("recall", 9) << pad("support", 9) << "\n";
    for (std::size_t i = 0; i < cm.size(); ++i) {
        std::uint64_t support = 0;
        for (std::size_t c = 0; c < cm.size(); ++c) support += cm.at(i, c);
        t << pad(std::string(to_string(cm.classes()[i])), 10, true) << pad(fixed4(cm.precision(i)), 11)
          << pad(fixed4(cm.recall(i)), 9) << pad(std::to_string(support), 9) << "\n";
    }

    t << "\nconfusion (rows = true, columns = predicted)\n" << pad("", 10);
    for (auto l : cm.classes()) t << pad(std::string(to_string(l)).substr(0, 8), 9);
    t << "\n";
    for (std::size_t r = 0; r < cm.size(); ++r) {
        t << pad(std::string(to_string(cm.classes()[r])), 10, true);
        for (std::size_t c = 0; c < cm.size(); ++c) t << pad(std::to_string(cm.at(r, c)), 9);
        t << "\n";
    }
    t << "\ntop confusions:\n";
    if (confusions.empty()) t << "  (none)\n";
    for (const auto& c : confusions) {
        t << "  " << to_string(c.truth) << " -> " << to_string(c.predicted) << ": " << c.count << "\n";
    }

    nlohmann::ordered_json doc;
    doc["format"] = "fisherlens-report";
    doc["version"] = 1;
    auto& jc = doc["config"];
    jc["seed"] = cfg.seed;
    jc["fraction"] = round4(cfg.fraction);
    jc["trials"] = cfg.trials;
    if (cfg.subset) {
        auto& js = jc["subset"] = nlohmann::ordered_json::array();
        for (auto l : *cfg.subset) js.push_back(std::string(to_string(l)));
    } else {
        jc["subset"] = nullptr;
    }
    if (cfg.pca_dims) jc["pca_dims"] = *cfg.pca_dims;
    else jc["pca_dims"] = nullptr;

    auto& classes = doc["classes"] = nlohmann::ordered_json::array();
    for (auto l : cm.classes()) classes.push_back(std::string(to_string(l)));
    auto& per_trial = doc["per_trial"] = nlohmann::ordered_json::array();
    for (double a : report.per_trial) per_trial.push_back(round4(a));
    doc["mean"] = round4(report.mean);
    doc["std"] = round4(report.std);
    auto& pooled = doc["pooled"];
    auto& counts = pooled["counts"] = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < cm.size(); ++r) {
        auto row = nlohmann::ordered_json::array();
        for (std::size_t c = 0; c < cm.size(); ++c) row.push_back(cm.at(r, c));
        counts.push_back(std::move(row));
    }
    pooled["total"] = cm.total();
    pooled["correct"] = cm.correct();
    pooled["accuracy"] = round4(cm.accuracy());
    auto& per_class = doc["per_class"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < cm.size(); ++i) {
        nlohmann::ordered_json pc;
        pc["label"] = std::string(to_string(cm.classes()[i]));
        pc["precision"] = round4(cm.precision(i));
        pc["recall"] = round4(cm.recall(i));
        per_class.push_back(std::move(pc));
    }
    auto& top = doc["top_confusions"] = nlohmann::ordered_json::array();
    for (const auto& c : confusions) {
        nlohmann::ordered_json e;
        e["true"] = std::string(to_string(c.truth));
        e["predicted"] = std::string(to_string(c.predicted));
        e["count"] = c.count;
        top.push_back(std::move(e));
    }
    return {t.str(), doc.dump(2) + "\n"};
}

std::vector<EmotionLabel> parse_subset(const std::string& text) {
    std::vector<EmotionLabel> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) throw ArgumentError("empty entry in emotion subset '" + text + "'");
        out.push_back(parse_emotion(item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace fisherlens
