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

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "fisherlens/error.hpp"
#include "fisherlens/eval.hpp"
#include "fisherlens/synthetic.hpp"

using namespace fisherlens;

namespace {

struct Blobs {
    DatasetManifest manifest;
    std::vector<GrayImage> faces;
};

// In-memory blob dataset; manifest paths are placeholders since faces are passed directly.
Blobs blobs(int classes = 3, int per_class = 30, std::uint64_t seed = 42) {
    BlobSpec spec;
    spec.classes = classes;
    spec.per_class = per_class;
    spec.seed = seed;
    const BlobSet set = make_blobs(spec);
    Blobs b;
    b.manifest.face_w = 16;
    b.manifest.face_h = 16;
    for (std::size_t i = 0; i < set.faces.size(); ++i) {
        b.manifest.records.push_back({"blob" + std::to_string(i), set.labels[i], "B" + std::to_string(i), "001"});
    }
    b.faces = set.faces;
    return b;
}

}  // namespace

TEST_CASE("single trial on the blob dataset") {
    const Blobs b = blobs();
    TrialConfig cfg;
    const TrialResult r = run_trial(b.manifest, b.faces, cfg, 0);
    CHECK(r.accuracy >= 0.95);
    CHECK(r.matrix.total() == 18);  // 6 held out per class
    CHECK(r.accuracy == doctest::Approx(static_cast<double>(r.matrix.correct()) / 18.0));
    CHECK(run_trial(b.manifest, b.faces, cfg, 0).matrix == r.matrix);
}

TEST_CASE("subset filtering") {
    const Blobs b = blobs(4, 10);
    TrialConfig cfg;
    cfg.subset = std::vector<EmotionLabel>{EmotionLabel::neutral};
    CHECK_THROWS_AS(run_trial(b.manifest, b.faces, cfg, 0), ArgumentError);

    const std::vector<EmotionLabel> keep{EmotionLabel::happy, EmotionLabel::disgust};
    const auto f = filter_subset(b.manifest, b.faces, keep);
    CHECK(f.manifest.records.size() == 20);
    CHECK(f.faces.size() == 20);
    // Order is preserved and the happy records are unchanged by dropping others.
    const auto happy_only = filter_subset(b.manifest, b.faces, std::vector<EmotionLabel>{EmotionLabel::happy});
    std::vector<SampleRecord> happy_from_pair;
    for (const auto& r : f.manifest.records) {
        if (r.label == EmotionLabel::happy) happy_from_pair.push_back(r);
    }
    CHECK(happy_from_pair == happy_only.manifest.records);

    cfg.subset = keep;
    const auto r = run_trial(b.manifest, b.faces, cfg, 3);
    CHECK(r.matrix.classes() == keep);
}

TEST_CASE("repeated trials") {
    const Blobs b = blobs();
    TrialConfig cfg;
    cfg.trials = 10;
    const TrialReport rep = run_repeated(b.manifest, b.faces, cfg);
    REQUIRE(rep.per_trial.size() == 10);
    CHECK(rep.mean >= 0.95);
    CHECK(rep.std <= 0.05);
    CHECK(rep.pooled.total() == 10u * 18u);
    const auto [lo, hi] = std::minmax_element(rep.per_trial.begin(), rep.per_trial.end());
    CHECK(rep.mean >= *lo);
    CHECK(rep.mean <= *hi);

    for (std::uint64_t t = 0; t < 10; ++t) {
        CHECK(rep.per_trial[t] == run_trial(b.manifest, b.faces, cfg, t).accuracy);
    }

    ConfusionMatrix first(rep.pooled.classes());
    ConfusionMatrix second(rep.pooled.classes());
    for (std::uint64_t t = 0; t < 5; ++t) first += run_trial(b.manifest, b.faces, cfg, t).matrix;
    for (std::uint64_t t = 5; t < 10; ++t) second += run_trial(b.manifest, b.faces, cfg, t).matrix;
    first += second;
    CHECK(first == rep.pooled);

    TrialConfig one = cfg;
    one.trials = 1;
    const TrialReport single = run_repeated(b.manifest, b.faces, one);
    CHECK(single.mean == single.per_trial[0]);
    CHECK(single.std == 0.0);

    one.trials = 0;
    CHECK_THROWS_AS(run_repeated(b.manifest, b.faces, one), ArgumentError);
}

TEST_CASE("confusion matrix arithmetic") {
    ConfusionMatrix cm({EmotionLabel::happy, EmotionLabel::disgust, EmotionLabel::sad});
    CHECK(cm.accuracy() == 0.0);
    cm.add(EmotionLabel::happy, EmotionLabel::happy, 4);
    cm.add(EmotionLabel::disgust, EmotionLabel::sad, 5);
    cm.add(EmotionLabel::disgust, EmotionLabel::disgust, 1);
    cm.add(EmotionLabel::sad, EmotionLabel::sad, 2);
    CHECK(cm.total() == 12);
    CHECK(cm.correct() == 7);
    CHECK(cm.accuracy() == doctest::Approx(7.0 / 12.0));
    CHECK(cm.recall(1) == doctest::Approx(1.0 / 6.0));
    CHECK(cm.precision(2) == doctest::Approx(2.0 / 7.0));
    for (std::size_t r = 0; r < 3; ++r) {
        double row = 0;
        for (std::size_t c = 0; c < 3; ++c) row += static_cast<double>(cm.at(r, c)) / 
            static_cast<double>(cm.at(r, 0) + cm.at(r, 1) + cm.at(r, 2));
        CHECK(row == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(cm.add(EmotionLabel::fear, EmotionLabel::sad), ArgumentError);
    ConfusionMatrix other({EmotionLabel::happy});
    CHECK_THROWS_AS(cm += other, ArgumentError);
}

TEST_CASE("top_confusions") {
    ConfusionMatrix diag({EmotionLabel::happy, EmotionLabel::sad});
    diag.add(EmotionLabel::happy, EmotionLabel::happy, 3);
    diag.add(EmotionLabel::sad, EmotionLabel::sad, 3);
    CHECK(top_confusions(diag, 3).empty());

    ConfusionMatrix cm({EmotionLabel::anger, EmotionLabel::disgust, EmotionLabel::sad});
    cm.add(EmotionLabel::disgust, EmotionLabel::sad, 5);
    auto top = top_confusions(cm, 1);
    REQUIRE(top.size() == 1);
    CHECK(top[0].truth == EmotionLabel::disgust);
    CHECK(top[0].predicted == EmotionLabel::sad);
    CHECK(top[0].count == 5);

    cm.add(EmotionLabel::anger, EmotionLabel::sad, 2);
    cm.add(EmotionLabel::sad, EmotionLabel::anger, 2);
    top = top_confusions(cm, 10);
    REQUIRE(top.size() == 3);
    CHECK(top[0].count == 5);
    CHECK(top[1].truth == EmotionLabel::anger);
    CHECK(top[2].truth == EmotionLabel::sad);
}

TEST_CASE("rendered reports") {
    const Blobs b = blobs();
    TrialConfig cfg;
    cfg.trials = 3;
    cfg.subset = std::vector<EmotionLabel>{EmotionLabel::neutral, EmotionLabel::happy, EmotionLabel::anger};
    const TrialReport rep = run_repeated(b.manifest, b.faces, cfg);
    const RenderedReport a = render_report(rep);
    const RenderedReport again = render_report(rep);
    CHECK(a.text == again.text);
    CHECK(a.json == again.json);

    const auto doc = nlohmann::json::parse(a.json);
    CHECK(doc.at("format") == "fisherlens-report");
    CHECK(doc.at("per_trial").size() == 3);
    // Recompute accuracy from the pooled matrix in the document.
    const auto& m = doc.at("pooled").at("counts");
    std::uint64_t total = 0;
    std::uint64_t trace = 0;
    for (std::size_t r = 0; r < m.size(); ++r) {
        for (std::size_t c = 0; c < m[r].size(); ++c) {
            total += m[r][c].get<std::uint64_t>();
            if (r == c) trace += m[r][c].get<std::uint64_t>();
        }
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", static_cast<double>(trace) / static_cast<double>(total));
    CHECK(a.text.find(buf) != std::string::npos);
    std::snprintf(buf, sizeof buf, "%.4f", rep.mean);
    CHECK(a.text.find(buf) != std::string::npos);
    CHECK(doc.at("mean").get<double>() == doctest::Approx(rep.mean).epsilon(1e-4));
}

TEST_CASE("parse_subset") {
    CHECK(parse_subset("happy,anger") == std::vector<EmotionLabel>{EmotionLabel::happy, EmotionLabel::anger});
    CHECK(parse_subset("1, 2") == std::vector<EmotionLabel>{EmotionLabel::happy, EmotionLabel::anger});
    CHECK_THROWS_AS(parse_subset("happy,joy"), ArgumentError);
    CHECK_THROWS_AS(parse_subset(""), ArgumentError);
}
