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

#include "fisherlens/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fisherlens/error.hpp"
#include "fisherlens/netpbm.hpp"

namespace fisherlens {

namespace {

constexpr double kBackground = 0.2;
constexpr double kBlock = 0.8;

double template_value(int class_index, int x, int y, int w, int h) {
    const int cx = class_index % 3;
    const int cy = class_index / 3;
    const bool inside = x * 3 / w == cx && y * 3 / h == cy;
    return inside ? kBlock : kBackground;
}

}  // namespace

GrayImage blob_template(int class_index, int width, int height) {
    GrayImage img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            img.at(x, y) = static_cast<std::uint8_t>(
                std::lround(255.0 * template_value(class_index, x, y, width, height)));
        }
    }
    return img;
}

BlobSet make_blobs(const BlobSpec& spec) {
    if (spec.classes < 1 || spec.classes > 8) throw ArgumentError("blobs: classes must be in [1, 8]");
    if (spec.per_class < 1 || spec.width < 3 || spec.height < 3) {
        throw ArgumentError("blobs: need per_class >= 1 and at least 3x3 pixels");
    }
    Rng rng(spec.seed);
    BlobSet set;
    const int total = spec.classes * spec.per_class;
    for (int i = 0; i < total; ++i) {
        const int c = i % spec.classes;
        GrayImage img(spec.width, spec.height);
        for (int y = 0; y < spec.height; ++y) {
            for (int x = 0; x < spec.width; ++x) {
                const double v = template_value(c, x, y, spec.width, spec.height) +
                                 spec.noise_sigma * rng.normal();
                img.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::floor(255.0 * v + 0.5), 0.0, 255.0));
            }
        }
        set.faces.push_back(std::move(img));
        set.labels.push_back(kAllEmotions[static_cast<std::size_t>(c)]);
    }
    return set;
}

DatasetManifest write_blob_dataset(const std::filesystem::path& root, const BlobSpec& spec) {
    const BlobSet set = make_blobs(spec);
    DatasetManifest m;
    m.face_w = spec.width;
    m.face_h = spec.height;
    for (std::size_t i = 0; i < set.faces.size(); ++i) {
        const auto dir = root / std::string(to_string(set.labels[i]));
        std::filesystem::create_directories(dir);
        char name[32];
        std::snprintf(name, sizeof name, "blob_%04zu.pgm", i);
        const auto path = dir / name;
        netpbm::write_pgm(path, set.faces[i]);
        char subject[32];
        std::snprintf(subject, sizeof subject, "B%04zu", i);
        m.records.push_back({path.generic_string(), set.labels[i], subject, "001"});
    }
    m.canonicalize();
    return m;
}

}  // namespace fisherlens
