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
#include <filesystem>
#include <vector>

#include "fisherlens/dataset.hpp"
#include "fisherlens/emotion.hpp"
#include "fisherlens/image.hpp"

namespace fisherlens {

/// Seeded "blob" faces: class c is a dark background with one bright block in
/// cell c of a 3x3 grid, plus Gaussian pixel noise. Labels are the first
/// `classes` emotions in code order; samples cycle through the classes.
struct BlobSpec {
    int classes = 3;
    int per_class = 30;
    int width = 16;
    int height = 16;
    double noise_sigma = 10.0 / 255.0;  // in [0, 1] intensity units
    std::uint64_t seed = 42;
};

struct BlobSet {
    std::vector<GrayImage> faces;
    std::vector<EmotionLabel> labels;
};

BlobSet make_blobs(const BlobSpec& spec);

/// One noise-free class template, for reference.
GrayImage blob_template(int class_index, int width, int height);

/// Writes the blob faces as PGMs under root/<emotion>/ and returns a prepared
/// manifest pointing at them.
DatasetManifest write_blob_dataset(const std::filesystem::path& root, const BlobSpec& spec);

}  // namespace fisherlens
