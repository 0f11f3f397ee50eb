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
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fisherlens/cascade.hpp"
#include "fisherlens/emotion.hpp"
#include "fisherlens/image.hpp"

namespace fisherlens {

// ---------------------------------------------------------------------------
// Wildcard matching

/// A single-directory file name pattern: '*' matches any run of characters
/// (including none), '?' exactly one, everything else itself.
class GlobPattern {
public:
    /// Throws ArgumentError if the pattern contains a path separator.
    explicit GlobPattern(std::string pattern);

    const std::string& str() const { return pattern_; }

private:
    std::string pattern_;
};

/// Whole-name match of name against p.
bool glob_match(const GlobPattern& p, std::string_view name);

/// Entries of dir (files and directories, never their contents) whose names
/// match p, joined to dir and sorted. Throws IoError when dir is unreadable.
std::vector<std::filesystem::path> list_matching(const std::filesystem::path& dir,
                                                 const GlobPattern& p);

// ---------------------------------------------------------------------------
// Random numbers

/// SplitMix64 stream. Single owner; pass by reference.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal via Box-Muller.
    double normal();

private:
    std::uint64_t state_;
};

/// m + (next mod (n - m + 1)); both ends reachable. ArgumentError if m > n.
std::int64_t randint(Rng& rng, std::int64_t m, std::int64_t n);

[[noreturn]] void throw_empty_choice();

/// items[randint(rng, 0, size - 1)]; ArgumentError on an empty list.
template <typename T>
const T& choice(Rng& rng, std::span<const T> items);

// ---------------------------------------------------------------------------
// Manifests

struct SampleRecord {
    std::string image_path;
    EmotionLabel label = EmotionLabel::neutral;
    std::string subject;
    std::string session;

    friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct DatasetManifest {
    std::vector<SampleRecord> records;
    int face_w = 48;
    int face_h = 48;

    /// Sorts records by (subject, session, path, label).
    void canonicalize();
};

inline constexpr int kManifestFormatVersion = 1;

std::string save_manifest(const DatasetManifest& m);
/// Throws ParseError on malformed documents.
DatasetManifest load_manifest(std::string_view document);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& m);
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Frames per session are matched with this pattern (netpbm images).
inline constexpr std::string_view kFramePattern = "*.p?m";
inline constexpr std::string_view kLabelPattern = "*.txt";

/// Parses a CK+ label file body ("3", "  3.0000000e+00\n") into a code.
/// Throws IngestError naming source when it is not an integer in [0, 7].
int parse_label_code(std::string_view text, const std::string& source);

/// Walks images_root/<subject>/<session>/ frames and the parallel
/// labels_root/<subject>/<session>/*.txt label files. Each labeled session
/// yields its last frame with the mapped emotion and its first frame as
/// neutral. Unlabeled sessions are skipped.
DatasetManifest ingest_ck(const std::filesystem::path& images_root,
                          const std::filesystem::path& labels_root);

struct SplitResult {
    DatasetManifest train;
    DatasetManifest test;
    std::vector<std::size_t> train_index;  // positions in the input manifest, ascending
    std::vector<std::size_t> test_index;
};

/// Stratified split: each class is Fisher-Yates shuffled, ceil(fraction * count)
/// records go to train (at most count - 1). Outputs keep manifest order.
SplitResult split(const DatasetManifest& manifest, double fraction, Rng& rng);

struct PrepareOptions {
    int face_w = 48;
    int face_h = 48;
    GrayMethod gray = GrayMethod::luminosity;
    DetectParams detect;
};

struct PrepareReport {
    DatasetManifest prepared;
    std::vector<std::pair<std::string, std::string>> skipped;  // (image path, reason)
};

/// Loads, grays, detects, crops, resizes and writes each face to
/// out_root/<emotion>/<subject>_<session>.pgm. Records without a face (or
/// that fail to load) are reported in skipped. EmptyResultError if none survive.
PrepareReport prepare_faces(const DatasetManifest& manifest,
                            std::span<const CascadeModel> cascades,
                            const std::filesystem::path& out_root,
                            const PrepareOptions& opts = {});

/// Loads every record's image as a face of the manifest's size.
std::vector<GrayImage> load_faces(const DatasetManifest& manifest);

// ---------------------------------------------------------------------------

template <typename T>
const T& choice(Rng& rng, std::span<const T> items) {
    if (items.empty()) throw_empty_choice();
    return items[static_cast<std::size_t>(randint(rng, 0, static_cast<std::int64_t>(items.size()) - 1))];
}

}  // namespace fisherlens
