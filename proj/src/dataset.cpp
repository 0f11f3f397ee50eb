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

#include "fisherlens/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <map>
#include <numbers>
#include <tuple>

#include <json.hpp>

#include "fisherlens/error.hpp"
#include "fisherlens/netpbm.hpp"

namespace fisherlens {

namespace fs = std::filesystem;

GlobPattern::GlobPattern(std::string pattern) : pattern_(std::move(pattern)) {
    if (pattern_.find('/') != std::string::npos || pattern_.find('\\') != std::string::npos) {
        throw ArgumentError("glob pattern '" + pattern_ +
                            "' contains a path separator; patterns match within one directory");
    }
}

bool glob_match(const GlobPattern& pattern, std::string_view name) {
    const std::string& p = pattern.str();
    std::size_t pi = 0;
    std::size_t ni = 0;
    std::size_t star = std::string::npos;  // position after the last '*'
    std::size_t resume = 0;                // name position that star currently absorbs up to
    while (ni < name.size()) {
        if (pi < p.size() && (p[pi] == '?' || (p[pi] != '*' && p[pi] == name[ni]))) {
            ++pi;
            ++ni;
        } else if (pi < p.size() && p[pi] == '*') {
            star = ++pi;
            resume = ni;
        } else if (star != std::string::npos) {
            pi = star;
            ni = ++resume;
        } else {
            return false;
        }
    }
    while (pi < p.size() && p[pi] == '*') ++pi;
    return pi == p.size();
}

std::vector<fs::path> list_matching(const fs::path& dir, const GlobPattern& p) {
    std::error_code ec;
    fs::directory_iterator it(dir, ec);
    if (ec) throw IoError("cannot read directory " + dir.string() + ": " + ec.message());
    std::vector<fs::path> out;
    for (const auto& entry : it) {
        const std::string name = entry.path().filename().string();
        if (glob_match(p, name)) out.push_back(dir / name);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------

std::uint64_t Rng::next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t randint(Rng& rng, std::int64_t m, std::int64_t n) {
    if (m > n) {
        throw ArgumentError("randint: empty range [" + std::to_string(m) + ", " +
                            std::to_string(n) + "]");
    }
    // Modulo bias is accepted; ranges used here are tiny relative to 2^64.
    const std::uint64_t span = static_cast<std::uint64_t>(n) - static_cast<std::uint64_t>(m) + 1;
    const std::uint64_t r = rng.next_u64();
    const std::uint64_t offset = span == 0 ? r : r % span;  // span == 0: the full 64-bit range
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(m) + offset);
}

void throw_empty_choice() { throw ArgumentError("choice: empty list"); }

// ---------------------------------------------------------------------------

void DatasetManifest::canonicalize() {
    std::sort(records.begin(), records.end(), [](const SampleRecord& a, const SampleRecord& b) {
        return std::tie(a.subject, a.session, a.image_path, a.label) <
               std::tie(b.subject, b.session, b.image_path, b.label);
    });
}

std::string save_manifest(const DatasetManifest& m) {
    nlohmann::ordered_json doc;
    doc["format"] = "fisherlens-manifest";
    doc["version"] = kManifestFormatVersion;
    doc["face_w"] = m.face_w;
    doc["face_h"] = m.face_h;
    auto& records = doc["records"] = nlohmann::ordered_json::array();
    for (const auto& r : m.records) {
        nlohmann::ordered_json rec;
        rec["image_path"] = r.image_path;
        rec["label"] = std::string(to_string(r.label));
        rec["subject"] = r.subject;
        rec["session"] = r.session;
        records.push_back(std::move(rec));
    }
    return doc.dump(2) + "\n";
}

DatasetManifest load_manifest(std::string_view document) {
    try {
        const auto doc = nlohmann::json::parse(document.begin(), document.end());
        if (doc.at("version").get<int>() != kManifestFormatVersion) {
            throw ParseError("manifest: unsupported version " + doc.at("version").dump());
        }
        DatasetManifest m;
        m.face_w = doc.at("face_w").get<int>();
        m.face_h = doc.at("face_h").get<int>();
        if (m.face_w <= 0 || m.face_h <= 0) throw ParseError("manifest: face size must be positive");
        for (const auto& rec : doc.at("records")) {
            SampleRecord r;
            r.image_path = rec.at("image_path").get<std::string>();
            r.label = parse_emotion(rec.at("label").is_string() ? rec.at("label").get<std::string>()
                                                                : rec.at("label").dump());
            r.subject = rec.value("subject", std::string());
            r.session = rec.value("session", std::string());
            if (r.image_path.empty()) throw ParseError("manifest: empty image_path");
            m.records.push_back(std::move(r));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("manifest: ") + e.what());
    } catch (const ArgumentError& e) {
        throw ParseError(std::string("manifest: ") + e.what());
    }
}

void write_manifest(const fs::path& path, const DatasetManifest& m) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write manifest " + path.string());
    out << save_manifest(m);
    if (!out) throw IoError("write failed: " + path.string());
}

DatasetManifest read_manifest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest " + path.string());
    const std::string doc((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return load_manifest(doc);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------

int parse_label_code(std::string_view text, const std::string& source) {
    const auto first = text.find_first_not_of(" \t\r\n");
    const auto last = text.find_last_not_of(" \t\r\n");
    if (first == std::string_view::npos) throw IngestError("empty label file: " + source);
    const std::string tok(text.substr(first, last - first + 1));
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || errno == ERANGE || !std::isfinite(v) ||
        std::abs(v - std::round(v)) > 1e-6 || v < 0 || v > 7) {
        throw IngestError("unparsable label file " + source + ": '" + tok + "'");
    }
    return static_cast<int>(std::lround(v));
}

DatasetManifest ingest_ck(const fs::path& images_root, const fs::path& labels_root) {
    std::error_code ec;
    if (!fs::is_directory(images_root, ec)) throw IoError("images directory not found: " + images_root.string());
    if (!fs::is_directory(labels_root, ec)) throw IoError("labels directory not found: " + labels_root.string());

    const GlobPattern any("*");
    const GlobPattern frames_pattern{std::string(kFramePattern)};
    const GlobPattern label_pattern{std::string(kLabelPattern)};

    DatasetManifest m;
    std::vector<std::string> bad;
    for (const auto& subject_dir : list_matching(images_root, any)) {
        if (!fs::is_directory(subject_dir, ec)) continue;
        const std::string subject = subject_dir.filename().string();
        for (const auto& session_dir : list_matching(subject_dir, any)) {
            if (!fs::is_directory(session_dir, ec)) continue;
            const std::string session = session_dir.filename().string();
            const fs::path label_dir = labels_root / subject / session;
            if (!fs::is_directory(label_dir, ec)) continue;
            std::vector<fs::path> label_files;
            for (auto& f : list_matching(label_dir, label_pattern)) {
                if (fs::is_regular_file(f, ec)) label_files.push_back(f);
            }
            if (label_files.empty()) continue;
            std::vector<fs::path> frames;
            for (auto& f : list_matching(session_dir, frames_pattern)) {
                if (fs::is_regular_file(f, ec)) frames.push_back(f);
            }
            if (frames.empty()) continue;

            std::ifstream in(label_files.front(), std::ios::binary);
            if (!in) throw IoError("cannot open label file " + label_files.front().string());
            const std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            int ck_code = 0;
            try {
                ck_code = parse_label_code(body, label_files.front().string());
            } catch (const IngestError&) {
                bad.push_back(label_files.front().string());
                continue;
            }
            m.records.push_back({frames.back().generic_string(), from_ck_code(ck_code), subject, session});
            if (frames.size() > 1) {
                m.records.push_back({frames.front().generic_string(), EmotionLabel::neutral, subject, session});
            }
        }
    }
    if (!bad.empty()) {
        std::string msg = "unparsable label file(s):";
        for (const auto& b : bad) msg += "\n  " + b;
        throw IngestError(msg);
    }
    if (m.records.empty()) {
        throw EmptyResultError("no labeled sessions found under " + images_root.string());
    }
    m.canonicalize();
    return m;
}

// ---------------------------------------------------------------------------

SplitResult split(const DatasetManifest& manifest, double fraction, Rng& rng) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw ArgumentError("split fraction must be in (0, 1), got " + std::to_string(fraction));
    }
    std::map<EmotionLabel, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < manifest.records.size(); ++i) {
        by_class[manifest.records[i].label].push_back(i);
    }
    SplitResult out;
    for (auto& [label, idx] : by_class) {
        if (idx.size() < 2) {
            throw SplitError("class " + std::string(to_string(label)) + " has " +
                             std::to_string(idx.size()) + " record(s); splitting needs at least 2");
        }
        for (std::size_t i = idx.size() - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(randint(rng, 0, static_cast<std::int64_t>(i)));
            std::swap(idx[i], idx[j]);
        }
        // The epsilon keeps products like 0.7 * 10 = 7.0000000000000009 from rounding up.
        auto n_train = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(idx.size()) - 1e-9));
        n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
        out.train_index.insert(out.train_index.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        out.test_index.insert(out.test_index.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    }
    std::sort(out.train_index.begin(), out.train_index.end());
    std::sort(out.test_index.begin(), out.test_index.end());
    for (auto* part : {&out.train, &out.test}) {
        part->face_w = manifest.face_w;
        part->face_h = manifest.face_h;
    }
    for (auto i : out.train_index) out.train.records.push_back(manifest.records[i]);
    for (auto i : out.test_index) out.test.records.push_back(manifest.records[i]);
    return out;
}

// ---------------------------------------------------------------------------

PrepareReport prepare_faces(const DatasetManifest& manifest, std::span<const CascadeModel> cascades,
                            const fs::path& out_root, const PrepareOptions& opts) {
    if (cascades.empty()) throw ArgumentError("prepare_faces: no cascades");
    if (opts.face_w < 1 || opts.face_h < 1) throw ArgumentError("prepare_faces: face size must be positive");

    PrepareReport report;
    report.prepared.face_w = opts.face_w;
    report.prepared.face_h = opts.face_h;
    for (const auto& rec : manifest.records) {
        GrayImage gray;
        try {
            gray = netpbm::read_gray(rec.image_path, opts.gray);
        } catch (const Error& e) {
            report.skipped.emplace_back(rec.image_path, e.what());
            continue;
        }
        const auto face = detect_face_sequence(cascades, gray, opts.detect);
        if (!face) {
            report.skipped.emplace_back(rec.image_path, "no face detected");
            continue;
        }
        const GrayImage normalized = resize_bilinear(crop(gray, *face), opts.face_w, opts.face_h);

        const std::string stem = rec.subject.empty() && rec.session.empty()
                                     ? fs::path(rec.image_path).stem().string()
                                     : rec.subject + "_" + rec.session;
        const fs::path dir = out_root / std::string(to_string(rec.label));
        const fs::path out = dir / (stem + ".pgm");
        try {
            fs::create_directories(dir);
            netpbm::write_pgm(out, normalized);
        } catch (const std::exception& e) {
            report.skipped.emplace_back(rec.image_path, e.what());
            continue;
        }
        report.prepared.records.push_back({out.generic_string(), rec.label, rec.subject, rec.session});
    }
    if (report.prepared.records.empty()) {
        throw EmptyResultError("prepare: no faces survived (" + std::to_string(report.skipped.size()) +
                               " record(s) skipped)");
    }
    report.prepared.canonicalize();
    return report;
}

std::vector<GrayImage> load_faces(const DatasetManifest& manifest) {
    std::vector<GrayImage> faces;
    faces.reserve(manifest.records.size());
    for (const auto& rec : manifest.records) {
        GrayImage img = netpbm::read_gray(rec.image_path);
        if (img.width() != manifest.face_w || img.height() != manifest.face_h) {
            throw ArgumentError(rec.image_path + " is " + std::to_string(img.width()) + "x" +
                                std::to_string(img.height()) + ", manifest expects " +
                                std::to_string(manifest.face_w) + "x" + std::to_string(manifest.face_h));
        }
        faces.push_back(std::move(img));
    }
    return faces;
}

}  // namespace fisherlens
