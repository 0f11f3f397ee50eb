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
#include <array>
#include <set>

#include "fisherlens/cascade.hpp"
#include "fisherlens/dataset.hpp"
#include "fisherlens/error.hpp"
#include "fisherlens/netpbm.hpp"
#include "support.hpp"

using namespace fisherlens;
namespace fs = std::filesystem;

namespace {

bool oracle_match(std::string_view p, std::string_view s) {
    if (p.empty()) return s.empty();
    if (p[0] == '*') {
        for (std::size_t i = 0; i <= s.size(); ++i) {
            if (oracle_match(p.substr(1), s.substr(i))) return true;
        }
        return false;
    }
    if (s.empty()) return false;
    if (p[0] == '?' || p[0] == s[0]) return oracle_match(p.substr(1), s.substr(1));
    return false;
}

void all_strings(std::string_view alphabet, std::size_t max_len, std::vector<std::string>& out) {
    out.assign(1, "");
    std::size_t begin = 0;
    for (std::size_t len = 1; len <= max_len; ++len) {
        const std::size_t end = out.size();
        for (std::size_t i = begin; i < end; ++i) {
            for (char c : alphabet) out.push_back(out[i] + c);
        }
        begin = end;
    }
}

fs::path ck_root() { return testing::fixtures() / "ck_mini"; }

}  // namespace

TEST_CASE("glob examples over the direc listing") {
    const std::vector<std::string> names{"filename1", "filename2", "filename3", "filename4", "filename5", "files"};
    const GlobPattern star("file*");
    const GlobPattern q("filename?");
    for (const auto& n : names) {
        CHECK(glob_match(star, n));
        CHECK(glob_match(q, n) == (n != "files"));
    }
    CHECK(glob_match(GlobPattern("*"), ""));
    CHECK_FALSE(glob_match(GlobPattern("?"), ""));
    CHECK_FALSE(glob_match(GlobPattern("file"), "files"));
    CHECK_THROWS_AS(GlobPattern("sub/file*"), ArgumentError);
    CHECK_THROWS_AS(GlobPattern("sub\\file*"), ArgumentError);
}

TEST_CASE("glob agrees with a recursive matcher on every small case") {
    std::vector<std::string> names;
    std::vector<std::string> patterns;
    all_strings("ab1.", 6, names);
    all_strings("ab*?", 4, patterns);
    REQUIRE(names.size() == 5461);
    REQUIRE(patterns.size() == 341);
    std::size_t matches = 0;
    for (const auto& p : patterns) {
        const GlobPattern gp(p);
        for (const auto& n : names) {
            const bool want = oracle_match(p, n);
            if (glob_match(gp, n) != want) {
                FAIL_CHECK("pattern '" << p << "' name '" << n << "'");
            }
            matches += want ? 1 : 0;
        }
    }
    CHECK(matches > 0);
}

TEST_CASE("list_matching on the direc fixture") {
    const fs::path dir = testing::fixtures() / "direc";
    const auto got = list_matching(dir, GlobPattern("file*"));
    std::vector<fs::path> want;
    for (const char* n : {"filename1", "filename2", "filename3", "filename4", "filename5", "files"}) want.push_back(dir / n);
    CHECK(got == want);

    const auto q = list_matching(dir, GlobPattern("filename?"));
    CHECK(q.size() == 5);
    CHECK(list_matching(dir, GlobPattern("zzz*")).empty());
    // The nested filename9 is never reached.
    for (const auto& p : list_matching(dir, GlobPattern("*"))) CHECK(p.filename() != "filename9");

    testing::TempDir empty("glob");
    CHECK(list_matching(empty.path(), GlobPattern("*")).empty());
    CHECK_THROWS_AS(list_matching(empty / "missing", GlobPattern("*")), IoError);
}

TEST_CASE("SplitMix64 reference stream") {
    Rng zero(0);
    CHECK(zero.next_u64() == 0xE220A8397B1DCDAFull);
    CHECK(zero.next_u64() == 0x6E789E6AA1B965F4ull);
    CHECK(zero.next_u64() == 0x06C45D188009454Full);
    CHECK(zero.next_u64() == 0xF88BB8A8724C81ECull);
    CHECK(Rng(42).next_u64() == 0xBDD732262FEB6E95ull);

    Rng u(3);
    for (int i = 0; i < 1000; ++i) {
        const double v = u.uniform();
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
    }
}

TEST_CASE("normal draws have roughly unit moments") {
    Rng rng(77);
    double s = 0;
    double s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double v = rng.normal();
        s += v;
        s2 += v * v;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("randint") {
    Rng rng(1);
    CHECK(randint(rng, 3, 3) == 3);
    std::array<int, 10> seen{};
    for (int i = 0; i < 10000; ++i) {
        const auto v = randint(rng, 0, 9);
        REQUIRE(v >= 0);
        REQUIRE(v <= 9);
        ++seen[static_cast<std::size_t>(v)];
    }
    for (int c : seen) CHECK(c > 0);
    for (int i = 0; i < 1000; ++i) {
        const auto v = randint(rng, -5, 5);
        REQUIRE(v >= -5);
        REQUIRE(v <= 5);
    }
    CHECK_THROWS_AS(randint(rng, 4, 3), ArgumentError);

    // Matches the stated formula.
    Rng a(9);
    Rng b(9);
    for (int i = 0; i < 100; ++i) REQUIRE(randint(a, 10, 16) == 10 + static_cast<std::int64_t>(b.next_u64() % 7));
}

TEST_CASE("choice") {
    Rng rng(2);
    const std::vector<std::string> one{"dog"};
    CHECK(choice<std::string>(rng, one) == "dog");

    const std::vector<std::string> animals{"dog", "cat", "mouse", "lion"};
    Rng r1(5);
    Rng r2(5);
    std::set<std::string> hit;
    for (int i = 0; i < 100; ++i) {
        const auto& x = choice<std::string>(r1, animals);
        REQUIRE(x == choice<std::string>(r2, animals));
        REQUIRE(std::find(animals.begin(), animals.end(), x) != animals.end());
        hit.insert(x);
    }
    CHECK(hit.size() == 4);
    CHECK_THROWS_AS(choice<std::string>(rng, std::vector<std::string>{}), ArgumentError);
}

TEST_CASE("label code parsing") {
    CHECK(parse_label_code("3", "x") == 3);
    CHECK(parse_label_code("   7.0000000e+00\n", "x") == 7);
    CHECK(parse_label_code("0", "x") == 0);
    CHECK_THROWS_AS(parse_label_code("8", "x"), IngestError);
    CHECK_THROWS_AS(parse_label_code("2.5", "x"), IngestError);
    CHECK_THROWS_AS(parse_label_code("happy", "x"), IngestError);
    CHECK_THROWS_AS(parse_label_code("", "x"), IngestError);
    CHECK_THROWS_AS(parse_label_code("1 2", "x"), IngestError);
}

TEST_CASE("ingest the miniature CK tree") {
    const auto m = ingest_ck(ck_root() / "images", ck_root() / "labels");
    REQUIRE(m.records.size() == 4);
    CHECK(m.records[0].subject == "S005");
    CHECK(m.records[0].label == EmotionLabel::neutral);
    CHECK(fs::path(m.records[0].image_path).filename() == "S005_001_00000001.pgm");
    CHECK(m.records[1].label == EmotionLabel::disgust);
    CHECK(fs::path(m.records[1].image_path).filename() == "S005_001_00000003.pgm");
    CHECK(m.records[2].subject == "S010");
    CHECK(m.records[2].label == EmotionLabel::neutral);
    CHECK(m.records[3].label == EmotionLabel::surprise);
    CHECK(fs::path(m.records[3].image_path).filename() == "S010_002_00000004.pgm");
    for (const auto& r : m.records) CHECK(r.session != "003");
}

TEST_CASE("ingest is independent of creation order and rejects bad labels") {
    testing::TempDir dir("ingest");
    // Recreate the tree with sessions and frames written in reverse.
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(ck_root())) {
        if (e.is_regular_file()) files.push_back(fs::relative(e.path(), ck_root()));
    }
    std::sort(files.rbegin(), files.rend());
    for (const auto& f : files) testing::write_text(dir / f.string(), testing::read_text(ck_root() / f));

    const auto a = ingest_ck(ck_root() / "images", ck_root() / "labels");
    const auto b = ingest_ck(dir / "images", dir / "labels");
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(fs::path(a.records[i].image_path).filename() == fs::path(b.records[i].image_path).filename());
        CHECK(a.records[i].label == b.records[i].label);
        CHECK(a.records[i].subject == b.records[i].subject);
    }

    testing::write_text(dir / "labels/S005/001/S005_001_00000003_emotion.txt", "nine\n");
    try {
        ingest_ck(dir / "images", dir / "labels");
        FAIL("expected IngestError");
    } catch (const IngestError& e) {
        CHECK(std::string(e.what()).find("S005_001_00000003_emotion.txt") != std::string::npos);
    }

    testing::TempDir bare("ingest_bare");
    fs::create_directories(bare / "images/S1/001");
    fs::create_directories(bare / "labels");
    testing::write_text(bare / "images/S1/001/f1.pgm", "P5 1 1 255\n\x01");
    CHECK_THROWS_AS(ingest_ck(bare / "images", bare / "labels"), EmptyResultError);
    CHECK_THROWS_AS(ingest_ck(bare / "nope", bare / "labels"), IoError);
}

TEST_CASE("manifest round trip") {
    DatasetManifest m = ingest_ck(ck_root() / "images", ck_root() / "labels");
    m.face_w = 32;
    const std::string doc = save_manifest(m);
    const DatasetManifest back = load_manifest(doc);
    CHECK(back.records == m.records);
    CHECK(back.face_w == 32);
    CHECK(back.face_h == 48);
    CHECK(save_manifest(back) == doc);
    CHECK_THROWS_AS(load_manifest("{"), ParseError);
    CHECK_THROWS_AS(load_manifest("[]"), ParseError);
}

namespace {

DatasetManifest synthetic_manifest(int per_class, std::initializer_list<EmotionLabel> classes) {
    DatasetManifest m;
    int i = 0;
    for (EmotionLabel c : classes) {
        for (int k = 0; k < per_class; ++k, ++i) {
            m.records.push_back({"img" + std::to_string(i) + ".pgm", c, "S" + std::to_string(i), "001"});
        }
    }
    m.canonicalize();
    return m;
}

}  // namespace

TEST_CASE("stratified split") {
    const auto m = synthetic_manifest(10, {EmotionLabel::happy, EmotionLabel::sad, EmotionLabel::fear});
    Rng rng(42);
    const auto s = split(m, 0.8, rng);
    for (EmotionLabel c : {EmotionLabel::happy, EmotionLabel::sad, EmotionLabel::fear}) {
        auto count = [c](const DatasetManifest& d) {
            return std::count_if(d.records.begin(), d.records.end(), [c](const SampleRecord& r) { return r.label == c; });
        };
        CHECK(count(s.train) == 8);
        CHECK(count(s.test) == 2);
    }
    CHECK(std::is_sorted(s.train_index.begin(), s.train_index.end()));
    CHECK(std::is_sorted(s.test_index.begin(), s.test_index.end()));
    std::set<std::size_t> all(s.train_index.begin(), s.train_index.end());
    all.insert(s.test_index.begin(), s.test_index.end());
    CHECK(all.size() == m.records.size());
    for (std::size_t i = 0; i < s.train_index.size(); ++i) CHECK(s.train.records[i] == m.records[s.train_index[i]]);

    Rng again(42);
    CHECK(split(m, 0.8, again).train_index == s.train_index);
    Rng other(43);
    CHECK(split(m, 0.8, other).train_index != s.train_index);

    const auto pair = synthetic_manifest(2, {EmotionLabel::anger, EmotionLabel::contempt});
    Rng r(1);
    const auto p = split(pair, 0.99, r);
    CHECK(p.train.records.size() == 2);
    CHECK(p.test.records.size() == 2);

    // 0.7 * 10 is 7.000000000000001 in floating point; still 7.
    Rng r7(1);
    CHECK(split(synthetic_manifest(10, {EmotionLabel::sad, EmotionLabel::fear}), 0.7, r7).train.records.size() == 14);
}

TEST_CASE("split partitions random manifests and rejects bad input") {
    Rng rng(100);
    for (int t = 0; t < 100; ++t) {
        DatasetManifest m;
        const int n = static_cast<int>(randint(rng, 8, 60));
        for (int i = 0; i < n; ++i) {
            m.records.push_back({"p" + std::to_string(i), kAllEmotions[static_cast<std::size_t>(i % 4)], "S", std::to_string(i)});
        }
        const double f = 0.05 + 0.9 * rng.uniform();
        const auto s = split(m, f, rng);
        REQUIRE(s.train.records.size() + s.test.records.size() == m.records.size());
        std::vector<std::size_t> all = s.train_index;
        all.insert(all.end(), s.test_index.begin(), s.test_index.end());
        std::sort(all.begin(), all.end());
        REQUIRE(std::adjacent_find(all.begin(), all.end()) == all.end());
        for (std::size_t c = 0; c < 4; ++c) {
            REQUIRE(std::any_of(s.test.records.begin(), s.test.records.end(),
                                [&](const SampleRecord& r) { return r.label == kAllEmotions[c]; }));
            REQUIRE(std::any_of(s.train.records.begin(), s.train.records.end(),
                                [&](const SampleRecord& r) { return r.label == kAllEmotions[c]; }));
        }
    }
    Rng r(1);
    const auto m = synthetic_manifest(3, {EmotionLabel::happy, EmotionLabel::sad});
    CHECK_THROWS_AS(split(m, 0.0, r), ArgumentError);
    CHECK_THROWS_AS(split(m, 1.0, r), ArgumentError);
    auto lonely = m;
    lonely.records.push_back({"x", EmotionLabel::fear, "Z", "1"});
    try {
        split(lonely, 0.8, r);
        FAIL("expected SplitError");
    } catch (const SplitError& e) {
        CHECK(std::string(e.what()).find("fear") != std::string::npos);
    }
}

TEST_CASE("prepare_faces sorts faces by emotion and drops blanks") {
    testing::TempDir dir("prepare");
    netpbm::write_pgm(dir / "blank.pgm", GrayImage(200, 200, 128));
    const fs::path portraits = testing::fixtures() / "portraits";
    DatasetManifest m;
    m.face_w = 32;
    m.face_h = 32;
    m.records = {
        {(portraits / "hopper.pgm").string(), EmotionLabel::happy, "S1", "001"},
        {(portraits / "lfw0.pgm").string(), EmotionLabel::sad, "S2", "001"},
        {(dir / "blank.pgm").string(), EmotionLabel::sad, "S3", "001"},
        {(dir / "missing.pgm").string(), EmotionLabel::fear, "S4", "001"},
    };
    const auto cascades = load_cascade_dir(testing::cascades_dir());
    PrepareOptions opts;
    opts.face_w = 32;
    opts.face_h = 32;
    const auto out = dir / "faces";
    const auto report = prepare_faces(m, cascades, out, opts);
    REQUIRE(report.prepared.records.size() == 2);
    CHECK(report.skipped.size() == 2);
    CHECK(report.prepared.face_w == 32);
    CHECK(fs::exists(out / "happy" / "S1_001.pgm"));
    CHECK(fs::exists(out / "sad" / "S2_001.pgm"));
    CHECK_FALSE(fs::exists(out / "fear"));
    std::set<std::string> subdirs;
    for (const auto& e : fs::directory_iterator(out)) subdirs.insert(e.path().filename().string());
    CHECK(subdirs == std::set<std::string>{"happy", "sad"});

    const auto face = netpbm::read_gray(out / "happy" / "S1_001.pgm");
    CHECK(face.width() == 32);
    CHECK(face.height() == 32);
    const auto loaded = load_faces(report.prepared);
    CHECK(loaded.size() == 2);

    const std::string first = testing::read_text(out / "happy" / "S1_001.pgm");
    prepare_faces(m, cascades, out, opts);
    CHECK(testing::read_text(out / "happy" / "S1_001.pgm") == first);

    DatasetManifest only_blank;
    only_blank.records = {m.records[2]};
    CHECK_THROWS_AS(prepare_faces(only_blank, cascades, dir / "none", opts), EmptyResultError);
}
