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

#include "fisherlens/cascade.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <tuple>

#include "fisherlens/error.hpp"
#include "fisherlens/kernels.hpp"
#include "xml.hpp"

namespace fisherlens {

namespace {

std::string where(const xml::Element& el) { return "line " + std::to_string(el.line); }

std::vector<std::string> tokens(const std::string& text) {
    std::istringstream is(text);
    return {std::istream_iterator<std::string>(is), std::istream_iterator<std::string>()};
}

double to_real(const std::string& tok, const xml::Element& el) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size() || errno == ERANGE) {
        throw SchemaError(where(el) + ": <" + el.name + "> expected a number, got '" + tok + "'");
    }
    return v;
}

int to_int(const std::string& tok, const xml::Element& el) {
    const double v = to_real(tok, el);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw SchemaError(where(el) + ": <" + el.name + "> expected an integer, got '" + tok + "'");
    }
    return static_cast<int>(v);
}

const xml::Element& require(const xml::Element& parent, std::string_view name) {
    const auto* c = parent.child(name);
    if (!c) {
        throw SchemaError(where(parent) + ": <" + parent.name + "> is missing <" +
                          std::string(name) + ">");
    }
    return *c;
}

double real_child(const xml::Element& parent, std::string_view name) {
    const auto& el = require(parent, name);
    const auto t = tokens(el.text);
    if (t.size() != 1) throw SchemaError(where(el) + ": <" + el.name + "> expects one number");
    return to_real(t[0], el);
}

HaarRect parse_rect(const xml::Element& el) {
    const auto t = tokens(el.text);
    if (t.size() != 5) {
        throw SchemaError(where(el) + ": rect needs 'x y w h weight', got " +
                          std::to_string(t.size()) + " fields");
    }
    return {{to_int(t[0], el), to_int(t[1], el), to_int(t[2], el), to_int(t[3], el)},
            to_real(t[4], el)};
}

HaarFeature parse_feature(const xml::Element& el) {
    HaarFeature f;
    for (const auto* r : require(el, "rects").children_named("_")) f.rects.push_back(parse_rect(*r));
    if (const auto* tilted = el.child("tilted")) {
        const auto t = tokens(tilted->text);
        f.tilted = !t.empty() && to_int(t[0], *tilted) != 0;
    }
    if (f.tilted) throw UnsupportedFeatureError(where(el) + ": tilted (45 degree) Haar feature");
    return f;
}

void validate(const CascadeModel& m) {
    if (m.window_w < 4 || m.window_h < 4) {
        throw SchemaError("cascade '" + m.name + "': window " + std::to_string(m.window_w) + "x" +
                          std::to_string(m.window_h) + " is smaller than 4x4");
    }
    if (m.stages.empty()) throw SchemaError("cascade '" + m.name + "' has no stages");
    for (std::size_t s = 0; s < m.stages.size(); ++s) {
        const auto& st = m.stages[s];
        const std::string at = "cascade '" + m.name + "' stage " + std::to_string(s);
        if (st.classifiers.empty()) throw SchemaError(at + " has no classifiers");
        for (std::size_t c = 0; c < st.classifiers.size(); ++c) {
            const auto& rects = st.classifiers[c].feature.rects;
            const std::string cat = at + " classifier " + std::to_string(c);
            if (rects.size() < 2 || rects.size() > 3) {
                throw SchemaError(cat + ": feature has " + std::to_string(rects.size()) +
                                  " rects (expected 2 or 3)");
            }
            bool neg = false;
            bool pos = false;
            for (const auto& hr : rects) {
                const Rect& r = hr.rect;
                if (r.x < 0 || r.y < 0 || r.w <= 0 || r.h <= 0 || r.x + r.w > m.window_w ||
                    r.y + r.h > m.window_h) {
                    throw SchemaError(cat + ": rect " + to_string(r) + " outside the window");
                }
                neg = neg || hr.weight < 0;
                pos = pos || hr.weight > 0;
            }
            if (!neg || !pos) throw SchemaError(cat + ": weights must mix signs");
        }
    }
}

// <size>W H</size>, <stages>, per stage <trees> of single-node <_><_>...</_></_>.
CascadeModel parse_legacy(const xml::Element& cas) {
    CascadeModel m;
    m.name = cas.name;
    const auto* size = cas.child("size");
    if (!size) throw SchemaError(where(cas) + ": cascade <" + cas.name + "> is missing <size>");
    const auto st = tokens(size->text);
    if (st.size() != 2) throw SchemaError(where(*size) + ": <size> needs two integers");
    m.window_w = to_int(st[0], *size);
    m.window_h = to_int(st[1], *size);

    const auto& stages = require(cas, "stages");
    for (const auto* stage_el : stages.children_named("_")) {
        Stage stage;
        const auto& trees = require(*stage_el, "trees");
        for (const auto* tree : trees.children_named("_")) {
            const auto nodes = tree->children_named("_");
            if (nodes.size() != 1) {
                throw UnsupportedFeatureError(where(*tree) + ": tree-structured classifier with " +
                                              std::to_string(nodes.size()) +
                                              " nodes (only stumps are supported)");
            }
            const auto& node = *nodes.front();
            if (node.child("left_node") || node.child("right_node")) {
                throw UnsupportedFeatureError(where(node) +
                                              ": tree-structured classifier (left_node/right_node)");
            }
            WeakClassifier wc;
            wc.feature = parse_feature(require(node, "feature"));
            wc.threshold = real_child(node, "threshold");
            wc.left_val = real_child(node, "left_val");
            wc.right_val = real_child(node, "right_val");
            stage.classifiers.push_back(std::move(wc));
        }
        stage.stage_threshold = real_child(*stage_el, "stage_threshold");
        m.stages.push_back(std::move(stage));
    }
    return m;
}

// <cascade> with width/height, stages of weakClassifiers (internalNodes +
// leafValues) indexing a shared <features> list.
CascadeModel parse_modern(const xml::Element& cas, std::string_view name) {
    CascadeModel m;
    m.name = std::string(name);
    if (const auto* st = cas.child("stageType"); st && tokens(st->text) != std::vector<std::string>{"BOOST"}) {
        throw UnsupportedFeatureError(where(*st) + ": stageType '" + st->text + "'");
    }
    if (const auto* ft = cas.child("featureType"); ft && tokens(ft->text) != std::vector<std::string>{"HAAR"}) {
        throw UnsupportedFeatureError(where(*ft) + ": featureType '" + ft->text +
                                      "' (only HAAR is supported)");
    }
    if (!cas.child("width") || !cas.child("height")) {
        throw SchemaError(where(cas) + ": cascade is missing its <width>/<height> size elements");
    }
    m.window_w = static_cast<int>(real_child(cas, "width"));
    m.window_h = static_cast<int>(real_child(cas, "height"));

    std::vector<HaarFeature> features;
    for (const auto* f : require(cas, "features").children_named("_")) {
        features.push_back(parse_feature(*f));
    }
    for (const auto* stage_el : require(cas, "stages").children_named("_")) {
        Stage stage;
        stage.stage_threshold = real_child(*stage_el, "stageThreshold");
        for (const auto* wc_el : require(*stage_el, "weakClassifiers").children_named("_")) {
            const auto& nodes_el = require(*wc_el, "internalNodes");
            const auto& leaves_el = require(*wc_el, "leafValues");
            const auto nodes = tokens(nodes_el.text);
            const auto leaves = tokens(leaves_el.text);
            if (nodes.size() != 4 || leaves.size() != 2) {
                throw UnsupportedFeatureError(where(nodes_el) + ": tree-structured classifier with " +
                                              std::to_string(nodes.size() / 4) +
                                              " nodes (only stumps are supported)");
            }
            const int feat = to_int(nodes[2], nodes_el);
            if (feat < 0 || static_cast<std::size_t>(feat) >= features.size()) {
                throw SchemaError(where(nodes_el) + ": feature index " + std::to_string(feat) +
                                  " out of range");
            }
            WeakClassifier wc;
            wc.feature = features[static_cast<std::size_t>(feat)];
            wc.threshold = to_real(nodes[3], nodes_el);
            wc.left_val = to_real(leaves[0], leaves_el);
            wc.right_val = to_real(leaves[1], leaves_el);
            stage.classifiers.push_back(std::move(wc));
        }
        m.stages.push_back(std::move(stage));
    }
    return m;
}

long long round_half_up(double v) { return static_cast<long long>(std::floor(v + 0.5)); }

constexpr std::array<std::string_view, 4> kDefaultOrder = {
    "haarcascade_frontalface_default.xml",
    "haarcascade_frontalface_alt.xml",
    "haarcascade_frontalface_alt2.xml",
    "haarcascade_frontalface_alt_tree.xml",
};

}  // namespace

CascadeModel parse_cascade(std::string_view document, std::string_view fallback_name) {
    const auto root = xml::parse(document);
    if (root->children.empty()) {
        throw SchemaError(where(*root) + ": <" + root->name + "> contains no cascade");
    }
    const xml::Element& cas = *root->children.front();
    CascadeModel m = (cas.child("features") || cas.child("featureType") || cas.child("width"))
                         ? parse_modern(cas, fallback_name)
                         : parse_legacy(cas);
    validate(m);
    return m;
}

CascadeModel load_cascade(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open cascade " + path.string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_cascade(text, path.stem().string());
    } catch (const UnsupportedFeatureError& e) {
        throw UnsupportedFeatureError(path.string() + ": " + e.what());
    } catch (const SchemaError& e) {
        throw SchemaError(path.string() + ": " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::span<const std::string_view> default_cascade_order() { return kDefaultOrder; }

std::vector<CascadeModel> load_cascade_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
        throw IoError("cascade directory not found: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& name : kDefaultOrder) {
        if (std::filesystem::is_regular_file(dir / name, ec)) files.push_back(dir / name);
    }
    std::vector<std::filesystem::path> rest;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".xml") continue;
        const auto fname = entry.path().filename().string();
        if (std::find(kDefaultOrder.begin(), kDefaultOrder.end(), fname) == kDefaultOrder.end()) {
            rest.push_back(entry.path());
        }
    }
    std::sort(rest.begin(), rest.end());
    files.insert(files.end(), rest.begin(), rest.end());
    if (files.empty()) throw IoError("no cascade files in " + dir.string());

    std::vector<CascadeModel> models;
    for (const auto& f : files) models.push_back(load_cascade(f));
    return models;
}

Rect scale_rect(const Rect& r, double s) {
    return {static_cast<int>(round_half_up(r.x * s)), static_cast<int>(round_half_up(r.y * s)),
            static_cast<int>(round_half_up(r.w * s)), static_cast<int>(round_half_up(r.h * s))};
}

ScaledCascade::ScaledCascade(const CascadeModel& model, double scale) {
    if (!(scale >= 1.0)) throw ArgumentError("cascade scale must be >= 1");
    window_w_ = static_cast<int>(round_half_up(model.window_w * scale));
    window_h_ = static_cast<int>(round_half_up(model.window_h * scale));
    inv_area_ = 1.0 / (static_cast<double>(window_w_) * window_h_);
    for (const auto& stage : model.stages) {
        stages_.push_back({stumps_.size(), stage.classifiers.size(), stage.stage_threshold});
        for (const auto& wc : stage.classifiers) {
            stumps_.push_back({rects_.size(), wc.feature.rects.size(), wc.threshold, wc.left_val,
                               wc.right_val});
            for (const auto& hr : wc.feature.rects) {
                Rect r = scale_rect(hr.rect, scale);
                // Independent rounding can overshoot the window by a pixel.
                r.x = std::min(r.x, window_w_ - 1);
                r.y = std::min(r.y, window_h_ - 1);
                r.w = std::clamp(r.w, 1, window_w_ - r.x);
                r.h = std::clamp(r.h, 1, window_h_ - r.y);
                rects_.push_back({r.x, r.y, r.w, r.h, hr.weight});
            }
        }
    }
}

bool ScaledCascade::passes(const IntegralImage& ii, int x, int y) const {
    const Rect win{x, y, window_w_, window_h_};
    const double mean = static_cast<double>(ii.rect_sum(win)) * inv_area_;
    const double var = static_cast<double>(ii.rect_sqsum(win)) * inv_area_ - mean * mean;
    const double sigma = var > 0 ? std::sqrt(var) : 1.0;

    for (const auto& stage : stages_) {
        double stage_sum = 0;
        for (std::size_t s = stage.first_stump; s < stage.first_stump + stage.stump_count; ++s) {
            const Stump& st = stumps_[s];
            double feature = 0;
            for (std::size_t k = st.first_rect; k < st.first_rect + st.rect_count; ++k) {
                const ScaledRect& r = rects_[k];
                feature += r.weight *
                           static_cast<double>(ii.rect_sum({x + r.x, y + r.y, r.w, r.h}));
            }
            feature *= inv_area_;
            stage_sum += feature < st.threshold * sigma ? st.left_val : st.right_val;
        }
        if (stage_sum < stage.threshold) return false;
    }
    return true;
}

bool eval_window(const CascadeModel& model, const IntegralImage& ii, const Rect& window,
                 double scale) {
    const ScaledCascade sc(model, scale);
    if (window.w != sc.window_w() || window.h != sc.window_h()) {
        throw ArgumentError("window " + to_string(window) + " does not match the scaled size " +
                            std::to_string(sc.window_w()) + "x" + std::to_string(sc.window_h()));
    }
    if (window.x < 0 || window.y < 0 || window.x + window.w > ii.image_width() ||
        window.y + window.h > ii.image_height()) {
        throw BoundsError("window " + to_string(window) + " outside the image");
    }
    return sc.passes(ii, window.x, window.y);
}

void sort_detections(std::vector<Detection>& dets) {
    std::sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
        if (a.rect.area() != b.rect.area()) return a.rect.area() > b.rect.area();
        return std::tie(a.rect.y, a.rect.x, a.rect.w, a.rect.h, a.neighbors) <
               std::tie(b.rect.y, b.rect.x, b.rect.w, b.rect.h, b.neighbors);
    });
}

std::vector<Detection> group_rects(std::span<const Rect> raw, int min_neighbors, double eps) {
    if (!(eps >= 0)) throw ArgumentError("group_rects: eps must be >= 0");
    const std::size_t n = raw.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    auto similar = [eps](const Rect& a, const Rect& b) {
        const double dw = eps * std::min(a.w, b.w);
        const double dh = eps * std::min(a.h, b.h);
        return std::abs(a.x - b.x) <= dw && std::abs(a.y - b.y) <= dh &&
               std::abs(a.w - b.w) <= dw && std::abs(a.h - b.h) <= dh;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (similar(raw[i], raw[j])) parent[find(i)] = find(j);
        }
    }

    struct Acc {
        long long x = 0, y = 0, w = 0, h = 0;
        int count = 0;
    };
    std::vector<Acc> acc(n);
    for (std::size_t i = 0; i < n; ++i) {
        Acc& a = acc[find(i)];
        a.x += raw[i].x;
        a.y += raw[i].y;
        a.w += raw[i].w;
        a.h += raw[i].h;
        ++a.count;
    }
    const int need = std::max(1, min_neighbors);
    auto mean = [](long long total, int count) {
        return static_cast<int>(round_half_up(static_cast<double>(total) / count));
    };
    std::vector<Detection> out;
    for (const Acc& a : acc) {
        if (a.count == 0 || a.count < need) continue;
        out.push_back({{mean(a.x, a.count), mean(a.y, a.count), mean(a.w, a.count),
                        mean(a.h, a.count)},
                       a.count});
    }
    sort_detections(out);
    return out;
}

std::vector<Detection> detect_multiscale(const CascadeModel& model, const GrayImage& img,
                                         const DetectParams& params) {
    if (!(params.scale_factor > 1.0)) {
        throw ArgumentError("scale_factor must be > 1, got " + std::to_string(params.scale_factor));
    }
    if (img.width() < model.window_w || img.height() < model.window_h) return {};

    const IntegralImage ii(img);
    std::vector<Rect> raw;
    for (int level = 0;; ++level) {
        const double scale = std::pow(params.scale_factor, level);
        const ScaledCascade sc(model, scale);
        if (sc.window_w() > img.width() || sc.window_h() > img.height()) break;
        if (sc.window_w() < params.min_size || sc.window_h() < params.min_size) continue;
        const int step = std::max(1, static_cast<int>(round_half_up(scale)));
        auto hits = params.exec == Exec::parallel ? kernels::scan_windows_parallel(sc, ii, step)
                                                  : kernels::scan_windows_serial(sc, ii, step);
        raw.insert(raw.end(), hits.begin(), hits.end());
    }

    auto dets = group_rects(raw, params.min_neighbors);
    for (auto& d : dets) {
        Rect& r = d.rect;
        r.x = std::clamp(r.x, 0, img.width() - 1);
        r.y = std::clamp(r.y, 0, img.height() - 1);
        r.w = std::min(r.w, img.width() - r.x);
        r.h = std::min(r.h, img.height() - r.y);
    }
    sort_detections(dets);
    return dets;
}

std::optional<Rect> detect_face_sequence(std::span<const CascadeModel> models,
                                         const GrayImage& img, const DetectParams& params,
                                         std::size_t* consulted) {
    if (models.empty()) throw ArgumentError("detect_face_sequence needs at least one cascade");
    std::size_t runs = 0;
    std::optional<Rect> found;
    for (const auto& model : models) {
        ++runs;
        const auto dets = detect_multiscale(model, img, params);
        if (!dets.empty()) {
            found = dets.front().rect;  // canonical order puts the largest first
            break;
        }
    }
    if (consulted) *consulted = runs;
    return found;
}

}  // namespace fisherlens
