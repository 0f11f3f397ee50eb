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

// fisherlens: ingest -> prepare -> train -> eval -> predict, plus detect and gray.
//
// Exit codes: 0 ok, 2 usage or validation, 3 I/O, 4 empty result, 1 anything else.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "fisherlens/cascade.hpp"
#include "fisherlens/dataset.hpp"
#include "fisherlens/error.hpp"
#include "fisherlens/eval.hpp"
#include "fisherlens/fisherface.hpp"
#include "fisherlens/netpbm.hpp"

namespace fs = std::filesystem;
using namespace fisherlens;

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kIo = 3, kEmpty = 4 };

struct Size {
    int w = 48;
    int h = 48;
};

Size parse_size(const std::string& text) {
    const auto x = text.find('x');
    Size s{};
    try {
        if (x == std::string::npos) throw std::invalid_argument("no x");
        std::size_t used = 0;
        s.w = std::stoi(text.substr(0, x), &used);
        if (used != x) throw std::invalid_argument("junk");
        const std::string rest = text.substr(x + 1);
        s.h = std::stoi(rest, &used);
        if (used != rest.size()) throw std::invalid_argument("junk");
    } catch (const std::logic_error&) {
        throw ArgumentError("--size expects WxH, got '" + text + "'");
    }
    if (s.w < 1 || s.h < 1 || s.w > 1024 || s.h > 1024) {
        throw ArgumentError("--size must be between 1x1 and 1024x1024, got '" + text + "'");
    }
    return s;
}

std::uint64_t default_seed() {
    const char* env = std::getenv("FISHERLENS_SEED");
    if (!env || !*env) return 42;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(env, &used, 0);
        if (env[used] != '\0') throw std::invalid_argument("junk");
        return v;
    } catch (const std::logic_error&) {
        throw ArgumentError(std::string("FISHERLENS_SEED is not an unsigned integer: '") + env + "'");
    }
}

void check_fraction(double f) {
    if (!(f > 0.0 && f < 1.0)) {
        throw ArgumentError("--split must be strictly between 0 and 1, got " + std::to_string(f));
    }
}

void check_writable(const fs::path& out, bool force) {
    if (fs::exists(out) && !force) {
        throw ArgumentError(out.string() + " already exists (use --force to overwrite)");
    }
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<GrayImage> faces_for(const DatasetManifest& m) {
    if (m.records.empty()) throw EmptyResultError("manifest has no records");
    return load_faces(m);
}

DetectParams detect_params(double scale_factor, int min_neighbors, int min_size) {
    if (!(scale_factor > 1.0)) throw ArgumentError("--scale-factor must be > 1");
    if (min_size < 1) throw ArgumentError("--min-size must be >= 1");
    DetectParams p;
    p.scale_factor = scale_factor;
    p.min_neighbors = min_neighbors;
    p.min_size = min_size;
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Facial emotion recognition with Haar cascades and Fisherfaces", "fisherlens"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "fisherlens 1.0.0");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Build a manifest from a CK+-style image/label tree");
    std::string ing_images, ing_labels, ing_out, ing_size = "48x48";
    bool ing_force = false;
    ingest->add_option("--images", ing_images, "Images root (subject/session/frames)")->required();
    ingest->add_option("--labels", ing_labels, "Labels root (subject/session/*.txt)")->required();
    ingest->add_option("--out", ing_out, "Manifest to write")->required();
    ingest->add_option("--size", ing_size, "Face size recorded in the manifest")->capture_default_str();
    ingest->add_flag("--force", ing_force, "Overwrite --out");

    // prepare
    auto* prepare = app.add_subcommand("prepare", "Detect, crop, resize and sort faces by emotion");
    std::string prep_manifest, prep_cascades, prep_root, prep_out, prep_size, prep_gray = "luminosity";
    double prep_scale = 1.1;
    int prep_neighbors = 3, prep_min = 24;
    prepare->add_option("--manifest", prep_manifest, "Raw manifest from ingest")->required();
    prepare->add_option("--cascades", prep_cascades, "Directory of cascade XML files")->required();
    prepare->add_option("--out-root", prep_root, "Directory for the prepared faces")->required();
    prepare->add_option("--out", prep_out, "Prepared manifest (default <out-root>/manifest.json)");
    prepare->add_option("--size", prep_size, "Face size WxH (default: the manifest's)");
    prepare->add_option("--gray", prep_gray, "luminosity or average")->capture_default_str();
    prepare->add_option("--scale-factor", prep_scale)->capture_default_str();
    prepare->add_option("--min-neighbors", prep_neighbors)->capture_default_str();
    prepare->add_option("--min-size", prep_min)->capture_default_str();

    // train
    auto* train = app.add_subcommand("train", "Train a Fisherface model on the training split");
    std::string tr_manifest, tr_out, tr_subset;
    std::optional<std::uint64_t> tr_seed;
    double tr_split = 0.8;
    std::optional<std::size_t> tr_pca;
    bool tr_force = false;
    train->add_option("--manifest", tr_manifest, "Prepared manifest")->required();
    train->add_option("--out", tr_out, "Model file to write")->required();
    train->add_option("--seed", tr_seed, "Split seed (default $FISHERLENS_SEED or 42)");
    train->add_option("--split", tr_split, "Training fraction")->capture_default_str();
    train->add_option("--subset", tr_subset, "Comma-separated emotions to keep");
    train->add_option("--pca-dims", tr_pca, "PCA dimensions (default n - c)");
    train->add_flag("--force", tr_force, "Overwrite --out");

    // eval
    auto* eval = app.add_subcommand("eval", "Repeated seeded train/test trials");
    std::string ev_manifest, ev_subset, ev_json;
    std::optional<std::uint64_t> ev_seed;
    int ev_trials = 10;
    double ev_split = 0.8;
    std::optional<std::size_t> ev_pca;
    bool ev_force = false;
    eval->add_option("--manifest", ev_manifest, "Prepared manifest")->required();
    eval->add_option("--trials", ev_trials, "Number of trials")->capture_default_str();
    eval->add_option("--seed", ev_seed, "Base seed (default $FISHERLENS_SEED or 42)");
    eval->add_option("--split", ev_split, "Training fraction")->capture_default_str();
    eval->add_option("--subset", ev_subset, "Comma-separated emotions to keep");
    eval->add_option("--pca-dims", ev_pca, "PCA dimensions (default n - c)");
    eval->add_option("--json", ev_json, "Write the machine-readable report here");
    eval->add_flag("--force", ev_force, "Overwrite --json");

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "Classify one face image");
    std::string pr_model, pr_in, pr_cascades, pr_gray = "luminosity";
    bool pr_raw = false;
    predict_cmd->add_option("--model", pr_model, "Model file")->required();
    predict_cmd->add_option("--in", pr_in, "Face image (PGM/PPM)")->required();
    predict_cmd->add_flag("--raw-image", pr_raw, "Detect, crop and resize the face first");
    predict_cmd->add_option("--cascades", pr_cascades, "Cascade directory (with --raw-image)");
    predict_cmd->add_option("--gray", pr_gray, "luminosity or average")->capture_default_str();

    // detect
    auto* detect = app.add_subcommand("detect", "Find faces with the cascade sequence");
    std::string de_cascades, de_in, de_out;
    double de_scale = 1.1;
    int de_neighbors = 3, de_min = 24;
    bool de_force = false;
    detect->add_option("--cascades", de_cascades, "Directory of cascade XML files")->required();
    detect->add_option("--in", de_in, "Image (PGM/PPM)")->required();
    detect->add_option("--out", de_out, "Detections document (default: stdout)");
    detect->add_option("--scale-factor", de_scale)->capture_default_str();
    detect->add_option("--min-neighbors", de_neighbors)->capture_default_str();
    detect->add_option("--min-size", de_min)->capture_default_str();
    detect->add_flag("--force", de_force, "Overwrite --out");

    // gray
    auto* gray = app.add_subcommand("gray", "Convert an image to grayscale");
    std::string gr_in, gr_out, gr_method = "luminosity";
    bool gr_force = false;
    gray->add_option("--in", gr_in, "Input image (PGM/PPM)")->required();
    gray->add_option("--out", gr_out, "Output PGM")->required();
    gray->add_option("--method", gr_method, "luminosity or average")->capture_default_str();
    gray->add_flag("--force", gr_force, "Overwrite --out");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*ingest) {
            const Size size = parse_size(ing_size);
            check_writable(ing_out, ing_force);
            DatasetManifest m = ingest_ck(ing_images, ing_labels);
            m.face_w = size.w;
            m.face_h = size.h;
            write_manifest(ing_out, m);
            std::cout << "ingested " << m.records.size() << " records -> " << ing_out << "\n";
        } else if (*prepare) {
            const GrayMethod method = parse_gray_method(prep_gray);
            const DetectParams params = detect_params(prep_scale, prep_neighbors, prep_min);
            const DatasetManifest m = read_manifest(prep_manifest);
            const Size size = prep_size.empty() ? Size{m.face_w, m.face_h} : parse_size(prep_size);
            const auto cascades = load_cascade_dir(prep_cascades);
            PrepareOptions opts{size.w, size.h, method, params};
            const PrepareReport report = prepare_faces(m, cascades, prep_root, opts);
            for (const auto& [path, reason] : report.skipped) {
                std::cerr << "skipped " << path << ": " << reason << "\n";
            }
            const fs::path out = prep_out.empty() ? fs::path(prep_root) / "manifest.json" : fs::path(prep_out);
            write_manifest(out, report.prepared);
            std::cout << "prepared " << report.prepared.records.size() << " of " << m.records.size()
                      << " records -> " << out << "\n";
        } else if (*train) {
            check_fraction(tr_split);
            const std::uint64_t seed = tr_seed.value_or(default_seed());
            check_writable(tr_out, tr_force);
            DatasetManifest m = read_manifest(tr_manifest);
            std::vector<GrayImage> faces = faces_for(m);
            if (!tr_subset.empty()) {
                const auto keep = parse_subset(tr_subset);
                FilteredSet f = filter_subset(m, faces, keep);
                m = std::move(f.manifest);
                faces = std::move(f.faces);
            }
            Rng rng(seed);
            const SplitResult parts = split(m, tr_split, rng);
            std::vector<GrayImage> train_faces;
            std::vector<EmotionLabel> labels;
            for (std::size_t i : parts.train_index) {
                train_faces.push_back(faces[i]);
                labels.push_back(m.records[i].label);
            }
            TrainOptions opts;
            opts.pca_dims = tr_pca;
            const FisherModel model =
                train_fisherface(make_samples(train_faces, labels), m.face_w, m.face_h, opts);
            std::size_t correct = 0;
            for (std::size_t i : parts.test_index) {
                correct += predict(model, faces[i]).label == m.records[i].label ? 1 : 0;
            }
            write_model(tr_out, model);
            std::printf("trained on %zu samples, %zu classes, %zu fisher dims\n", parts.train_index.size(),
                        model.class_list.size(), model.fisher_dims());
            std::printf("held-out accuracy %.4f (%zu/%zu)\n",
                        static_cast<double>(correct) / static_cast<double>(parts.test_index.size()), correct,
                        parts.test_index.size());
            std::cout << "model -> " << tr_out << "\n";
        } else if (*eval) {
            check_fraction(ev_split);
            if (ev_trials < 1) throw ArgumentError("--trials must be >= 1");
            TrialConfig cfg;
            cfg.seed = ev_seed.value_or(default_seed());
            cfg.fraction = ev_split;
            cfg.trials = ev_trials;
            cfg.pca_dims = ev_pca;
            if (!ev_subset.empty()) {
                cfg.subset = parse_subset(ev_subset);
                if (cfg.subset->size() < 2) throw ArgumentError("--subset needs at least two emotions");
            }
            if (!ev_json.empty()) check_writable(ev_json, ev_force);
            const DatasetManifest m = read_manifest(ev_manifest);
            const auto faces = faces_for(m);
            const TrialReport report = run_repeated(m, faces, cfg);
            const RenderedReport r = render_report(report);
            std::cout << r.text;
            if (!ev_json.empty()) write_file(ev_json, r.json);
        } else if (*predict_cmd) {
            const GrayMethod method = parse_gray_method(pr_gray);
            if (pr_raw && pr_cascades.empty()) throw ArgumentError("--raw-image needs --cascades");
            const FisherModel model = read_model(pr_model);
            GrayImage face = netpbm::read_gray(pr_in, method);
            if (pr_raw) {
                const auto cascades = load_cascade_dir(pr_cascades);
                const auto rect = detect_face_sequence(cascades, face);
                if (!rect) throw EmptyResultError("no face found in " + pr_in);
                face = resize_bilinear(crop(face, *rect), model.face_w, model.face_h);
            }
            const Prediction p = predict(model, face);
            std::printf("%s %.17g\n", std::string(to_string(p.label)).c_str(), p.distance);
            if (p.runner_up) {
                std::printf("runner_up %s %.17g\n", std::string(to_string(p.runner_up->first)).c_str(),
                            p.runner_up->second);
            }
        } else if (*detect) {
            const DetectParams params = detect_params(de_scale, de_neighbors, de_min);
            if (!de_out.empty()) check_writable(de_out, de_force);
            const auto cascades = load_cascade_dir(de_cascades);
            const GrayImage img = netpbm::read_gray(de_in);
            // Same first-hit-wins order as detect_face_sequence, keeping every rect of the winner.
            std::vector<Detection> found;
            const CascadeModel* winner = nullptr;
            for (const auto& c : cascades) {
                found = detect_multiscale(c, img, params);
                if (!found.empty()) {
                    winner = &c;
                    break;
                }
            }
            nlohmann::ordered_json doc;
            doc["image"] = de_in;
            doc["width"] = img.width();
            doc["height"] = img.height();
            doc["cascade"] = winner ? nlohmann::ordered_json(winner->name) : nlohmann::ordered_json(nullptr);
            auto& rects = doc["faces"] = nlohmann::ordered_json::array();
            for (const auto& d : found) {
                rects.push_back({{"x", d.rect.x}, {"y", d.rect.y}, {"w", d.rect.w}, {"h", d.rect.h},
                                 {"neighbors", d.neighbors}});
            }
            const std::string text = doc.dump(2) + "\n";
            if (de_out.empty()) {
                std::cout << text;
            } else {
                write_file(de_out, text);
            }
        } else if (*gray) {
            const GrayMethod method = parse_gray_method(gr_method);
            check_writable(gr_out, gr_force);
            netpbm::write_pgm(gr_out, netpbm::read_gray(gr_in, method));
        }
    } catch (const EmptyResultError& e) {
        std::cerr << "fisherlens: " << e.what() << "\n";
        return kEmpty;
    } catch (const IoError& e) {
        std::cerr << "fisherlens: " << e.what() << "\n";
        return kIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "fisherlens: " << e.what() << "\n";
        return kIo;
    } catch (const ArgumentError& e) {
        std::cerr << "fisherlens: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "fisherlens: " << e.what() << "\n";
        return kUsage;
    } catch (const LoadError& e) {
        std::cerr << "fisherlens: " << e.what() << "\n";
        return kUsage;
    } catch (const RankError& e) {
        std::cerr << "fisherlens: " << e.what() << "\n";
        return kUsage;
    } catch (const IngestError& e) {
        std::cerr << "fisherlens: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "fisherlens: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}
