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

#include "fisherlens/fisherface.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "fisherlens/error.hpp"
#include "fisherlens/kernels.hpp"

namespace fisherlens {

namespace {

Matrix mul(const Matrix& a, const Matrix& b, Exec exec) {
    return exec == Exec::parallel ? kernels::multiply_parallel(a, b)
                                  : kernels::multiply_serial(a, b);
}

std::vector<double> column_means(const Matrix& x) {
    std::vector<double> mean(x.cols(), 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto row = x.row(r);
        for (std::size_t c = 0; c < x.cols(); ++c) mean[c] += row[c];
    }
    for (double& m : mean) m /= static_cast<double>(x.rows());
    return mean;
}

Matrix centered(const Matrix& x, std::span<const double> mean) {
    Matrix out = x;
    for (std::size_t r = 0; r < out.rows(); ++r) {
        auto row = out.row(r);
        for (std::size_t c = 0; c < out.cols(); ++c) row[c] -= mean[c];
    }
    return out;
}

std::map<EmotionLabel, std::size_t> class_counts(std::span<const EmotionLabel> labels) {
    std::map<EmotionLabel, std::size_t> counts;
    for (auto l : labels) ++counts[l];
    return counts;
}

}  // namespace

std::vector<double> flatten(const GrayImage& face) {
    std::vector<double> v(face.data().size());
    std::transform(face.data().begin(), face.data().end(), v.begin(),
                   [](std::uint8_t p) { return p / 255.0; });
    return v;
}

SampleMatrix make_samples(std::span<const GrayImage> faces, std::span<const EmotionLabel> labels) {
    if (faces.size() != labels.size()) {
        throw ArgumentError("make_samples: " + std::to_string(faces.size()) + " faces but " +
                            std::to_string(labels.size()) + " labels");
    }
    if (faces.empty()) throw ArgumentError("make_samples: no faces");
    const int w = faces.front().width();
    const int h = faces.front().height();
    SampleMatrix s{Matrix(faces.size(), static_cast<std::size_t>(w) * h), {labels.begin(), labels.end()}};
    for (std::size_t i = 0; i < faces.size(); ++i) {
        if (faces[i].width() != w || faces[i].height() != h) {
            throw ArgumentError("make_samples: face " + std::to_string(i) + " is " +
                                std::to_string(faces[i].width()) + "x" +
                                std::to_string(faces[i].height()) + ", expected " +
                                std::to_string(w) + "x" + std::to_string(h));
        }
        const auto v = flatten(faces[i]);
        std::copy(v.begin(), v.end(), s.rows.row(i).begin());
    }
    return s;
}

std::vector<EmotionLabel> distinct_labels(std::span<const EmotionLabel> labels) {
    std::vector<EmotionLabel> out;
    for (const auto& [label, count] : class_counts(labels)) out.push_back(label);
    return out;
}

PcaResult pca_fit(const Matrix& x, std::size_t k, Exec exec) {
    const std::size_t n = x.rows();
    if (n < 2 || k < 1 || k > n - 1) {
        throw ArgumentError("pca_fit: k = " + std::to_string(k) + " outside [1, " +
                            std::to_string(n < 1 ? 0 : n - 1) + "]");
    }
    PcaResult out;
    out.mean = column_means(x);
    const Matrix xc = centered(x, out.mean);

    Matrix gram = exec == Exec::parallel ? kernels::gram_parallel(xc) : kernels::gram_serial(xc);
    gram *= 1.0 / static_cast<double>(n);
    const EigenResult eig = eigen_symmetric(gram);

    const double floor = 1e-12 * std::max(1.0, eig.values.front());
    Matrix top(n, k);
    for (std::size_t j = 0; j < k; ++j) {
        if (!(eig.values[j] > floor)) {
            throw RankError("pca_fit: eigenvalue " + std::to_string(j) + " is " +
                            std::to_string(eig.values[j]) +
                            "; the data has lower rank than k = " + std::to_string(k) +
                            ", use fewer components");
        }
        for (std::size_t i = 0; i < n; ++i) top(i, j) = eig.vectors(i, j);
        out.eigenvalues.push_back(eig.values[j]);
    }

    out.basis = mul(transpose(xc), top, exec);
    normalize_columns(out.basis);
    for (std::size_t j = 0; j < k; ++j) {
        auto col = out.basis.column(j);
        canonicalize_sign(col);
        out.basis.set_column(j, col);
    }
    return out;
}

Matrix lda_fit(const Matrix& y, std::span<const EmotionLabel> labels) {
    const std::size_t n = y.rows();
    const std::size_t k = y.cols();
    if (labels.size() != n) throw ArgumentError("lda_fit: label count does not match rows");
    const auto counts = class_counts(labels);
    const std::size_t c = counts.size();
    if (c < 2) throw ArgumentError("lda_fit: need at least 2 classes, got " + std::to_string(c));
    for (const auto& [label, count] : counts) {
        if (count < 2) {
            throw ArgumentError("lda_fit: class " + std::string(to_string(label)) + " has " +
                                std::to_string(count) + " sample(s), need 2");
        }
    }
    if (k < c) {
        throw ArgumentError("lda_fit: dimension k = " + std::to_string(k) +
                            " must be at least the class count " + std::to_string(c));
    }

    const std::vector<double> global = column_means(y);
    std::map<EmotionLabel, std::vector<double>> means;
    for (const auto& [label, count] : counts) means[label].assign(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto& m = means[labels[i]];
        const auto row = y.row(i);
        for (std::size_t j = 0; j < k; ++j) m[j] += row[j];
    }
    for (auto& [label, m] : means) {
        for (double& v : m) v /= static_cast<double>(counts.at(label));
    }

    Matrix sw(k, k);
    Matrix sb(k, k);
    std::vector<double> d(k);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& m = means[labels[i]];
        const auto row = y.row(i);
        for (std::size_t j = 0; j < k; ++j) d[j] = row[j] - m[j];
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) sw(a, b) += d[a] * d[b];
        }
    }
    for (const auto& [label, m] : means) {
        const double nc = static_cast<double>(counts.at(label));
        for (std::size_t j = 0; j < k; ++j) d[j] = m[j] - global[j];
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) sb(a, b) += nc * d[a] * d[b];
        }
    }

    double trace = 0;
    for (std::size_t j = 0; j < k; ++j) trace += sw(j, j);
    const double ridge = 1e-9 * trace / static_cast<double>(k);
    for (std::size_t j = 0; j < k; ++j) sw(j, j) += ridge;
    Matrix l;
    try {
        l = cholesky(sw);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("lda_fit: within-class scatter is singular: ") + e.what());
    }

    // C = L^-1 S_b L^-T, built column by column.
    Matrix half(k, k);  // L^-1 S_b
    for (std::size_t j = 0; j < k; ++j) half.set_column(j, forward_substitute(l, sb.column(j)));
    Matrix reduced(k, k);
    for (std::size_t j = 0; j < k; ++j) reduced.set_column(j, forward_substitute(l, half.row(j)));
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            reduced(a, b) = reduced(b, a) = 0.5 * (reduced(a, b) + reduced(b, a));
        }
    }
    const EigenResult eig = eigen_symmetric(reduced);

    Matrix basis(k, c - 1);
    for (std::size_t j = 0; j + 1 < c; ++j) {
        auto v = back_substitute_transposed(l, eig.vectors.column(j));
        const double len = norm(v);
        if (!(len > 0)) throw NumericalError("lda_fit: degenerate discriminant direction");
        for (double& x : v) x /= len;
        canonicalize_sign(v);
        basis.set_column(j, v);
    }
    return basis;
}

FisherModel train_fisherface(const SampleMatrix& samples, int face_w, int face_h,
                             const TrainOptions& opts) {
    const std::size_t n = samples.rows.rows();
    if (samples.labels.size() != n) throw ArgumentError("train: label count does not match rows");
    if (samples.rows.cols() != static_cast<std::size_t>(face_w) * face_h) {
        throw ArgumentError("train: sample dimension " + std::to_string(samples.rows.cols()) +
                            " does not match face size " + std::to_string(face_w) + "x" +
                            std::to_string(face_h));
    }
    const auto counts = class_counts(samples.labels);
    const std::size_t c = counts.size();
    if (c < 2) throw ArgumentError("train: need at least 2 classes, got " + std::to_string(c));
    for (const auto& [label, count] : counts) {
        if (count < 2) {
            throw ArgumentError("train: class " + std::string(to_string(label)) + " has " +
                                std::to_string(count) + " sample(s), need at least 2");
        }
    }
    if (n < c + 2) {
        throw ArgumentError("train: need at least " + std::to_string(c + 2) + " samples for " +
                            std::to_string(c) + " classes, got " + std::to_string(n));
    }
    const std::size_t k = opts.pca_dims.value_or(n - c);
    if (k < c || k > n - 1) {
        throw ArgumentError("train: PCA dimension " + std::to_string(k) + " outside [" +
                            std::to_string(c) + ", " + std::to_string(n - 1) + "]");
    }

    const PcaResult pca = pca_fit(samples.rows, k, opts.exec);
    const Matrix xc = centered(samples.rows, pca.mean);
    const Matrix reduced = mul(xc, pca.basis, opts.exec);
    const Matrix lda = lda_fit(reduced, samples.labels);

    FisherModel m;
    m.face_w = face_w;
    m.face_h = face_h;
    m.mean = pca.mean;
    m.projection = mul(pca.basis, lda, opts.exec);
    normalize_columns(m.projection);
    m.projected_train = mul(xc, m.projection, opts.exec);
    m.train_labels = samples.labels;
    m.class_list = distinct_labels(samples.labels);
    return m;
}

std::vector<double> project(const FisherModel& model, std::span<const double> x) {
    if (x.size() != model.dims()) {
        throw ArgumentError("project: vector has " + std::to_string(x.size()) +
                            " components, expected " + std::to_string(model.dims()));
    }
    const std::size_t f = model.fisher_dims();
    std::vector<double> y(f, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double centered_i = x[i] - model.mean[i];
        if (centered_i == 0.0) continue;
        const auto w = model.projection.row(i);
        for (std::size_t j = 0; j < f; ++j) y[j] += centered_i * w[j];
    }
    return y;
}

Prediction predict_vector(const FisherModel& model, std::span<const double> x) {
    if (model.projected_train.rows() == 0) throw ArgumentError("predict: model has no samples");
    const auto y = project(model, x);
    const auto d2 = kernels::squared_distances_serial(model.projected_train, y);

    std::size_t best = 0;
    for (std::size_t i = 1; i < d2.size(); ++i) {
        if (d2[i] < d2[best]) best = i;
    }
    Prediction p;
    p.label = model.train_labels[best];
    p.distance = std::sqrt(d2[best]);
    std::optional<std::size_t> other;
    for (std::size_t i = 0; i < d2.size(); ++i) {
        if (model.train_labels[i] == p.label) continue;
        if (!other || d2[i] < d2[*other]) other = i;
    }
    if (other) p.runner_up = {model.train_labels[*other], std::sqrt(d2[*other])};
    return p;
}

Prediction predict(const FisherModel& model, const GrayImage& face) {
    if (face.width() != model.face_w || face.height() != model.face_h) {
        throw ArgumentError("predict: face is " + std::to_string(face.width()) + "x" +
                            std::to_string(face.height()) + ", model expects " +
                            std::to_string(model.face_w) + "x" + std::to_string(model.face_h));
    }
    return predict_vector(model, flatten(face));
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

void put_real(std::string& out, double v) {
    if (!std::isfinite(v)) throw NumericalError("save_model: non-finite value in model");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

void put_reals(std::string& out, std::span<const double> values) {
    out += '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        if (i && i % 8 == 0) out += "\n    ";
        put_real(out, values[i]);
    }
    out += ']';
}

void put_labels(std::string& out, std::span<const EmotionLabel> labels) {
    out += '[';
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += ", ";
        out += '"';
        out += to_string(labels[i]);
        out += '"';
    }
    out += ']';
}

using nlohmann::json;

const json& field(const json& doc, const char* key) {
    if (!doc.contains(key)) {
        throw LoadError(LoadError::Kind::truncated, std::string("model: missing field '") + key + "'");
    }
    return doc.at(key);
}

std::vector<double> reals(const json& doc, const char* key) {
    const json& arr = field(doc, key);
    if (!arr.is_array()) {
        throw LoadError(LoadError::Kind::consistency, std::string("model: '") + key + "' is not an array");
    }
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number()) {
            throw LoadError(LoadError::Kind::consistency, std::string("model: non-number in '") + key + "'");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<EmotionLabel> labels(const json& doc, const char* key) {
    const json& arr = field(doc, key);
    if (!arr.is_array()) {
        throw LoadError(LoadError::Kind::consistency, std::string("model: '") + key + "' is not an array");
    }
    std::vector<EmotionLabel> out;
    for (const auto& v : arr) {
        try {
            out.push_back(parse_emotion(v.is_string() ? v.get<std::string>() : v.dump()));
        } catch (const ArgumentError& e) {
            throw LoadError(LoadError::Kind::consistency, std::string("model: ") + e.what());
        }
    }
    return out;
}

long long integer(const json& doc, const char* key) {
    const json& v = field(doc, key);
    if (!v.is_number_integer()) {
        throw LoadError(LoadError::Kind::consistency, std::string("model: '") + key + "' is not an integer");
    }
    return v.get<long long>();
}

[[noreturn]] void inconsistent(const std::string& msg) {
    throw LoadError(LoadError::Kind::consistency, "model: " + msg);
}

}  // namespace

std::string save_model(const FisherModel& m) {
    const std::size_t n = m.projected_train.rows();
    std::string out;
    out += "{\n  \"format\": \"fisherlens-model\",\n";
    out += "  \"version\": " + std::to_string(kModelFormatVersion) + ",\n";
    out += "  \"face_w\": " + std::to_string(m.face_w) + ",\n";
    out += "  \"face_h\": " + std::to_string(m.face_h) + ",\n";
    out += "  \"fisher_dims\": " + std::to_string(m.fisher_dims()) + ",\n";
    out += "  \"train_count\": " + std::to_string(n) + ",\n";
    out += "  \"class_list\": ";
    put_labels(out, m.class_list);
    out += ",\n  \"mean\": ";
    put_reals(out, m.mean);
    out += ",\n  \"projection\": ";
    put_reals(out, m.projection.data());
    out += ",\n  \"projected_train\": ";
    put_reals(out, m.projected_train.data());
    out += ",\n  \"train_labels\": ";
    put_labels(out, m.train_labels);
    out += "\n}\n";
    return out;
}

FisherModel load_model(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        throw LoadError(LoadError::Kind::truncated, std::string("model: unreadable document: ") + e.what());
    }
    if (!doc.is_object()) throw LoadError(LoadError::Kind::truncated, "model: document is not an object");
    const json& version = field(doc, "version");
    if (!version.is_number_integer() || version.get<long long>() != kModelFormatVersion) {
        throw LoadError(LoadError::Kind::version, "model: unsupported version " + version.dump() +
                                                      " (expected " +
                                                      std::to_string(kModelFormatVersion) + ")");
    }

    FisherModel m;
    const long long w = integer(doc, "face_w");
    const long long h = integer(doc, "face_h");
    const long long f = integer(doc, "fisher_dims");
    const long long n = integer(doc, "train_count");
    if (w <= 0 || h <= 0 || f <= 0 || n <= 0) inconsistent("sizes must be positive");
    m.face_w = static_cast<int>(w);
    m.face_h = static_cast<int>(h);
    m.class_list = labels(doc, "class_list");
    m.train_labels = labels(doc, "train_labels");
    m.mean = reals(doc, "mean");
    auto projection = reals(doc, "projection");
    auto projected = reals(doc, "projected_train");

    const auto d = static_cast<std::size_t>(w * h);
    const auto fd = static_cast<std::size_t>(f);
    const auto nd = static_cast<std::size_t>(n);
    if (fd + 1 != m.class_list.size()) {
        inconsistent("fisher_dims " + std::to_string(f) + " != class count " +
                     std::to_string(m.class_list.size()) + " - 1");
    }
    if (m.mean.size() != d) inconsistent("mean has " + std::to_string(m.mean.size()) + " entries, expected " + std::to_string(d));
    if (projection.size() != d * fd) inconsistent("projection size does not match face_w*face_h*fisher_dims");
    if (projected.size() != nd * fd) inconsistent("projected_train size does not match train_count*fisher_dims");
    if (m.train_labels.size() != nd) inconsistent("train_labels size does not match train_count");
    if (distinct_labels(m.train_labels) != m.class_list) inconsistent("class_list does not match train_labels");

    m.projection = Matrix(d, fd, std::move(projection));
    m.projected_train = Matrix(nd, fd, std::move(projected));
    return m;
}

void write_model(const std::filesystem::path& path, const FisherModel& model) {
    const std::string doc = save_model(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write model " + path.string());
    out << doc;
    if (!out) throw IoError("write failed: " + path.string());
}

FisherModel read_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model " + path.string());
    const std::string doc((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_model(doc);
}

}  // namespace fisherlens
