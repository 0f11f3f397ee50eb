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

#include "fisherlens/netpbm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

#include "fisherlens/error.hpp"

namespace fisherlens::netpbm {

namespace {

class Scanner {
public:
    explicit Scanner(std::string_view bytes) : s_(bytes) {}

    void skip_space_and_comments() {
        while (pos_ < s_.size()) {
            const char c = s_[pos_];
            if (c == '#') {
                while (pos_ < s_.size() && s_[pos_] != '\n' && s_[pos_] != '\r') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    long long integer(const char* what) {
        skip_space_and_comments();
        if (pos_ >= s_.size()) throw ParseError(std::string("netpbm: truncated before ") + what);
        if (!std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            throw ParseError(std::string("netpbm: expected ") + what + " at byte " +
                             std::to_string(pos_));
        }
        long long v = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            v = v * 10 + (s_[pos_] - '0');
            if (v > (1LL << 31)) throw ParseError(std::string("netpbm: ") + what + " too large");
            ++pos_;
        }
        return v;
    }

    // Exactly one whitespace byte separates maxval from the raster in P5/P6.
    void single_whitespace() {
        if (pos_ >= s_.size() || !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            throw ParseError("netpbm: missing whitespace before raster");
        }
        ++pos_;
    }

    std::string_view rest() const { return s_.substr(pos_); }
    std::size_t pos() const { return pos_; }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_raster(Scanner& sc, bool binary, std::size_t count) {
    if (binary) {
        sc.single_whitespace();
        const auto raw = sc.rest();
        if (raw.size() < count) {
            throw ParseError("netpbm: raster truncated, expected " + std::to_string(count) +
                             " bytes, found " + std::to_string(raw.size()));
        }
        return {raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(count)};
    }
    std::vector<std::uint8_t> out(count);
    for (auto& v : out) {
        const long long x = sc.integer("sample");
        if (x > 255) throw ParseError("netpbm: sample " + std::to_string(x) + " exceeds maxval");
        v = static_cast<std::uint8_t>(x);
    }
    return out;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return bytes;
}

void spit(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

template <typename Sample>
std::string encode(char magic_binary, char magic_plain, int w, int h, const Sample& data,
                   bool binary) {
    std::ostringstream os;
    os << 'P' << (binary ? magic_binary : magic_plain) << '\n' << w << ' ' << h << "\n255\n";
    if (binary) {
        os.write(reinterpret_cast<const char*>(data.data()),
                 static_cast<std::streamsize>(data.size()));
    } else {
        const std::size_t per_line = magic_plain == '2' ? static_cast<std::size_t>(w)
                                                        : static_cast<std::size_t>(w) * 3;
        for (std::size_t i = 0; i < data.size(); ++i) {
            os << static_cast<int>(data[i]);
            os << ((i + 1) % per_line == 0 ? '\n' : ' ');
        }
    }
    return os.str();
}

}  // namespace

std::variant<GrayImage, RgbImage> decode(std::string_view bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P') throw ParseError("netpbm: missing magic number");
    const char kind = bytes[1];
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
        throw ParseError(std::string("netpbm: unsupported format P") + kind);
    }
    Scanner sc(bytes.substr(2));
    const long long w = sc.integer("width");
    const long long h = sc.integer("height");
    const long long maxval = sc.integer("maxval");
    if (w <= 0 || h <= 0) throw ParseError("netpbm: non-positive dimensions");
    if (maxval != 255) {
        throw ParseError("netpbm: only maxval 255 is supported, got " + std::to_string(maxval));
    }
    const bool binary = kind == '5' || kind == '6';
    const bool color = kind == '3' || kind == '6';
    const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
                              (color ? 3u : 1u);
    auto raster = read_raster(sc, binary, count);
    if (color) return RgbImage(static_cast<int>(w), static_cast<int>(h), std::move(raster));
    return GrayImage(static_cast<int>(w), static_cast<int>(h), std::move(raster));
}

std::variant<GrayImage, RgbImage> read(const std::filesystem::path& path) {
    const std::string bytes = slurp(path);
    try {
        return decode(bytes);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

GrayImage read_gray(const std::filesystem::path& path, GrayMethod method) {
    auto img = read(path);
    if (auto* g = std::get_if<GrayImage>(&img)) return std::move(*g);
    return to_gray(std::get<RgbImage>(img), method);
}

std::string encode_pgm(const GrayImage& img, bool binary) {
    return encode('5', '2', img.width(), img.height(), img.data(), binary);
}

std::string encode_ppm(const RgbImage& img, bool binary) {
    return encode('6', '3', img.width(), img.height(), img.data(), binary);
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
    spit(path, encode_pgm(img));
}

void write_ppm(const std::filesystem::path& path, const RgbImage& img) {
    spit(path, encode_ppm(img));
}

}  // namespace fisherlens::netpbm
