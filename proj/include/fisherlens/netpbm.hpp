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

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "fisherlens/image.hpp"

namespace fisherlens::netpbm {

// Reads P2/P5 (gray) and P3/P6 (color) with maxval 255. Header tokens may be
// separated by any whitespace and interleaved with '#' comments.
std::variant<GrayImage, RgbImage> decode(std::string_view bytes);
std::variant<GrayImage, RgbImage> read(const std::filesystem::path& path);

/// Loads any supported file as grayscale, converting color input with method.
GrayImage read_gray(const std::filesystem::path& path, GrayMethod method = GrayMethod::luminosity);

std::string encode_pgm(const GrayImage& img, bool binary = true);
std::string encode_ppm(const RgbImage& img, bool binary = true);

void write_pgm(const std::filesystem::path& path, const GrayImage& img);
void write_ppm(const std::filesystem::path& path, const RgbImage& img);

}  // namespace fisherlens::netpbm
