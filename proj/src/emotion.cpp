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

#include "fisherlens/emotion.hpp"

#include <charconv>

#include "fisherlens/error.hpp"

namespace fisherlens {

namespace {

constexpr std::array<std::string_view, 8> kNames = {
    "neutral", "happy", "anger", "disgust", "surprise", "fear", "sad", "contempt",
};

}  // namespace

std::string_view to_string(EmotionLabel l) { return kNames.at(static_cast<std::size_t>(code(l))); }

EmotionLabel parse_emotion(std::string_view text) {
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (kNames[i] == text) return static_cast<EmotionLabel>(i);
    }
    int value = -1;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && ptr == text.data() + text.size() && value >= 0 && value <= 7) {
        return static_cast<EmotionLabel>(value);
    }
    throw ArgumentError("unknown emotion '" + std::string(text) +
                        "' (expected a name such as happy, or a code 0-7)");
}

EmotionLabel from_ck_code(int ck_code) {
    switch (ck_code) {
        case 0: return EmotionLabel::neutral;
        case 1: return EmotionLabel::anger;
        case 2: return EmotionLabel::contempt;
        case 3: return EmotionLabel::disgust;
        case 4: return EmotionLabel::fear;
        case 5: return EmotionLabel::happy;
        case 6: return EmotionLabel::sad;
        case 7: return EmotionLabel::surprise;
        default: throw ArgumentError("CK emotion code out of range: " + std::to_string(ck_code));
    }
}

}  // namespace fisherlens
