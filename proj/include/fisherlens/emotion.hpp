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

#include <array>
#include <string>
#include <string_view>

namespace fisherlens {

/// The eight detectable emotions; codes are stable and serialized.
enum class EmotionLabel : int {
    neutral = 0,
    happy = 1,
    anger = 2,
    disgust = 3,
    surprise = 4,
    fear = 5,
    sad = 6,
    contempt = 7,
};

inline constexpr std::array<EmotionLabel, 8> kAllEmotions = {
    EmotionLabel::neutral, EmotionLabel::happy,    EmotionLabel::anger, EmotionLabel::disgust,
    EmotionLabel::surprise, EmotionLabel::fear,    EmotionLabel::sad,   EmotionLabel::contempt,
};

inline constexpr int code(EmotionLabel l) { return static_cast<int>(l); }

std::string_view to_string(EmotionLabel l);

/// Accepts a lowercase name ("happy") or a numeric code ("1"). Throws ArgumentError.
EmotionLabel parse_emotion(std::string_view text);

/// Maps a CK+ emotion code to our label: 1 anger, 2 contempt, 3 disgust,
/// 4 fear, 5 happy, 6 sad, 7 surprise (0 neutral).
EmotionLabel from_ck_code(int ck_code);

}  // namespace fisherlens
