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

// Minimal XML reader for cascade files: elements, attributes, character data,
// comments, CDATA, processing instructions and DOCTYPE (skipped). No namespaces.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace fisherlens::xml {

struct Element {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::string text;  // concatenated character data of this element only
    std::vector<std::unique_ptr<Element>> children;
    int line = 0;

    const Element* child(std::string_view child_name) const;
    std::vector<const Element*> children_named(std::string_view child_name) const;
    const std::string* attribute(std::string_view key) const;
};

/// Throws ParseError("line N: ...") on malformed input.
std::unique_ptr<Element> parse(std::string_view text);

}  // namespace fisherlens::xml
