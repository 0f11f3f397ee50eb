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

#include "xml.hpp"

#include <cctype>

#include "fisherlens/error.hpp"

namespace fisherlens::xml {

const Element* Element::child(std::string_view child_name) const {
    for (const auto& c : children) {
        if (c->name == child_name) return c.get();
    }
    return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view child_name) const {
    std::vector<const Element*> out;
    for (const auto& c : children) {
        if (c->name == child_name) out.push_back(c.get());
    }
    return out;
}

const std::string* Element::attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
        if (k == key) return &v;
    }
    return nullptr;
}

namespace {

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
           c == ':';
}

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    std::unique_ptr<Element> document() {
        skip_misc();
        if (at_end()) fail("empty document");
        if (!starts_with("<")) fail("expected root element");
        auto root = element();
        skip_misc();
        if (!at_end()) fail("content after root element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("xml line " + std::to_string(line_) + ": " + msg);
    }

    bool at_end() const { return pos_ >= s_.size(); }
    bool starts_with(std::string_view p) const { return s_.substr(pos_, p.size()) == p; }

    void advance(std::size_t n = 1) {
        for (std::size_t i = 0; i < n && pos_ < s_.size(); ++i) {
            if (s_[pos_] == '\n') ++line_;
            ++pos_;
        }
    }

    void skip_until(std::string_view terminator, const char* what) {
        while (!at_end() && !starts_with(terminator)) advance();
        if (at_end()) fail(std::string("unterminated ") + what);
        advance(terminator.size());
    }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) advance();
    }

    // Whitespace, comments, processing instructions and DOCTYPE outside the root.
    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<?")) {
                skip_until("?>", "processing instruction");
            } else if (starts_with("<!--")) {
                skip_until("-->", "comment");
            } else if (starts_with("<!DOCTYPE")) {
                skip_until(">", "DOCTYPE");
            } else {
                return;
            }
        }
    }

    std::string name() {
        const std::size_t start = pos_;
        while (!at_end() && is_name_char(s_[pos_])) advance();
        if (pos_ == start) fail("expected a name");
        return std::string(s_.substr(start, pos_ - start));
    }

    void append_decoded(std::string& out, std::string_view raw) {
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] != '&') {
                out.push_back(raw[i]);
                continue;
            }
            const auto semi = raw.find(';', i);
            if (semi == std::string_view::npos) fail("unterminated entity reference");
            const auto ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "lt") out.push_back('<');
            else if (ent == "gt") out.push_back('>');
            else if (ent == "amp") out.push_back('&');
            else if (ent == "quot") out.push_back('"');
            else if (ent == "apos") out.push_back('\'');
            else if (!ent.empty() && ent[0] == '#') {
                const bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
                const std::string digits(ent.substr(hex ? 2 : 1));
                if (digits.empty()) fail("bad character reference");
                const unsigned long cp = std::stoul(digits, nullptr, hex ? 16 : 10);
                if (cp > 0x7f) fail("non-ASCII character reference unsupported");
                out.push_back(static_cast<char>(cp));
            } else {
                fail("unknown entity &" + std::string(ent) + ";");
            }
            i = semi;
        }
    }

    std::unique_ptr<Element> element() {
        auto el = std::make_unique<Element>();
        el->line = line_;
        advance();  // '<'
        el->name = name();
        for (;;) {
            skip_ws();
            if (at_end()) fail("unterminated start tag <" + el->name + ">");
            if (starts_with("/>")) {
                advance(2);
                return el;
            }
            if (starts_with(">")) {
                advance();
                break;
            }
            std::string key = name();
            skip_ws();
            if (!starts_with("=")) fail("expected '=' after attribute " + key);
            advance();
            skip_ws();
            if (at_end() || (s_[pos_] != '"' && s_[pos_] != '\'')) fail("expected quoted value");
            const char q = s_[pos_];
            advance();
            const std::size_t start = pos_;
            while (!at_end() && s_[pos_] != q) advance();
            if (at_end()) fail("unterminated attribute value");
            std::string value;
            append_decoded(value, s_.substr(start, pos_ - start));
            advance();
            el->attributes.emplace_back(std::move(key), std::move(value));
        }
        for (;;) {
            if (at_end()) fail("missing </" + el->name + ">");
            if (starts_with("</")) {
                advance(2);
                const std::string closing = name();
                if (closing != el->name) {
                    fail("mismatched </" + closing + ">, expected </" + el->name + ">");
                }
                skip_ws();
                if (!starts_with(">")) fail("expected '>'");
                advance();
                return el;
            }
            if (starts_with("<!--")) {
                skip_until("-->", "comment");
            } else if (starts_with("<![CDATA[")) {
                advance(9);
                const std::size_t start = pos_;
                while (!at_end() && !starts_with("]]>")) advance();
                if (at_end()) fail("unterminated CDATA");
                el->text.append(s_.substr(start, pos_ - start));
                advance(3);
            } else if (starts_with("<?")) {
                skip_until("?>", "processing instruction");
            } else if (starts_with("<")) {
                el->children.push_back(element());
            } else {
                const std::size_t start = pos_;
                while (!at_end() && s_[pos_] != '<') advance();
                append_decoded(el->text, s_.substr(start, pos_ - start));
            }
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

}  // namespace

std::unique_ptr<Element> parse(std::string_view text) { return Parser(text).document(); }

}  // namespace fisherlens::xml
