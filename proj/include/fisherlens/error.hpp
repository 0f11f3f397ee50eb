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

#include <stdexcept>
#include <string>

namespace fisherlens {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates an operation's precondition.
class ArgumentError : public Error {
public:
    using Error::Error;
};

class BoundsError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

/// Malformed input text (images, cascades, documents).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed cascade using a construct we refuse to evaluate (trees, tilted rects).
class UnsupportedFeatureError : public ParseError {
public:
    using ParseError::ParseError;
};

class SchemaError : public ParseError {
public:
    using ParseError::ParseError;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class RankError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IoError : public Error {
public:
    using Error::Error;
};

class IngestError : public Error {
public:
    using Error::Error;
};

class SplitError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

/// Nothing survived a pipeline stage (no faces, no records).
class EmptyResultError : public Error {
public:
    using Error::Error;
};

class LoadError : public Error {
public:
    enum class Kind { version, truncated, consistency };

    LoadError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace fisherlens
