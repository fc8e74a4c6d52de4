//==============================================================================
// Copyright (c) 2026 The ewmeval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//==============================================================================
#pragma once

#include <stdexcept>
#include <string>

namespace ewm {

/// Root of every error raised by the library. Callers that only care about
/// "did evaluation fail" catch this; the subclasses let tests and the CLI
/// distinguish the failure class.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor and bundle I/O.
class IoError : public Error {
 public:
  using Error::Error;
};
class ValidationError : public Error {
 public:
  using Error::Error;
};
class FormatError : public Error {
 public:
  using Error::Error;
};
class LengthError : public Error {
 public:
  using Error::Error;
};
class VersionError : public Error {
 public:
  using Error::Error;
};
class ShapeError : public Error {
 public:
  using Error::Error;
};
class ArtifactMissingError : public Error {
 public:
  using Error::Error;
};

// Numeric kernels and metrics.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};
class SampleSizeError : public Error {
 public:
  using Error::Error;
};
class RangeError : public Error {
 public:
  using Error::Error;
};

// Judge gateway.
class ParseError : public Error {
 public:
  using Error::Error;
};
class SchemaError : public Error {
 public:
  using Error::Error;
};
class TransportError : public Error {
 public:
  using Error::Error;
};
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Scoring and reporting.
class IncompleteVectorError : public Error {
 public:
  using Error::Error;
};
class BoundsMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace ewm
