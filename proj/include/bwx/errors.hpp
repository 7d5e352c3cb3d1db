// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <stdexcept>
#include <string>

namespace bwx {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failures: missing files, unwritable paths, short reads.
struct IoError : Error {
  using Error::Error;
};

// Malformed containers: bad WAV headers, bad weight-file magic/version.
struct FormatError : Error {
  using Error::Error;
};

// Well-formed but outside what we handle (stereo WAV, 24-bit PCM, ...).
struct UnsupportedFormatError : FormatError {
  using FormatError::FormatError;
};

// Tensor/channel/length disagreements between data and a layer or graph.
struct ShapeError : Error {
  using Error::Error;
};

// Invalid layer or graph configuration (bad strides, group counts, ...).
struct ConfigError : Error {
  using Error::Error;
};

// Arguments outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

// Wrong chunk length fed to a streaming executor.
struct SizeError : Error {
  using Error::Error;
};

// Graph cannot be converted to a streaming executor.
struct UnsupportedGraphError : Error {
  using Error::Error;
};

}  // namespace bwx
