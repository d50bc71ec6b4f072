// Copyright 2026 The dnp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <stdexcept>
#include <string>

namespace dnp {

// Bad caller input: shapes, lengths, out-of-range settings.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed WAV container; the message names the offending chunk.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input sample rate is not the pipeline rate.
class RateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values or a failed numerical precondition. `where` carries the
// layer index or iteration number when one is known, otherwise -1.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, int where = -1)
      : std::runtime_error(what), where_(where) {}
  int where() const noexcept { return where_; }

 private:
  int where_;
};

}  // namespace dnp
