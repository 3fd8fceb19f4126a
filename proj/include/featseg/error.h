/* Copyright 2026 The featseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef FEATSEG_ERROR_H_
#define FEATSEG_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace featseg {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or missing user input: files, manifests, vocabularies, arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

// Non-finite values or a numerical procedure that could not complete.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// No class carries positive total weight, so no representative exists.
class NoActiveClassError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

enum class TensorFormatErrorKind {
  kIo,
  kBadMagic,
  kUnknownDtype,
  kBadRank,
  kZeroDim,
  kTruncatedHeader,
  kTruncatedPayload,
  kTrailingBytes,
  kNonFiniteValue,
  kShapeMismatch,
};

const char* to_string(TensorFormatErrorKind kind);

class TensorFormatError : public InputError {
 public:
  TensorFormatError(TensorFormatErrorKind kind, const std::string& message)
      : InputError(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  TensorFormatErrorKind kind() const { return kind_; }

 private:
  TensorFormatErrorKind kind_;
};

// Raised by write_tensor; carries the flat index of the first bad scalar.
class NonFiniteValueError : public TensorFormatError {
 public:
  NonFiniteValueError(std::size_t index, const std::string& path)
      : TensorFormatError(TensorFormatErrorKind::kNonFiniteValue,
                          "value at index " + std::to_string(index) +
                              " is not finite (" + path + ")"),
        index_(index) {}

  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

}  // namespace featseg

#endif  // FEATSEG_ERROR_H_
