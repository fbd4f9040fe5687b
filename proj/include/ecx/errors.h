// Copyright 2026 The ecx Authors.
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

#ifndef ECX_ERRORS_H_
#define ECX_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ecx {

// Violated precondition of a numeric or structural operation (shape
// mismatch, axis out of range, even kernel length).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed user-supplied data: empty annotations, bad labels, duplicate ids.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure reported by a pluggable backend (encoder, head, generator).
// `payload` carries the raw reply when one was received.
class BackendError : public std::runtime_error {
 public:
  BackendError(const std::string& what, std::string payload = {})
      : std::runtime_error(what), payload_(std::move(payload)) {}
  const std::string& payload() const { return payload_; }

 private:
  std::string payload_;
};

enum class FormatErrorCode {
  kBadMagic = 1,
  kTruncated = 2,
  kBadRank = 3,
  kLengthMismatch = 4,
  kIo = 5,
};

const char* FormatErrorCodeName(FormatErrorCode code);

// Binary container could not be decoded. `offset` is the byte position at
// which decoding stopped.
class FormatError : public std::runtime_error {
 public:
  FormatError(FormatErrorCode code, std::uint64_t offset,
              const std::string& what)
      : std::runtime_error(what), code_(code), offset_(offset) {}
  FormatErrorCode code() const { return code_; }
  std::uint64_t offset() const { return offset_; }

 private:
  FormatErrorCode code_;
  std::uint64_t offset_;
};

}  // namespace ecx

#endif  // ECX_ERRORS_H_
