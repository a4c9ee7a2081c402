// Copyright 2026 The vseg Authors
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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vseg {

/// Root of the error hierarchy. Everything thrown by the library derives
/// from this, so callers can catch one type at tool boundaries.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Precondition violations: dimension mismatches, out-of-range values,
/// malformed arguments.
struct InvalidInputError : Error {
  using Error::Error;
};

/// Operations that require at least one element (valid pixel, scored class)
/// received none.
struct EmptyInputError : Error {
  using Error::Error;
};

/// On-disk format violations (bad magic, truncated payload, undecodable image).
struct FormatError : Error {
  using Error::Error;
};

/// Filesystem-level failures: missing directories, unreadable files.
struct IoError : Error {
  using Error::Error;
};

/// Configuration file failed validation. Maps to CLI exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

/// A VLM answer mentioned none of the candidate class names.
struct UnparseableAnswerError : Error {
  using Error::Error;
};

/// VLM transport failure (connection refused, non-200 status, bad payload).
struct VlmTransportError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Counter-based randomness.
//
// Mask sampling and the test generators need draws that depend only on a key,
// never on call order or thread scheduling. mix64 is the splitmix64 finalizer;
// chaining it over the key components gives a stateless uniform stream.

inline uint64_t mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t a, uint64_t b) { return mix64(a ^ mix64(b)); }

inline uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Uniform draw in the open interval (0, 1) from a 64-bit hash. Midpoints of
/// 2^53 equal bins, so 0.0 and 1.0 are never produced and the Iverson-bracket
/// comparisons v > 0 and v > 1 behave exactly at the ratio extremes.
inline double unit_open(uint64_t h) {
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace vseg
