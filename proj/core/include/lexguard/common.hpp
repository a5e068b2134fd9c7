// Copyright 2026 The lexguard Authors
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

#ifndef LEXGUARD_COMMON_HPP_
#define LEXGUARD_COMMON_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lexguard {

// Binary safety label. The numeric value doubles as the class index used by
// both classification heads.
enum class Label : std::uint8_t { kSafe = 0, kUnsafe = 1 };

inline constexpr std::size_t kNumClasses = 2;

constexpr std::size_t index(Label label) {
  return static_cast<std::size_t>(label);
}

constexpr Label other(Label label) {
  return label == Label::kSafe ? Label::kUnsafe : Label::kSafe;
}

inline std::string_view to_string(Label label) {
  return label == Label::kSafe ? "safe" : "unsafe";
}

inline std::optional<Label> parse_label(std::string_view text) {
  if (text == "safe") return Label::kSafe;
  if (text == "unsafe") return Label::kUnsafe;
  return std::nullopt;
}

using TokenId = std::uint32_t;

// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data: malformed files, unknown labels, empty texts.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace lexguard

#endif  // LEXGUARD_COMMON_HPP_
