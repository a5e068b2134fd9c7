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

#ifndef LEXGUARD_STOPWORDS_HPP_
#define LEXGUARD_STOPWORDS_HPP_

#include <span>
#include <string_view>

namespace lexguard {

// Fixed 150-word English stopword list used for unigram overlap and by the
// mock labeling client.
std::span<const std::string_view> stopwords();
bool is_stopword(std::string_view word);

// True for single-character non-alphanumeric ASCII words.
bool is_punctuation(std::string_view word);

}  // namespace lexguard

#endif  // LEXGUARD_STOPWORDS_HPP_
