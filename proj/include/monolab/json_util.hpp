// Copyright 2026 The monolab Authors
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

#ifndef MONOLAB_JSON_UTIL_HPP_
#define MONOLAB_JSON_UTIL_HPP_

#include <cmath>
#include <cstdint>

#include "json.hpp"

namespace monolab {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Integral amounts are written as JSON integers so files stay readable and
// re-serialize byte-identically.
inline Json money_json(double value) {
  if (std::isfinite(value) && value == std::floor(value) &&
      std::fabs(value) < 9.0e15) {
    return static_cast<std::int64_t>(value);
  }
  return value;
}

}  // namespace monolab

#endif  // MONOLAB_JSON_UTIL_HPP_
