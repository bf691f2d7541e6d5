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

#ifndef MONOLAB_NOVELTY_HPP_
#define MONOLAB_NOVELTY_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "monolab/board.hpp"
#include "monolab/json_util.hpp"
#include "monolab/rng.hpp"

namespace monolab {

class UnknownTargetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoveltyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NoveltyClass { kClass, kAttribute, kRepresentation };
enum class Difficulty { kEasy, kMedium, kHard };

std::string_view to_string(NoveltyClass cls);  // "CN", "AN", "RN"
std::string_view to_string(Difficulty difficulty);
NoveltyClass novelty_class_from_string(std::string_view name);
Difficulty difficulty_from_string(std::string_view name);

// Attribute paths:
//   rent.<sq>.<tier>   tier in base, monopoly, house<h>, hotel
//   price.<sq>  mortgage_value.<sq>  house_cost.<sq>  tax.<sq>
//   go_increment  mortgage_rate  jail_fine
//   card.<chance|community>.<index>.amount
struct AttributeChange {
  std::string path;
  double value = 0;
  bool operator==(const AttributeChange&) const = default;
};

struct SquareSwap {
  int a = -1;
  int b = -1;
  bool operator==(const SquareSwap&) const = default;
};

// New square i holds old square order[i]; Go stays at 0.
struct SquarePermutation {
  std::vector<int> order;
  bool operator==(const SquarePermutation&) const = default;
};

struct ColorReassignment {
  int square = -1;
  std::string color;
  bool operator==(const ColorReassignment&) const = default;
};

struct SetSizeChange {
  std::string color;
  int required = 0;
  bool operator==(const SetSizeChange&) const = default;
};

struct AddDie {
  Die die;
  bool operator==(const AddDie&) const = default;
};

struct RemoveDie {
  int die = 0;
  bool operator==(const RemoveDie&) const = default;
};

// Replaces a die's faces; weights default to uniform when empty.
struct ChangeDieFaces {
  int die = 0;
  std::vector<int> faces;
  std::vector<double> weights;
  bool operator==(const ChangeDieFaces&) const = default;
};

struct ChangeDieWeights {
  int die = 0;
  std::vector<double> weights;
  bool operator==(const ChangeDieWeights&) const = default;
};

using NoveltyPayload =
    std::variant<AttributeChange, SquareSwap, SquarePermutation,
                 ColorReassignment, SetSizeChange, AddDie, RemoveDie,
                 ChangeDieFaces, ChangeDieWeights>;

struct NoveltySpec {
  NoveltyClass cls = NoveltyClass::kAttribute;
  Difficulty difficulty = Difficulty::kEasy;
  // Unset means "draw per trial" in a trial config.
  std::optional<int> trigger_game;
  NoveltyPayload payload;

  bool operator==(const NoveltySpec&) const = default;
};

// Throws UnknownTargetError when the path names nothing on this board.
double attribute_value(const BoardSpec& board, const std::string& path);
void set_attribute(BoardSpec& board, const std::string& path, double value);

// Class implied by a payload kind; a spec whose class disagrees is rejected.
NoveltyClass payload_class(const NoveltyPayload& payload);

void validate_novelty_compat(const BoardSpec& board, const NoveltySpec& novelty);

// Pure: returns the mutated board, re-validated.
BoardSpec inject_novelty(const BoardSpec& board, const NoveltySpec& novelty);

std::string describe(const NoveltySpec& novelty);

Json novelty_json(const NoveltySpec& novelty);
NoveltySpec parse_novelty(const Json& j);
NoveltySpec load_novelty_file(const std::string& path);

// Draws a compatible novelty of the requested class. `state_visible_only`
// restricts attribute novelties to values shown directly on the board.
NoveltySpec generate_novelty(const BoardSpec& board, NoveltyClass cls,
                             Difficulty difficulty, Rng& rng,
                             bool state_visible_only = false);

}  // namespace monolab

#endif  // MONOLAB_NOVELTY_HPP_
