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

#ifndef MONOLAB_BOARD_HPP_
#define MONOLAB_BOARD_HPP_

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace monolab {

using Money = double;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a structurally parsed board violates an invariant. The message
// always starts with the offending field path.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SquareKind {
  kGo,
  kProperty,
  kTax,
  kChance,
  kCommunity,
  kFreeParking,
  kJailVisit,
  kGoToJail,
};

std::string_view to_string(SquareKind kind);
SquareKind square_kind_from_string(std::string_view name);

struct SquareSpec {
  SquareKind kind = SquareKind::kFreeParking;
  std::string name;

  // Property fields.
  Money price = 0;
  Money mortgage_value = 0;
  std::string color;
  Money base_rent = 0;
  Money monopoly_rent = 0;
  std::vector<Money> house_rents;  // house_rents[h - 1] is the rent with h houses
  std::optional<Money> hotel_rent;
  Money house_cost = 0;

  // Tax field.
  Money amount = 0;

  bool is_property() const { return kind == SquareKind::kProperty; }

  // Highest improvement level. A hotel, when present, is one level above the
  // last house tier.
  int max_level() const {
    return static_cast<int>(house_rents.size()) + (hotel_rent ? 1 : 0);
  }

  // Rent charged at an improvement level. Level 0 uses the monopoly tier when
  // the owner holds the color set.
  Money rent_at(int level, bool monopoly) const;

  bool operator==(const SquareSpec&) const = default;
};

enum class CardEffect { kMoveTo, kPay, kReceive, kGoToJail, kPayPerHouse };

std::string_view to_string(CardEffect effect);
CardEffect card_effect_from_string(std::string_view name);

struct CardSpec {
  CardEffect effect = CardEffect::kReceive;
  int square = 0;       // kMoveTo
  Money amount = 0;     // kPay, kReceive; per house for kPayPerHouse
  Money per_hotel = 0;  // kPayPerHouse
  std::string text;

  bool operator==(const CardSpec&) const = default;
};

struct Die {
  std::vector<int> faces;
  std::vector<double> weights;

  bool operator==(const Die&) const = default;
};

struct DiceSpec {
  std::vector<Die> dice;

  int min_sum() const;
  int max_sum() const;
  double expected_sum() const;

  bool operator==(const DiceSpec&) const = default;
};

struct BoardSpec {
  std::string name;
  std::vector<SquareSpec> squares;
  Money go_increment = 200;
  Money starting_cash = 1500;
  Money jail_fine = 50;
  double mortgage_interest_rate = 0.1;
  int bank_houses = 32;
  int bank_hotels = 12;
  DiceSpec dice;
  std::vector<CardSpec> chance_deck;
  std::vector<CardSpec> community_deck;
  // Number of owned properties of a color needed for a monopoly, when it
  // differs from the size of the color group.
  std::map<std::string, int> monopoly_sizes;

  int size() const { return static_cast<int>(squares.size()); }
  const SquareSpec& at(int square) const { return squares.at(square); }

  // Color -> property square indices, ascending.
  std::map<std::string, std::vector<int>> colors() const;
  std::vector<int> color_group(const std::string& color) const;
  int monopoly_size(const std::string& color) const;
  std::optional<int> jail_square() const;

  bool operator==(const BoardSpec&) const = default;
};

// Throws ValidationError naming the first violated invariant.
void validate(const BoardSpec& board);

BoardSpec parse_board(std::string_view text);
BoardSpec load_board_spec(std::istream& source);
BoardSpec load_board_file(const std::string& path);
std::string serialize_board(const BoardSpec& board);

// Bundled data files.
std::string data_dir();
BoardSpec standard_board();
BoardSpec tb8_board();

}  // namespace monolab

#endif  // MONOLAB_BOARD_HPP_
