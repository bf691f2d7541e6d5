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

#include "monolab/board.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "monolab/json_util.hpp"

namespace monolab {
namespace {

constexpr std::pair<SquareKind, std::string_view> kSquareKinds[] = {
    {SquareKind::kGo, "go"},
    {SquareKind::kProperty, "property"},
    {SquareKind::kTax, "tax"},
    {SquareKind::kChance, "chance"},
    {SquareKind::kCommunity, "community"},
    {SquareKind::kFreeParking, "free-parking"},
    {SquareKind::kJailVisit, "jail-visit"},
    {SquareKind::kGoToJail, "go-to-jail"},
};

constexpr std::pair<CardEffect, std::string_view> kCardEffects[] = {
    {CardEffect::kMoveTo, "move-to"},
    {CardEffect::kPay, "pay"},
    {CardEffect::kReceive, "receive"},
    {CardEffect::kGoToJail, "go-to-jail"},
    {CardEffect::kPayPerHouse, "pay-per-house"},
};

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw ValidationError(field + ": " + what);
}

void require_non_negative(double value, const std::string& field) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    invalid(field, "must be a finite non-negative number");
  }
}

const Json& require(const Json& object, const char* key,
                    const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw ParseError(where + key + ": missing required key");
  }
  return *it;
}

template <typename T>
T get_as(const Json& value, const std::string& field) {
  try {
    return value.get<T>();
  } catch (const Json::exception&) {
    throw ParseError(field + ": wrong type");
  }
}

template <typename T>
T get_or(const Json& object, const char* key, T fallback,
         const std::string& where) {
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) return fallback;
  return get_as<T>(*it, where + key);
}

CardSpec parse_card(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected object");
  CardSpec card;
  card.effect = card_effect_from_string(
      get_as<std::string>(require(j, "effect", where + "."), where + ".effect"));
  card.square = get_or<int>(j, "square", 0, where + ".");
  card.amount = get_or<double>(j, "amount", 0.0, where + ".");
  card.per_hotel = get_or<double>(j, "per_hotel", 0.0, where + ".");
  card.text = get_or<std::string>(j, "text", "", where + ".");
  return card;
}

Json card_json(const CardSpec& card) {
  Json j;
  j["effect"] = std::string(to_string(card.effect));
  switch (card.effect) {
    case CardEffect::kMoveTo:
      j["square"] = card.square;
      break;
    case CardEffect::kPay:
    case CardEffect::kReceive:
      j["amount"] = money_json(card.amount);
      break;
    case CardEffect::kPayPerHouse:
      j["amount"] = money_json(card.amount);
      j["per_hotel"] = money_json(card.per_hotel);
      break;
    case CardEffect::kGoToJail:
      break;
  }
  j["text"] = card.text;
  return j;
}

SquareSpec parse_square(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected object");
  SquareSpec sq;
  const std::string w = where + ".";
  sq.kind = square_kind_from_string(
      get_as<std::string>(require(j, "kind", w), w + "kind"));
  sq.name = get_or<std::string>(j, "name", "", w);
  if (sq.kind == SquareKind::kProperty) {
    sq.color = get_as<std::string>(require(j, "color", w), w + "color");
    sq.price = get_as<double>(require(j, "price", w), w + "price");
    sq.mortgage_value =
        get_as<double>(require(j, "mortgage_value", w), w + "mortgage_value");
    sq.base_rent = get_as<double>(require(j, "base_rent", w), w + "base_rent");
    sq.monopoly_rent =
        get_as<double>(require(j, "monopoly_rent", w), w + "monopoly_rent");
    sq.house_rents = get_or<std::vector<double>>(j, "house_rents", {}, w);
    auto hotel = j.find("hotel_rent");
    if (hotel != j.end() && !hotel->is_null()) {
      sq.hotel_rent = get_as<double>(*hotel, w + "hotel_rent");
    }
    sq.house_cost = get_or<double>(j, "house_cost", 0.0, w);
  } else if (sq.kind == SquareKind::kTax) {
    sq.amount = get_as<double>(require(j, "amount", w), w + "amount");
  }
  return sq;
}

Json square_json(const SquareSpec& sq) {
  Json j;
  j["kind"] = std::string(to_string(sq.kind));
  j["name"] = sq.name;
  if (sq.kind == SquareKind::kProperty) {
    j["color"] = sq.color;
    j["price"] = money_json(sq.price);
    j["mortgage_value"] = money_json(sq.mortgage_value);
    j["base_rent"] = money_json(sq.base_rent);
    j["monopoly_rent"] = money_json(sq.monopoly_rent);
    Json rents = Json::array();
    for (double r : sq.house_rents) rents.push_back(money_json(r));
    j["house_rents"] = rents;
    j["hotel_rent"] = sq.hotel_rent ? money_json(*sq.hotel_rent) : Json(nullptr);
    j["house_cost"] = money_json(sq.house_cost);
  } else if (sq.kind == SquareKind::kTax) {
    j["amount"] = money_json(sq.amount);
  }
  return j;
}

void validate_deck(const std::vector<CardSpec>& deck, const BoardSpec& board,
                   const std::string& field) {
  for (std::size_t i = 0; i < deck.size(); ++i) {
    const CardSpec& card = deck[i];
    const std::string where = field + "[" + std::to_string(i) + "]";
    require_non_negative(card.amount, where + ".amount");
    require_non_negative(card.per_hotel, where + ".per_hotel");
    if (card.effect == CardEffect::kMoveTo &&
        (card.square < 0 || card.square >= board.size())) {
      invalid(where + ".square", "references square " +
                                     std::to_string(card.square) +
                                     " outside the board");
    }
    if (card.effect == CardEffect::kGoToJail && !board.jail_square()) {
      invalid(where + ".effect", "go-to-jail card on a board without a jail");
    }
  }
}

}  // namespace

std::string_view to_string(SquareKind kind) {
  for (const auto& [k, name] : kSquareKinds) {
    if (k == kind) return name;
  }
  return "unknown";
}

SquareKind square_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kSquareKinds) {
    if (n == name) return k;
  }
  throw ParseError("unknown square kind '" + std::string(name) + "'");
}

std::string_view to_string(CardEffect effect) {
  for (const auto& [e, name] : kCardEffects) {
    if (e == effect) return name;
  }
  return "unknown";
}

CardEffect card_effect_from_string(std::string_view name) {
  for (const auto& [e, n] : kCardEffects) {
    if (n == name) return e;
  }
  throw ParseError("unknown card effect '" + std::string(name) + "'");
}

Money SquareSpec::rent_at(int level, bool monopoly) const {
  if (level <= 0) return monopoly ? monopoly_rent : base_rent;
  const int houses = static_cast<int>(house_rents.size());
  if (level <= houses) return house_rents[level - 1];
  if (hotel_rent) return *hotel_rent;
  return houses > 0 ? house_rents.back() : monopoly_rent;
}

int DiceSpec::min_sum() const {
  int total = 0;
  for (const Die& die : dice) {
    int lo = die.faces.front();
    for (std::size_t i = 0; i < die.faces.size(); ++i) {
      if (die.weights[i] > 0.0) lo = std::min(lo, die.faces[i]);
    }
    total += lo;
  }
  return total;
}

int DiceSpec::max_sum() const {
  int total = 0;
  for (const Die& die : dice) {
    int hi = die.faces.front();
    for (std::size_t i = 0; i < die.faces.size(); ++i) {
      if (die.weights[i] > 0.0) hi = std::max(hi, die.faces[i]);
    }
    total += hi;
  }
  return total;
}

double DiceSpec::expected_sum() const {
  double total = 0.0;
  for (const Die& die : dice) {
    for (std::size_t i = 0; i < die.faces.size(); ++i) {
      total += die.weights[i] * die.faces[i];
    }
  }
  return total;
}

std::map<std::string, std::vector<int>> BoardSpec::colors() const {
  std::map<std::string, std::vector<int>> groups;
  for (int i = 0; i < size(); ++i) {
    if (squares[i].is_property()) groups[squares[i].color].push_back(i);
  }
  return groups;
}

std::vector<int> BoardSpec::color_group(const std::string& color) const {
  std::vector<int> group;
  for (int i = 0; i < size(); ++i) {
    if (squares[i].is_property() && squares[i].color == color) {
      group.push_back(i);
    }
  }
  return group;
}

int BoardSpec::monopoly_size(const std::string& color) const {
  auto it = monopoly_sizes.find(color);
  if (it != monopoly_sizes.end()) return it->second;
  return static_cast<int>(color_group(color).size());
}

std::optional<int> BoardSpec::jail_square() const {
  for (int i = 0; i < size(); ++i) {
    if (squares[i].kind == SquareKind::kJailVisit) return i;
  }
  return std::nullopt;
}

void validate(const BoardSpec& board) {
  if (board.size() < 4) invalid("squares", "a board needs at least 4 squares");
  int go_count = 0;
  bool has_chance = false;
  bool has_community = false;
  bool has_go_to_jail = false;
  for (int i = 0; i < board.size(); ++i) {
    const SquareSpec& sq = board.squares[i];
    const std::string where = "squares[" + std::to_string(i) + "]";
    switch (sq.kind) {
      case SquareKind::kGo:
        ++go_count;
        break;
      case SquareKind::kChance:
        has_chance = true;
        break;
      case SquareKind::kCommunity:
        has_community = true;
        break;
      case SquareKind::kGoToJail:
        has_go_to_jail = true;
        break;
      case SquareKind::kTax:
        require_non_negative(sq.amount, where + ".amount");
        break;
      default:
        break;
    }
    if (!sq.is_property()) continue;
    if (sq.color.empty()) invalid(where + ".color", "property without a color");
    require_non_negative(sq.price, where + ".price");
    require_non_negative(sq.mortgage_value, where + ".mortgage_value");
    require_non_negative(sq.base_rent, where + ".base_rent");
    require_non_negative(sq.monopoly_rent, where + ".monopoly_rent");
    require_non_negative(sq.house_cost, where + ".house_cost");
    if (sq.mortgage_value > sq.price) {
      invalid(where + ".mortgage_value", "exceeds the property price");
    }
    std::vector<Money> schedule{sq.base_rent, sq.monopoly_rent};
    for (std::size_t h = 0; h < sq.house_rents.size(); ++h) {
      require_non_negative(sq.house_rents[h],
                           where + ".house_rents[" + std::to_string(h) + "]");
      schedule.push_back(sq.house_rents[h]);
    }
    if (sq.hotel_rent) {
      require_non_negative(*sq.hotel_rent, where + ".hotel_rent");
      schedule.push_back(*sq.hotel_rent);
    }
    if (!std::is_sorted(schedule.begin(), schedule.end())) {
      invalid(where + ".house_rents", "rent schedule must be non-decreasing");
    }
  }
  if (go_count > 1) invalid("squares", "multiple Go squares");
  if (board.squares[0].kind != SquareKind::kGo) {
    invalid("squares[0].kind", "the Go square must be at index 0");
  }
  if (has_go_to_jail && !board.jail_square()) {
    invalid("squares", "go-to-jail square on a board without a jail square");
  }
  if (has_chance && board.chance_deck.empty()) {
    invalid("chance_deck", "board has chance squares but an empty deck");
  }
  if (has_community && board.community_deck.empty()) {
    invalid("community_deck", "board has community squares but an empty deck");
  }

  require_non_negative(board.go_increment, "go_increment");
  require_non_negative(board.starting_cash, "starting_cash");
  require_non_negative(board.jail_fine, "jail_fine");
  require_non_negative(board.mortgage_interest_rate, "mortgage_interest_rate");
  if (board.bank_houses < 0) invalid("bank_houses", "must be non-negative");
  if (board.bank_hotels < 0) invalid("bank_hotels", "must be non-negative");

  if (board.dice.dice.empty()) invalid("dice", "at least one die is required");
  for (std::size_t d = 0; d < board.dice.dice.size(); ++d) {
    const Die& die = board.dice.dice[d];
    const std::string where = "dice[" + std::to_string(d) + "]";
    if (die.faces.empty()) invalid(where + ".faces", "a die needs faces");
    if (die.weights.size() != die.faces.size()) {
      invalid(where + ".weights", "must have one weight per face");
    }
    std::set<int> distinct(die.faces.begin(), die.faces.end());
    if (distinct.size() != die.faces.size()) {
      invalid(where + ".faces", "face values must be distinct");
    }
    if (*distinct.begin() < 0) invalid(where + ".faces", "negative face value");
    double total = 0.0;
    for (double w : die.weights) {
      if (!(w >= 0.0)) invalid(where + ".weights", "negative weight");
      total += w;
    }
    if (std::fabs(total - 1.0) > 1e-12) {
      invalid(where + ".weights", "weights must sum to 1");
    }
  }

  validate_deck(board.chance_deck, board, "chance_deck");
  validate_deck(board.community_deck, board, "community_deck");

  const auto groups = board.colors();
  for (const auto& [color, required] : board.monopoly_sizes) {
    if (!groups.contains(color)) {
      invalid("monopoly_sizes." + color, "unknown color");
    }
    if (required < 1) invalid("monopoly_sizes." + color, "must be at least 1");
  }
}

BoardSpec parse_board(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed board JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("board: expected a JSON object");

  BoardSpec board;
  board.name = get_or<std::string>(root, "name", "", "");
  const Json& squares = require(root, "squares", "");
  if (!squares.is_array()) throw ParseError("squares: expected array");
  for (std::size_t i = 0; i < squares.size(); ++i) {
    board.squares.push_back(
        parse_square(squares[i], "squares[" + std::to_string(i) + "]"));
  }
  board.go_increment =
      get_as<double>(require(root, "go_increment", ""), "go_increment");
  board.starting_cash = get_or<double>(root, "starting_cash", 1500.0, "");
  board.jail_fine = get_or<double>(root, "jail_fine", 50.0, "");
  board.mortgage_interest_rate = get_as<double>(
      require(root, "mortgage_interest_rate", ""), "mortgage_interest_rate");
  board.bank_houses =
      get_as<int>(require(root, "bank_houses", ""), "bank_houses");
  board.bank_hotels =
      get_as<int>(require(root, "bank_hotels", ""), "bank_hotels");

  const Json& dice = require(root, "dice", "");
  if (!dice.is_array()) throw ParseError("dice: expected array");
  for (std::size_t d = 0; d < dice.size(); ++d) {
    const std::string where = "dice[" + std::to_string(d) + "]";
    Die die;
    die.faces = get_as<std::vector<int>>(require(dice[d], "faces", where + "."),
                                         where + ".faces");
    die.weights = get_as<std::vector<double>>(
        require(dice[d], "weights", where + "."), where + ".weights");
    board.dice.dice.push_back(std::move(die));
  }

  for (const char* key : {"chance_deck", "community_deck"}) {
    const Json& deck = require(root, key, "");
    if (!deck.is_array()) throw ParseError(std::string(key) + ": expected array");
    auto& target = std::string_view(key) == "chance_deck" ? board.chance_deck
                                                          : board.community_deck;
    for (std::size_t i = 0; i < deck.size(); ++i) {
      target.push_back(
          parse_card(deck[i], std::string(key) + "[" + std::to_string(i) + "]"));
    }
  }
  board.monopoly_sizes =
      get_or<std::map<std::string, int>>(root, "monopoly_sizes", {}, "");

  validate(board);
  return board;
}

BoardSpec load_board_spec(std::istream& source) {
  std::ostringstream buffer;
  buffer << source.rdbuf();
  return parse_board(buffer.str());
}

BoardSpec load_board_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open board file '" + path + "'");
  return load_board_spec(in);
}

std::string serialize_board(const BoardSpec& board) {
  Json root;
  root["schema_version"] = kSchemaVersion;
  root["name"] = board.name;
  root["go_increment"] = money_json(board.go_increment);
  root["starting_cash"] = money_json(board.starting_cash);
  root["jail_fine"] = money_json(board.jail_fine);
  root["mortgage_interest_rate"] = board.mortgage_interest_rate;
  root["bank_houses"] = board.bank_houses;
  root["bank_hotels"] = board.bank_hotels;
  Json dice = Json::array();
  for (const Die& die : board.dice.dice) {
    dice.push_back(Json{{"faces", die.faces}, {"weights", die.weights}});
  }
  root["dice"] = dice;
  Json squares = Json::array();
  for (const SquareSpec& sq : board.squares) squares.push_back(square_json(sq));
  root["squares"] = squares;
  for (const auto& [key, deck] :
       {std::pair{"chance_deck", &board.chance_deck},
        std::pair{"community_deck", &board.community_deck}}) {
    Json cards = Json::array();
    for (const CardSpec& card : *deck) cards.push_back(card_json(card));
    root[key] = cards;
  }
  Json sizes = Json::object();
  for (const auto& [color, n] : board.monopoly_sizes) sizes[color] = n;
  root["monopoly_sizes"] = sizes;
  return root.dump(2) + "\n";
}

std::string data_dir() {
  if (const char* env = std::getenv("MONOLAB_DATA")) return env;
  return MONOLAB_DATA_DIR;
}

BoardSpec standard_board() {
  static const BoardSpec board =
      load_board_file(data_dir() + "/standard_board.json");
  return board;
}

BoardSpec tb8_board() {
  static const BoardSpec board = load_board_file(data_dir() + "/tb8.json");
  return board;
}

}  // namespace monolab
