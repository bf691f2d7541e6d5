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

#include "monolab/novelty.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace monolab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<std::string> split(const std::string& path) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(path);
  while (std::getline(in, part, '.')) parts.push_back(part);
  return parts;
}

[[noreturn]] void unknown(const std::string& what) {
  throw UnknownTargetError("unknown target: " + what);
}

int parse_index(const std::string& text, int limit, const std::string& path) {
  if (text.empty() ||
      !std::all_of(text.begin(), text.end(),
                   [](char c) { return c >= '0' && c <= '9'; })) {
    unknown(path);
  }
  const long value = std::stol(text);
  if (value >= limit) unknown(path);
  return static_cast<int>(value);
}

// Locates the number an attribute path refers to.
double* locate(BoardSpec& board, const std::string& path) {
  const auto parts = split(path);
  if (parts.empty()) unknown(path);
  const std::string& head = parts[0];
  if (parts.size() == 1) {
    if (head == "go_increment") return &board.go_increment;
    if (head == "mortgage_rate") return &board.mortgage_interest_rate;
    if (head == "jail_fine") return &board.jail_fine;
    unknown(path);
  }
  if (head == "card") {
    if (parts.size() != 4 || parts[3] != "amount") unknown(path);
    std::vector<CardSpec>* deck = nullptr;
    if (parts[1] == "chance") deck = &board.chance_deck;
    if (parts[1] == "community") deck = &board.community_deck;
    if (deck == nullptr) unknown(path);
    CardSpec& card = (*deck)[parse_index(parts[2], static_cast<int>(deck->size()), path)];
    if (card.effect != CardEffect::kPay && card.effect != CardEffect::kReceive &&
        card.effect != CardEffect::kPayPerHouse) {
      unknown(path);
    }
    return &card.amount;
  }
  const int sq = parse_index(parts[1], board.size(), path);
  SquareSpec& square = board.squares[sq];
  if (head == "tax") {
    if (parts.size() != 2 || square.kind != SquareKind::kTax) unknown(path);
    return &square.amount;
  }
  if (!square.is_property()) unknown(path);
  if (parts.size() == 2) {
    if (head == "price") return &square.price;
    if (head == "mortgage_value") return &square.mortgage_value;
    if (head == "house_cost") return &square.house_cost;
    unknown(path);
  }
  if (head != "rent" || parts.size() != 3) unknown(path);
  const std::string& tier = parts[2];
  if (tier == "base") return &square.base_rent;
  if (tier == "monopoly") return &square.monopoly_rent;
  if (tier == "hotel") {
    if (!square.hotel_rent) unknown(path);
    return &*square.hotel_rent;
  }
  if (tier.rfind("house", 0) == 0) {
    const int h = parse_index(tier.substr(5), static_cast<int>(square.house_rents.size()) + 1, path);
    if (h == 0) unknown(path);
    return &square.house_rents[h - 1];
  }
  unknown(path);
}

void check_die_index(const BoardSpec& board, int die) {
  if (die < 0 || die >= static_cast<int>(board.dice.dice.size())) {
    unknown("die " + std::to_string(die));
  }
}

void check_square(const BoardSpec& board, int square) {
  if (square < 0 || square >= board.size()) {
    unknown("square " + std::to_string(square));
  }
}

std::vector<double> uniform_weights(std::size_t n) {
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  // Push rounding residue into the last face so the sum is exactly 1.
  double rest = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) rest -= w[i];
  if (n > 0) w.back() = rest;
  return w;
}

BoardSpec permute(const BoardSpec& board, const std::vector<int>& order) {
  const int n = board.size();
  if (static_cast<int>(order.size()) != n) {
    throw NoveltyError("permutation must list every square");
  }
  std::vector<int> where(n, -1);
  for (int i = 0; i < n; ++i) {
    if (order[i] < 0 || order[i] >= n || where[order[i]] != -1) {
      throw NoveltyError("permutation is not a bijection");
    }
    where[order[i]] = i;
  }
  if (order[0] != 0) throw NoveltyError("permutation must keep Go at 0");
  BoardSpec out = board;
  for (int i = 0; i < n; ++i) out.squares[i] = board.squares[order[i]];
  for (auto* deck : {&out.chance_deck, &out.community_deck}) {
    for (CardSpec& card : *deck) {
      if (card.effect == CardEffect::kMoveTo) card.square = where[card.square];
    }
  }
  return out;
}

std::vector<int> swap_order(int n, int a, int b) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::swap(order[a], order[b]);
  return order;
}

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

template <typename T>
std::string join(const std::vector<T>& items) {
  std::string s = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += ",";
    s += fmt(static_cast<double>(items[i]));
  }
  return s + "]";
}

Json weights_json(const std::vector<double>& weights) {
  Json j = Json::array();
  for (double w : weights) j.push_back(w);
  return j;
}

}  // namespace

std::string_view to_string(NoveltyClass cls) {
  switch (cls) {
    case NoveltyClass::kClass:
      return "CN";
    case NoveltyClass::kAttribute:
      return "AN";
    case NoveltyClass::kRepresentation:
      return "RN";
  }
  return "?";
}

std::string_view to_string(Difficulty difficulty) {
  switch (difficulty) {
    case Difficulty::kEasy:
      return "easy";
    case Difficulty::kMedium:
      return "medium";
    case Difficulty::kHard:
      return "hard";
  }
  return "?";
}

NoveltyClass novelty_class_from_string(std::string_view name) {
  if (name == "CN") return NoveltyClass::kClass;
  if (name == "AN") return NoveltyClass::kAttribute;
  if (name == "RN") return NoveltyClass::kRepresentation;
  throw ParseError("class: unknown novelty class '" + std::string(name) + "'");
}

Difficulty difficulty_from_string(std::string_view name) {
  if (name == "easy") return Difficulty::kEasy;
  if (name == "medium") return Difficulty::kMedium;
  if (name == "hard") return Difficulty::kHard;
  throw ParseError("difficulty: unknown difficulty '" + std::string(name) + "'");
}

double attribute_value(const BoardSpec& board, const std::string& path) {
  return *locate(const_cast<BoardSpec&>(board), path);
}

void set_attribute(BoardSpec& board, const std::string& path, double value) {
  *locate(board, path) = value;
}

NoveltyClass payload_class(const NoveltyPayload& payload) {
  return std::visit(
      Overloaded{
          [](const AttributeChange&) { return NoveltyClass::kAttribute; },
          [](const SquareSwap&) { return NoveltyClass::kRepresentation; },
          [](const SquarePermutation&) { return NoveltyClass::kRepresentation; },
          [](const ColorReassignment&) { return NoveltyClass::kRepresentation; },
          [](const auto&) { return NoveltyClass::kClass; },
      },
      payload);
}

void validate_novelty_compat(const BoardSpec& board, const NoveltySpec& novelty) {
  if (payload_class(novelty.payload) != novelty.cls) {
    throw NoveltyError("class " + std::string(to_string(novelty.cls)) +
                       " does not match the payload kind");
  }
  if (novelty.trigger_game && *novelty.trigger_game < 0) {
    throw NoveltyError("trigger_game must be non-negative");
  }
  std::visit(
      Overloaded{
          [&](const AttributeChange& c) {
            attribute_value(board, c.path);
            if (!std::isfinite(c.value) || c.value < 0) {
              throw NoveltyError(c.path + ": value must be non-negative");
            }
          },
          [&](const SquareSwap& s) {
            check_square(board, s.a);
            check_square(board, s.b);
            if (s.a == 0 || s.b == 0) throw NoveltyError("Go cannot be moved");
          },
          [&](const SquarePermutation& p) {
            for (int sq : p.order) check_square(board, sq);
            permute(board, p.order);
          },
          [&](const ColorReassignment& r) {
            check_square(board, r.square);
            if (!board.at(r.square).is_property()) {
              unknown("square " + std::to_string(r.square) + " has no color");
            }
            if (r.color.empty()) throw NoveltyError("color must be non-empty");
          },
          [&](const SetSizeChange& s) {
            const auto group = board.color_group(s.color);
            if (group.empty()) unknown("color " + s.color);
            if (s.required < 1 || s.required > static_cast<int>(group.size())) {
              throw NoveltyError("set size for " + s.color + " must be in 1.." +
                                 std::to_string(group.size()));
            }
          },
          [&](const AddDie& a) {
            if (a.die.faces.empty()) throw NoveltyError("new die has no faces");
          },
          [&](const RemoveDie& r) {
            check_die_index(board, r.die);
            if (board.dice.dice.size() < 2) {
              throw NoveltyError("cannot remove the only die");
            }
          },
          [&](const ChangeDieFaces& c) {
            check_die_index(board, c.die);
            if (c.faces.empty()) throw NoveltyError("die needs faces");
          },
          [&](const ChangeDieWeights& c) {
            check_die_index(board, c.die);
            if (c.weights.size() != board.dice.dice[c.die].faces.size()) {
              throw NoveltyError("one weight per face required");
            }
          },
      },
      novelty.payload);
}

BoardSpec inject_novelty(const BoardSpec& board, const NoveltySpec& novelty) {
  validate_novelty_compat(board, novelty);
  BoardSpec out = std::visit(
      Overloaded{
          [&](const AttributeChange& c) {
            BoardSpec b = board;
            set_attribute(b, c.path, c.value);
            return b;
          },
          [&](const SquareSwap& s) {
            return permute(board, swap_order(board.size(), s.a, s.b));
          },
          [&](const SquarePermutation& p) { return permute(board, p.order); },
          [&](const ColorReassignment& r) {
            BoardSpec b = board;
            const std::string old = b.squares[r.square].color;
            b.squares[r.square].color = r.color;
            if (b.color_group(old).empty()) b.monopoly_sizes.erase(old);
            return b;
          },
          [&](const SetSizeChange& s) {
            BoardSpec b = board;
            b.monopoly_sizes[s.color] = s.required;
            return b;
          },
          [&](const AddDie& a) {
            BoardSpec b = board;
            Die die = a.die;
            if (die.weights.empty()) die.weights = uniform_weights(die.faces.size());
            b.dice.dice.push_back(std::move(die));
            return b;
          },
          [&](const RemoveDie& r) {
            BoardSpec b = board;
            b.dice.dice.erase(b.dice.dice.begin() + r.die);
            return b;
          },
          [&](const ChangeDieFaces& c) {
            BoardSpec b = board;
            Die& die = b.dice.dice[c.die];
            die.faces = c.faces;
            die.weights =
                c.weights.empty() ? uniform_weights(c.faces.size()) : c.weights;
            return b;
          },
          [&](const ChangeDieWeights& c) {
            BoardSpec b = board;
            b.dice.dice[c.die].weights = c.weights;
            return b;
          },
      },
      novelty.payload);
  try {
    validate(out);
  } catch (const ValidationError& e) {
    throw NoveltyError(std::string("novelty leaves an invalid board: ") +
                       e.what());
  }
  return out;
}

std::string describe(const NoveltySpec& novelty) {
  std::string body = std::visit(
      Overloaded{
          [](const AttributeChange& c) { return c.path + "=" + fmt(c.value); },
          [](const SquareSwap& s) {
            return "swap " + std::to_string(s.a) + "<->" + std::to_string(s.b);
          },
          [](const SquarePermutation& p) { return "permute " + join(p.order); },
          [](const ColorReassignment& r) {
            return "color." + std::to_string(r.square) + "=" + r.color;
          },
          [](const SetSizeChange& s) {
            return "set_size." + s.color + "=" + std::to_string(s.required);
          },
          [](const AddDie& a) { return "add die " + join(a.die.faces); },
          [](const RemoveDie& r) { return "remove die " + std::to_string(r.die); },
          [](const ChangeDieFaces& c) {
            return "die." + std::to_string(c.die) + ".faces=" + join(c.faces);
          },
          [](const ChangeDieWeights& c) {
            return "die." + std::to_string(c.die) + ".weights=" + join(c.weights);
          },
      },
      novelty.payload);
  return std::string(to_string(novelty.cls)) + "/" +
         std::string(to_string(novelty.difficulty)) + " " + body;
}

Json novelty_json(const NoveltySpec& novelty) {
  Json j;
  j["class"] = std::string(to_string(novelty.cls));
  j["difficulty"] = std::string(to_string(novelty.difficulty));
  j["trigger_game"] =
      novelty.trigger_game ? Json(*novelty.trigger_game) : Json(nullptr);
  j["payload"] = std::visit(
      Overloaded{
          [](const AttributeChange& c) {
            return Json{{"kind", "attribute"},
                        {"path", c.path},
                        {"value", money_json(c.value)}};
          },
          [](const SquareSwap& s) {
            return Json{{"kind", "swap"}, {"a", s.a}, {"b", s.b}};
          },
          [](const SquarePermutation& p) {
            return Json{{"kind", "permutation"}, {"order", p.order}};
          },
          [](const ColorReassignment& r) {
            return Json{{"kind", "recolor"}, {"square", r.square}, {"color", r.color}};
          },
          [](const SetSizeChange& s) {
            return Json{{"kind", "set_size"}, {"color", s.color}, {"required", s.required}};
          },
          [](const AddDie& a) {
            return Json{{"kind", "add_die"},
                        {"faces", a.die.faces},
                        {"weights", weights_json(a.die.weights)}};
          },
          [](const RemoveDie& r) { return Json{{"kind", "remove_die"}, {"die", r.die}}; },
          [](const ChangeDieFaces& c) {
            return Json{{"kind", "die_faces"},
                        {"die", c.die},
                        {"faces", c.faces},
                        {"weights", weights_json(c.weights)}};
          },
          [](const ChangeDieWeights& c) {
            return Json{{"kind", "die_weights"},
                        {"die", c.die},
                        {"weights", weights_json(c.weights)}};
          },
      },
      novelty.payload);
  return j;
}

NoveltySpec parse_novelty(const Json& j) {
  if (!j.is_object()) throw ParseError("novelty: expected object");
  auto field = [&](const Json& obj, const char* key,
                   const std::string& where) -> const Json& {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + key + ": missing required key");
    return *it;
  };
  try {
    NoveltySpec spec;
    spec.cls = novelty_class_from_string(field(j, "class", "").get<std::string>());
    spec.difficulty = difficulty_from_string(
        j.value("difficulty", std::string("easy")));
    if (auto it = j.find("trigger_game"); it != j.end() && !it->is_null()) {
      spec.trigger_game = it->get<int>();
    }
    const Json& p = field(j, "payload", "");
    const std::string kind = field(p, "kind", "payload.").get<std::string>();
    auto weights = [&] {
      return p.value("weights", std::vector<double>{});
    };
    if (kind == "attribute") {
      spec.payload = AttributeChange{field(p, "path", "payload.").get<std::string>(),
                                     field(p, "value", "payload.").get<double>()};
    } else if (kind == "swap") {
      spec.payload = SquareSwap{field(p, "a", "payload.").get<int>(),
                                field(p, "b", "payload.").get<int>()};
    } else if (kind == "permutation") {
      spec.payload = SquarePermutation{field(p, "order", "payload.").get<std::vector<int>>()};
    } else if (kind == "recolor") {
      spec.payload = ColorReassignment{field(p, "square", "payload.").get<int>(),
                                       field(p, "color", "payload.").get<std::string>()};
    } else if (kind == "set_size") {
      spec.payload = SetSizeChange{field(p, "color", "payload.").get<std::string>(),
                                   field(p, "required", "payload.").get<int>()};
    } else if (kind == "add_die") {
      spec.payload = AddDie{Die{field(p, "faces", "payload.").get<std::vector<int>>(),
                                weights()}};
    } else if (kind == "remove_die") {
      spec.payload = RemoveDie{field(p, "die", "payload.").get<int>()};
    } else if (kind == "die_faces") {
      spec.payload = ChangeDieFaces{field(p, "die", "payload.").get<int>(),
                                    field(p, "faces", "payload.").get<std::vector<int>>(),
                                    weights()};
    } else if (kind == "die_weights") {
      spec.payload = ChangeDieWeights{field(p, "die", "payload.").get<int>(), weights()};
    } else {
      throw ParseError("payload.kind: unknown payload kind '" + kind + "'");
    }
    return spec;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("novelty: ") + e.what());
  }
}

NoveltySpec load_novelty_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open novelty file");
  try {
    return parse_novelty(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": malformed novelty JSON: " + e.what());
  }
}

namespace {

double scale_for(Difficulty difficulty, Rng& rng) {
  // Harder novelties are subtler changes.
  static constexpr double kEasy[] = {0.25, 3.0};
  static constexpr double kMedium[] = {0.5, 2.0};
  static constexpr double kHard[] = {0.8, 1.25};
  const double* pick = difficulty == Difficulty::kEasy     ? kEasy
                       : difficulty == Difficulty::kMedium ? kMedium
                                                           : kHard;
  return pick[rng.below(2)];
}

std::vector<std::string> attribute_paths(const BoardSpec& board,
                                         bool visible_only) {
  std::vector<std::string> paths{"go_increment"};
  for (int i = 0; i < board.size(); ++i) {
    const SquareSpec& sq = board.squares[i];
    const std::string s = std::to_string(i);
    if (sq.kind == SquareKind::kTax) paths.push_back("tax." + s);
    if (!sq.is_property()) continue;
    paths.push_back("price." + s);
    paths.push_back("rent." + s + ".base");
    paths.push_back("rent." + s + ".monopoly");
    for (std::size_t h = 1; h <= sq.house_rents.size(); ++h) {
      paths.push_back("rent." + s + ".house" + std::to_string(h));
    }
    if (sq.hotel_rent) paths.push_back("rent." + s + ".hotel");
    if (!visible_only) {
      paths.push_back("mortgage_value." + s);
      paths.push_back("house_cost." + s);
    }
  }
  if (!visible_only) {
    paths.push_back("mortgage_rate");
    paths.push_back("jail_fine");
    for (const char* deck : {"chance", "community"}) {
      const auto& cards = std::string(deck) == "chance" ? board.chance_deck
                                                        : board.community_deck;
      for (std::size_t i = 0; i < cards.size(); ++i) {
        const CardEffect e = cards[i].effect;
        if (e == CardEffect::kPay || e == CardEffect::kReceive) {
          paths.push_back("card." + std::string(deck) + "." + std::to_string(i) +
                          ".amount");
        }
      }
    }
  }
  return paths;
}

NoveltyPayload draw_attribute(const BoardSpec& board, Difficulty difficulty,
                              Rng& rng, bool visible_only) {
  const auto paths = attribute_paths(board, visible_only);
  const std::string& path = paths[rng.below(paths.size())];
  const double old = attribute_value(board, path);
  const double scale = scale_for(difficulty, rng);
  double value = path == "mortgage_rate" ? old * scale : std::round(old * scale);
  if (value == old) value = old + (path == "mortgage_rate" ? 0.05 : 10.0);
  return AttributeChange{path, value};
}

NoveltyPayload draw_representation(const BoardSpec& board, Difficulty difficulty,
                                   Rng& rng) {
  const int n = board.size();
  std::vector<int> props;
  for (int i = 0; i < n; ++i) {
    if (board.squares[i].is_property()) props.push_back(i);
  }
  if (difficulty == Difficulty::kMedium && props.size() >= 2) {
    const auto colors = board.colors();
    const int sq = props[rng.below(props.size())];
    std::vector<std::string> others;
    for (const auto& [color, group] : colors) {
      if (color != board.squares[sq].color) others.push_back(color);
    }
    if (!others.empty()) {
      return ColorReassignment{sq, others[rng.below(others.size())]};
    }
  }
  if (difficulty == Difficulty::kHard) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<int>(order).subspan(1));
    return SquarePermutation{order};
  }
  int a = 1 + static_cast<int>(rng.below(n - 1));
  int b = a;
  while (b == a) b = 1 + static_cast<int>(rng.below(n - 1));
  return SquareSwap{std::min(a, b), std::max(a, b)};
}

NoveltyPayload draw_class(const BoardSpec& board, Difficulty difficulty,
                          Rng& rng) {
  const auto& dice = board.dice.dice;
  switch (difficulty) {
    case Difficulty::kEasy: {
      if (rng.below(2) == 0 || dice.size() < 2) {
        return AddDie{Die{dice[0].faces, uniform_weights(dice[0].faces.size())}};
      }
      return RemoveDie{static_cast<int>(rng.below(dice.size()))};
    }
    case Difficulty::kMedium: {
      std::vector<std::string> candidates;
      for (const auto& [color, group] : board.colors()) {
        if (group.size() >= 2) candidates.push_back(color);
      }
      if (!candidates.empty()) {
        const std::string& color = candidates[rng.below(candidates.size())];
        return SetSizeChange{color, board.monopoly_size(color) - 1};
      }
      [[fallthrough]];
    }
    case Difficulty::kHard:
      break;
  }
  const int d = static_cast<int>(rng.below(dice.size()));
  if (rng.below(2) == 0) {
    std::vector<int> faces = dice[d].faces;
    faces.push_back(*std::max_element(faces.begin(), faces.end()) + 1);
    return ChangeDieFaces{d, faces, {}};
  }
  // Double the weight of one face, renormalised.
  std::vector<double> w = dice[d].weights;
  w[rng.below(w.size())] *= 2.0;
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  double rest = 1.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) rest -= w[i];
  w.back() = rest;
  return ChangeDieWeights{d, w};
}

}  // namespace

NoveltySpec generate_novelty(const BoardSpec& board, NoveltyClass cls,
                             Difficulty difficulty, Rng& rng,
                             bool state_visible_only) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    NoveltySpec spec;
    spec.cls = cls;
    spec.difficulty = difficulty;
    switch (cls) {
      case NoveltyClass::kAttribute:
        spec.payload = draw_attribute(board, difficulty, rng, state_visible_only);
        break;
      case NoveltyClass::kRepresentation:
        spec.payload = draw_representation(board, difficulty, rng);
        break;
      case NoveltyClass::kClass:
        spec.payload = draw_class(board, difficulty, rng);
        break;
    }
    try {
      if (!(inject_novelty(board, spec) == board)) return spec;
    } catch (const NoveltyError&) {
    } catch (const UnknownTargetError&) {
    }
  }
  throw NoveltyError("could not draw a valid novelty for this board");
}

}  // namespace monolab
