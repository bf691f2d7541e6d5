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

// Shared helpers for the monolab tests: board fixtures, hand-built states and
// a scripted agent.

#ifndef MONOLAB_TESTS_FIXTURES_HPP_
#define MONOLAB_TESTS_FIXTURES_HPP_

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "monolab/agent.hpp"
#include "monolab/board.hpp"
#include "monolab/engine.hpp"
#include "monolab/rng.hpp"

namespace monolab::testing {

inline std::shared_ptr<const BoardSpec> share(BoardSpec board) {
  return std::make_shared<const BoardSpec>(std::move(board));
}

inline std::shared_ptr<const BoardSpec> tb8() {
  static const auto board = share(tb8_board());
  return board;
}

inline std::shared_ptr<const BoardSpec> standard() {
  static const auto board = share(standard_board());
  return board;
}

// TB8 with a die that always shows `face`.
inline BoardSpec tb8_fixed_die(int face) {
  BoardSpec b = tb8_board();
  b.dice.dice = {Die{{face}, {1.0}}};
  return b;
}

inline GameState make_state(std::shared_ptr<const BoardSpec> board, int players,
                            Money cash) {
  GameState s = initial_state(std::move(board), players, 1);
  for (auto& p : s.players) p.cash = cash;
  return s;
}

inline Move find_move(std::span<const Move> moves, MoveKind kind, int square = -1) {
  for (const Move& m : moves) {
    if (m.kind == kind && (square < 0 || m.square == square)) return m;
  }
  throw std::runtime_error("move not offered");
}

inline bool offers(std::span<const Move> moves, MoveKind kind, int square = -1) {
  for (const Move& m : moves) {
    if (m.kind == kind && (square < 0 || m.square == square)) return true;
  }
  return false;
}

// Behaves as configured; by default it declines, passes and ends phases.
class ScriptedAgent : public Agent {
 public:
  std::function<Move(const StateView&, std::span<const Move>)> on_decide;
  std::optional<Money> bid_cap;  // bids the minimum while it stays under the cap
  bool accept_trades = false;
  std::vector<GameEvent> seen;

  std::string name() const override { return "scripted"; }

  void on_event(const StateView&, const GameEvent& event) override {
    seen.push_back(event);
  }

  Move decide(const StateView& view, std::span<const Move> legal) override {
    if (on_decide) return on_decide(view, legal);
    for (const Move& m : legal) {
      if (m.kind == MoveKind::kDeclineBuy || m.kind == MoveKind::kEndPhase) return m;
    }
    return legal.back();
  }

  Move bid(const StateView&, int, Money, std::span<const Move> legal) override {
    if (bid_cap && legal.front().amount <= *bid_cap) return legal.front();
    return legal.back();
  }

  Move respond_trade(const StateView&, const TradeOffer&,
                     std::span<const Move> legal) override {
    return accept_trades ? legal.front() : legal.back();
  }
};

// Empty when the state satisfies the position, even-build and supply rules.
inline std::string invariant_violation(const GameState& s) {
  const BoardSpec& b = s.spec();
  for (const PlayerState& p : s.players) {
    if (p.position < 0 || p.position >= b.size()) {
      return "player " + std::to_string(p.id) + " off the board";
    }
  }
  for (int i = 0; i < b.size(); ++i) {
    if (s.level[i] == 0) continue;
    const int o = s.owner[i];
    if (o < 0 || s.mortgaged[i] || !b.at(i).is_property()) {
      return "improvement on square " + std::to_string(i) + " without a builder";
    }
    if (s.level[i] > b.at(i).max_level()) {
      return "square " + std::to_string(i) + " above its top level";
    }
    for (int j : b.color_group(b.at(i).color)) {
      if (s.owner[j] == o && std::abs(s.level[j] - s.level[i]) > 1) {
        return "uneven build between squares " + std::to_string(i) + " and " +
               std::to_string(j);
      }
    }
  }
  if (s.houses_in_use() > b.bank_houses || s.hotels_in_use() > b.bank_hotels) {
    return "improvement supply exceeded";
  }
  return {};
}

// A random position on `board`: random owners (some left to the bank),
// mortgages, even builds on held sets, positions and cash.
inline GameState random_state(std::shared_ptr<const BoardSpec> board, int players,
                              Rng& rng) {
  GameState s = initial_state(board, players, rng.next());
  const BoardSpec& b = *board;
  for (auto& p : s.players) {
    p.position = static_cast<int>(rng.below(b.size()));
    p.cash = static_cast<Money>(rng.below(60)) * 10;
  }
  for (int i = 0; i < b.size(); ++i) {
    if (!b.at(i).is_property()) continue;
    const std::size_t pick = rng.below(players + 1);
    s.owner[i] = pick == static_cast<std::size_t>(players) ? kBank : static_cast<int>(pick);
  }
  for (const auto& [color, group] : b.colors()) {
    const int o = s.owner[group.front()];
    bool full = o >= 0;
    for (int sq : group) full = full && s.owner[sq] == o;
    if (full && rng.below(2) == 0) {
      const int base = static_cast<int>(rng.below(b.at(group.front()).max_level()));
      for (int sq : group) {
        s.level[sq] = std::min(b.at(sq).max_level(), base + static_cast<int>(rng.below(2)));
      }
      continue;
    }
    for (int sq : group) s.mortgaged[sq] = s.owner[sq] >= 0 && rng.below(4) == 0;
  }
  return s;
}

// A random state paused at a decision for player 0: buy, auction, out-of-turn
// or jail.
inline GameState random_decision_state(std::shared_ptr<const BoardSpec> board,
                                       int players, Rng& rng) {
  GameState s = random_state(board, players, rng);
  const BoardSpec& b = *board;
  std::vector<int> open;
  for (int i = 0; i < b.size(); ++i) {
    if (b.at(i).is_property() && s.owner[i] == kBank) open.push_back(i);
  }
  s.decider = s.current = 0;
  const std::size_t kind = rng.below(4);
  if (kind == 0 && !open.empty()) {
    s.phase = Phase::kBuy;
    s.pending_square = open[rng.below(open.size())];
    s.players[0].position = s.pending_square;
  } else if (kind == 1 && !open.empty()) {
    s.phase = Phase::kAuction;
    s.pending_square = open[rng.below(open.size())];
    s.min_bid = 10 * static_cast<Money>(1 + rng.below(20));
  } else {
    s.phase = rng.below(2) ? Phase::kPostRoll : Phase::kPreRoll;
  }
  return s;
}

// Every money quantity on the board multiplied by `factor`.
inline BoardSpec scale_money(BoardSpec b, double factor) {
  for (auto& sq : b.squares) {
    sq.price *= factor;
    sq.mortgage_value *= factor;
    sq.base_rent *= factor;
    sq.monopoly_rent *= factor;
    for (auto& r : sq.house_rents) r *= factor;
    if (sq.hotel_rent) *sq.hotel_rent *= factor;
    sq.house_cost *= factor;
    sq.amount *= factor;
  }
  b.go_increment *= factor;
  b.starting_cash *= factor;
  b.jail_fine *= factor;
  for (auto* deck : {&b.chance_deck, &b.community_deck}) {
    for (auto& card : *deck) {
      card.amount *= factor;
      card.per_hotel *= factor;
    }
  }
  return b;
}

inline GameState scale_state(const GameState& s, std::shared_ptr<const BoardSpec> board,
                             double factor) {
  GameState out = s;
  out.board = std::move(board);
  for (auto& p : out.players) p.cash *= factor;
  out.min_bid *= factor;
  return out;
}

}  // namespace monolab::testing

#endif  // MONOLAB_TESTS_FIXTURES_HPP_
