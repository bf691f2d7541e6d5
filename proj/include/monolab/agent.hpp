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

#ifndef MONOLAB_AGENT_HPP_
#define MONOLAB_AGENT_HPP_

#include <optional>
#include <span>
#include <string>

#include "monolab/engine.hpp"

namespace monolab {

// Read-only window on the game for one seat. Monopoly is open-information so
// the whole state is visible.
class StateView {
 public:
  StateView(const GameState& state, int seat) : state_(&state), seat_(seat) {}

  const GameState& state() const { return *state_; }
  const BoardSpec& board() const { return state_->spec(); }
  const PlayerState& self() const { return state_->players[seat_]; }
  int seat() const { return seat_; }

 private:
  const GameState* state_;
  int seat_;
};

class Agent {
 public:
  virtual ~Agent() = default;

  virtual std::string name() const = 0;

  virtual void on_game_start(const StateView& /*view*/, int /*game_index*/) {}
  virtual void on_event(const StateView& /*view*/, const GameEvent& /*event*/) {}
  virtual void on_game_end(const StateView& /*view*/,
                           const GameResult& /*result*/) {}

  // Must return a member of `legal`.
  virtual Move decide(const StateView& view, std::span<const Move> legal) = 0;

  // `legal` holds the minimum raise and a pass; any bid at or above the
  // minimum is accepted.
  virtual Move bid(const StateView& view, int square, Money standing,
                   std::span<const Move> legal) = 0;

  virtual Move respond_trade(const StateView& view, const TradeOffer& offer,
                             std::span<const Move> legal) = 0;

  // Game index of the agent's novelty announcement in the current trial.
  virtual std::optional<int> announced_novelty() const { return std::nullopt; }
};

}  // namespace monolab

#endif  // MONOLAB_AGENT_HPP_
