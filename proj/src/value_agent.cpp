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

#include "monolab/value_agent.hpp"

#include <limits>

namespace monolab {
namespace {

const Move* find_kind(std::span<const Move> legal, MoveKind kind) {
  for (const Move& m : legal) {
    if (m.kind == kind) return &m;
  }
  return nullptr;
}

}  // namespace

ValueAgent::ValueAgent(BoardSpec known, ValueAgentOptions options)
    : known_(std::move(known)),
      options_(std::move(options)),
      tracker_(known_),
      dice_(make_dice_beliefs(known_.dice, options_.dice_prior)),
      flag_(options_.announce_threshold) {
  const ValueParams& base = options_.params;
  params_ = params_from_board(known_);
  params_.k_short = base.k_short;
  params_.k_loops = base.k_loops;
  params_.cash_min = base.cash_min;
  params_.tie_tolerance = base.tie_tolerance;
}

void ValueAgent::on_game_start(const StateView& view, int game_index) {
  game_ = game_index;
  proposed_.clear();
  refresh_visible_beliefs(params_, view.board());
  handle(tracker_.observe_state(view.board(), game_));
}

void ValueAgent::on_event(const StateView& view, const GameEvent& event) {
  if (event.kind == EventKind::kRoll) {
    update_dice_beliefs(dice_, event.faces);
    // Structural checks only; drift is judged once per game.
    DriftOptions structural = options_.drift;
    structural.min_rolls = std::numeric_limits<long>::max();
    handle(detect_dice_novelty(dice_, known_.dice, game_, structural));
    return;
  }
  handle(tracker_.observe_outcome(view.state(), event, game_));
}

void ValueAgent::on_game_end(const StateView&, const GameResult&) {
  handle(detect_dice_novelty(dice_, known_.dice, game_, options_.drift));
}

void ValueAgent::handle(const std::vector<DeviationEvent>& deviations) {
  if (deviations.empty()) return;
  flag_.observe(deviations);
  if (!options_.adapt) return;
  std::vector<DeviationEvent> confident;
  for (const auto& d : deviations) {
    if (d.confidence >= options_.announce_threshold) confident.push_back(d);
  }
  if (!confident.empty()) params_ = adapt_params(std::move(params_), confident, &dice_);
}

Move ValueAgent::decide(const StateView& view, std::span<const Move> legal) {
  const GameState& s = view.state();
  if (options_.propose_trades && s.phase == Phase::kPreRoll &&
      find_kind(legal, MoveKind::kProposeTrade)) {
    if (auto offer = propose_trade(s, view.seat(), params_)) {
      if (!proposed_.contains({offer->give, offer->receive})) {
        proposed_.insert({offer->give, offer->receive});
        Move m{MoveKind::kProposeTrade, offer->give, 0,
               std::max<Money>(0, offer->cash), *offer};
        if (is_legal(s, view.seat(), m)) return m;
      }
    }
  }
  DecisionTrace trace;
  if (options_.trace) {
    trace = [&](const std::vector<CandidateTrace>& c, const Move& chosen) {
      write_trace(view, c, chosen);
    };
  }
  return choose_move(s, view.seat(), legal, params_, trace);
}

Move ValueAgent::bid(const StateView& view, int square, Money,
                     std::span<const Move> legal) {
  const Move* min = find_kind(legal, MoveKind::kBid);
  if (min) {
    if (auto amount = bid_amount(view.state(), view.seat(), square, min->amount, params_)) {
      return Move{MoveKind::kBid, square, *amount, *amount, {}};
    }
  }
  return *find_kind(legal, MoveKind::kPassBid);
}

Move ValueAgent::respond_trade(const StateView& view, const TradeOffer& offer,
                               std::span<const Move> legal) {
  if (accept_trade(view.state(), view.seat(), offer, params_)) {
    return *find_kind(legal, MoveKind::kAcceptTrade);
  }
  return *find_kind(legal, MoveKind::kRejectTrade);
}

void ValueAgent::write_trace(const StateView& view,
                             const std::vector<CandidateTrace>& candidates,
                             const Move& chosen) {
  Json line;
  line["game"] = game_;
  line["round"] = view.state().round;
  line["seat"] = view.seat();
  line["phase"] = std::string(to_string(view.state().phase));
  line["move"] = describe(chosen);
  Json list = Json::array();
  for (const auto& c : candidates) {
    list.push_back({{"move", describe(c.move)},
                    {"V", c.value},
                    {"cost", c.guards.cost},
                    {"condition1", c.guards.condition1},
                    {"condition2", c.guards.condition2}});
  }
  line["candidates"] = std::move(list);
  *options_.trace << line.dump() << '\n';
}

}  // namespace monolab
