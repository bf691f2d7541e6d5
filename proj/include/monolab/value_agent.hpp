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

#ifndef MONOLAB_VALUE_AGENT_HPP_
#define MONOLAB_VALUE_AGENT_HPP_

#include <memory>
#include <ostream>
#include <set>
#include <utility>

#include "monolab/agent.hpp"
#include "monolab/detection.hpp"
#include "monolab/evaluation.hpp"

namespace monolab {

struct ValueAgentOptions {
  ValueParams params;  // k values, cash_min and tie tolerance are used
  DriftOptions drift;
  double announce_threshold = 0.95;
  double dice_prior = 2.0;
  bool adapt = true;
  bool propose_trades = true;
  std::shared_ptr<std::ostream> trace;  // per-decision JSONL when set
};

// One-step argmax over V with bankruptcy guards. Detector state persists
// across the games of a trial; `known` is the rulebook the agent starts from.
class ValueAgent : public Agent {
 public:
  ValueAgent(BoardSpec known, ValueAgentOptions options = {});

  std::string name() const override { return "value"; }
  void on_game_start(const StateView& view, int game_index) override;
  void on_event(const StateView& view, const GameEvent& event) override;
  void on_game_end(const StateView& view, const GameResult& result) override;
  Move decide(const StateView& view, std::span<const Move> legal) override;
  Move bid(const StateView& view, int square, Money standing,
           std::span<const Move> legal) override;
  Move respond_trade(const StateView& view, const TradeOffer& offer,
                     std::span<const Move> legal) override;
  std::optional<int> announced_novelty() const override { return flag_.announced(); }

  const ValueParams& params() const { return params_; }
  const DiceBeliefs& dice_beliefs() const { return dice_; }
  const std::vector<DeviationEvent>& detections() const { return flag_.history(); }

 private:
  void handle(const std::vector<DeviationEvent>& deviations);
  void write_trace(const StateView& view, const std::vector<CandidateTrace>& c,
                   const Move& chosen);

  BoardSpec known_;
  ValueAgentOptions options_;
  ValueParams params_;
  AttributeTracker tracker_;
  DiceBeliefs dice_;
  NoveltyFlag flag_;
  int game_ = 0;
  std::set<std::pair<int, int>> proposed_;  // (give, receive) this game
};

}  // namespace monolab

#endif  // MONOLAB_VALUE_AGENT_HPP_
