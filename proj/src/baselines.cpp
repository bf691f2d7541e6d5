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

#include "monolab/baselines.hpp"

#include <algorithm>

namespace monolab {
namespace {

const Move* find_kind(std::span<const Move> legal, MoveKind kind) {
  for (const Move& m : legal) {
    if (m.kind == kind) return &m;
  }
  return nullptr;
}

}  // namespace

Move RandomLegalAgent::pick(std::span<const Move> legal) {
  return legal[rng_.below(legal.size())];
}

Move RandomLegalAgent::decide(const StateView&, std::span<const Move> legal) {
  return pick(legal);
}

Move RandomLegalAgent::bid(const StateView&, int, Money,
                           std::span<const Move> legal) {
  return pick(legal);
}

Move RandomLegalAgent::respond_trade(const StateView&, const TradeOffer&,
                                     std::span<const Move> legal) {
  return pick(legal);
}

Move SimpleBaselineAgent::decide(const StateView& view,
                                 std::span<const Move> legal) {
  const Money cash = view.self().cash;
  const GameState& s = view.state();
  switch (s.phase) {
    case Phase::kBuy: {
      const Move* buy = find_kind(legal, MoveKind::kBuyProperty);
      if (buy && cash - buy->cost >= params_.reserve) return *buy;
      return *find_kind(legal, MoveKind::kDeclineBuy);
    }
    case Phase::kJail:
      if (const Move* roll = find_kind(legal, MoveKind::kUseRollForJail)) return *roll;
      return legal.front();
    default:
      break;
  }
  if (cash < 0) {
    const Move* cheapest = nullptr;
    for (const Move& m : legal) {
      if (m.kind != MoveKind::kMortgage) continue;
      if (!cheapest || s.spec().at(m.square).price < s.spec().at(cheapest->square).price) {
        cheapest = &m;
      }
    }
    if (cheapest) return *cheapest;
  }
  // Cheapest set first, then lowest square.
  const Move* build = nullptr;
  for (const Move& m : legal) {
    if (m.kind != MoveKind::kImprove || cash - m.cost < params_.reserve) continue;
    if (!build || m.cost < build->cost) build = &m;
  }
  if (build) return *build;
  return *find_kind(legal, MoveKind::kEndPhase);
}

Move SimpleBaselineAgent::bid(const StateView& view, int square, Money,
                              std::span<const Move> legal) {
  const Move* bid = find_kind(legal, MoveKind::kBid);
  const Money cap = params_.bid_fraction * view.board().at(square).price;
  if (bid && bid->amount <= cap && bid->amount <= view.self().cash) return *bid;
  return *find_kind(legal, MoveKind::kPassBid);
}

Move SimpleBaselineAgent::respond_trade(const StateView& view,
                                        const TradeOffer& offer,
                                        std::span<const Move> legal) {
  const BoardSpec& b = view.board();
  const Money received = b.at(offer.give).price + offer.cash;
  const Money given = b.at(offer.receive).price;
  if (received > given) return *find_kind(legal, MoveKind::kAcceptTrade);
  return *find_kind(legal, MoveKind::kRejectTrade);
}

std::unique_ptr<Agent> random_legal_agent(std::uint64_t seed) {
  return std::make_unique<RandomLegalAgent>(seed);
}

std::unique_ptr<Agent> simple_baseline_agent(SimpleParams params) {
  return std::make_unique<SimpleBaselineAgent>(params);
}

}  // namespace monolab
