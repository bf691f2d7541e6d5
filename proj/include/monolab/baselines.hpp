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

#ifndef MONOLAB_BASELINES_HPP_
#define MONOLAB_BASELINES_HPP_

#include <cstdint>
#include <memory>

#include "monolab/agent.hpp"

namespace monolab {

// Uniform over the offered legal moves, from its own rng stream.
class RandomLegalAgent : public Agent {
 public:
  explicit RandomLegalAgent(std::uint64_t seed) : rng_(seed) {}

  std::string name() const override { return "random"; }
  Move decide(const StateView& view, std::span<const Move> legal) override;
  Move bid(const StateView& view, int square, Money standing,
           std::span<const Move> legal) override;
  Move respond_trade(const StateView& view, const TradeOffer& offer,
                     std::span<const Move> legal) override;

 private:
  Move pick(std::span<const Move> legal);
  Rng rng_;
};

struct SimpleParams {
  Money reserve = 150;
  double bid_fraction = 0.75;
};

// Fixed-rule opponent: buys above a cash reserve, builds on its cheapest set,
// bids up to a fraction of face price, never proposes trades.
class SimpleBaselineAgent : public Agent {
 public:
  explicit SimpleBaselineAgent(SimpleParams params = {}) : params_(params) {}

  std::string name() const override { return "simple"; }
  Move decide(const StateView& view, std::span<const Move> legal) override;
  Move bid(const StateView& view, int square, Money standing,
           std::span<const Move> legal) override;
  Move respond_trade(const StateView& view, const TradeOffer& offer,
                     std::span<const Move> legal) override;

 private:
  SimpleParams params_;
};

std::unique_ptr<Agent> random_legal_agent(std::uint64_t seed);
std::unique_ptr<Agent> simple_baseline_agent(SimpleParams params = {});

}  // namespace monolab

#endif  // MONOLAB_BASELINES_HPP_
