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

// State evaluation for the value agent: landing distributions, the four
// value terms, bankruptcy guards and the one-step argmax.

#ifndef MONOLAB_EVALUATION_HPP_
#define MONOLAB_EVALUATION_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "monolab/board.hpp"
#include "monolab/engine.hpp"

namespace monolab {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Entry s is the probability that one roll of all dice sums to s.
template <typename Scalar = double>
VectorX<Scalar> dice_sum_distribution(const DiceSpec& dice) {
  VectorX<Scalar> dist = VectorX<Scalar>::Zero(1);
  dist(0) = Scalar(1);
  for (const Die& die : dice.dice) {
    const int top = *std::max_element(die.faces.begin(), die.faces.end());
    VectorX<Scalar> next = VectorX<Scalar>::Zero(dist.size() + top);
    for (std::size_t f = 0; f < die.faces.size(); ++f) {
      next.segment(die.faces[f], dist.size()) += Scalar(die.weights[f]) * dist;
    }
    dist.swap(next);
  }
  return dist;
}

// Column-stochastic one-turn transition matrix on a cyclic board:
// T(j, i) is the probability of moving from square i to square j.
template <typename Scalar = double>
MatrixX<Scalar> step_matrix(int board_size, const DiceSpec& dice) {
  const VectorX<Scalar> sums = dice_sum_distribution<Scalar>(dice);
  MatrixX<Scalar> t = MatrixX<Scalar>::Zero(board_size, board_size);
  for (int i = 0; i < board_size; ++i) {
    for (Eigen::Index s = 0; s < sums.size(); ++s) {
      if (sums(s) != Scalar(0)) t((i + s) % board_size, i) += sums(s);
    }
  }
  return t;
}

// Column t holds the square distribution after t + 1 turns from `start`.
template <typename Scalar = double>
MatrixX<Scalar> landing_distribution(const MatrixX<Scalar>& step, int start,
                                     int turns) {
  const Eigen::Index n = step.rows();
  MatrixX<Scalar> out(n, turns);
  VectorX<Scalar> p = VectorX<Scalar>::Zero(n);
  p(start) = Scalar(1);
  for (int t = 0; t < turns; ++t) {
    p = step * p;
    out.col(t) = p;
  }
  return out;
}

// Pure dice chain for one player's next k turns; cards and jail ignored.
Eigen::MatrixXd landing_prob(const GameState& state, int player, int k,
                             const DiceSpec& dice);

struct ValueParams {
  int k_short = 5;
  int k_loops = 5;
  Money cash_min = 200;
  // rent_expectations[square][tier]: tier 0 base, 1 monopoly, 1 + level for
  // improvement levels (the hotel is the top level).
  std::vector<std::vector<Money>> rent_expectations;
  Money go_increment_belief = 200;
  double mortgage_rate_belief = 0.1;
  DiceSpec dice_model;
  // Relative tolerance under which two candidate values count as tied.
  double tie_tolerance = 1e-9;
};

// Defaults with every belief read from `board`.
ValueParams params_from_board(const BoardSpec& board);
// Refreshes the rent and Go beliefs from `board`, keeping the rest.
void refresh_visible_beliefs(ValueParams& params, const BoardSpec& board);

int rent_tier(const GameState& state, int square);
// Believed rent a visitor pays on `square` now; 0 when unowned or mortgaged.
Money expected_rent(const GameState& state, const ValueParams& params,
                    int square);

// Landing tables shared by every candidate of one decision; positions and
// dice do not change between post-decision states.
struct EvalContext {
  std::vector<Eigen::VectorXd> short_horizon;  // summed over k_short turns
  std::vector<Eigen::VectorXd> next_turn;
  Eigen::VectorXd roll_sums;
  double expected_sum = 0;
};

EvalContext make_context(const GameState& state, const ValueParams& params);

Money assets_value(const GameState& state, int agent);
Money short_term_gain(const GameState& state, int agent, const ValueParams& params,
                      const EvalContext& ctx);
Money long_term_gain(const GameState& state, int agent, const ValueParams& params,
                     const EvalContext& ctx);
Money monopoly_gain(const GameState& state, int agent, const ValueParams& params,
                    const EvalContext& ctx);

struct ValueTerms {
  Money assets = 0;
  Money short_term = 0;
  Money long_term = 0;
  Money monopoly = 0;
  Money total() const { return assets + short_term + long_term + monopoly; }
};

ValueTerms value_terms(const GameState& state, int agent, const ValueParams& params,
                       const EvalContext& ctx);
Money evaluate_state(const GameState& state, int agent, const ValueParams& params);
Money evaluate_state(const GameState& state, int agent, const ValueParams& params,
                     const EvalContext& ctx);

struct GuardReport {
  Money cost = 0;
  Money next_gain = 0;    // signed one-turn expected rent flow
  Money owed = 0;         // one-turn expected income
  Money worth_scaled = 0; // forced-liquidation proceeds
  Money worst_rent = 0;
  bool condition1 = false;
  bool condition2 = false;
  bool passes() const { return condition1 && condition2; }
};

// Same report for another cost; everything but the conditions is cost-free.
GuardReport with_cost(GuardReport report, Money cost, Money cash,
                      const ValueParams& params);

GuardReport guard_report(const GameState& state, int agent, Money cost,
                         const ValueParams& params, const EvalContext& ctx);
bool passes_guards(const GameState& state, int agent, const Move& move,
                   const ValueParams& params);

// Cash the move costs the agent, using believed rates where they matter.
Money move_cost(const GameState& state, int agent, const Move& move,
                const ValueParams& params);

GameState simulate_move(const GameState& state, int agent, const Move& move,
                        const ValueParams& params);

struct CandidateTrace {
  Move move;
  Money value = 0;
  GuardReport guards;
};

using DecisionTrace = std::function<void(const std::vector<CandidateTrace>&,
                                         const Move& chosen)>;

// Argmax of V over guard-passing candidates; trade proposals are left to the
// rule-based trade logic and never chosen here.
Move choose_move(const GameState& state, int agent, std::span<const Move> legal,
                 const ValueParams& params, const DecisionTrace& trace = {});

// Bid to place now (the minimum acceptable), or nothing to pass.
std::optional<Money> bid_amount(const GameState& state, int agent, int square,
                                Money min_bid, const ValueParams& params);

// Trade rules shared by proposing and responding.
bool completes_set(const GameState& state, int player, int gained_square,
                   int lost_square);
std::optional<TradeOffer> propose_trade(const GameState& state, int agent,
                                        const ValueParams& params);
bool accept_trade(const GameState& state, int agent, const TradeOffer& offer,
                  const ValueParams& params);

}  // namespace monolab

#endif  // MONOLAB_EVALUATION_HPP_
