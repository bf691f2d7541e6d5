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

#include <doctest.h>

#include "monolab/detection.hpp"
#include "monolab/evaluation.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace monolab;
using namespace monolab::testing;

namespace {

ValueParams tb8_params(int k_short = 5) {
  ValueParams p = params_from_board(tb8_board());
  p.k_short = k_short;
  return p;
}

// The two-player TB8 position used by the worked examples: we hold Red-A with
// 300 cash and the opponent stands on Go.
GameState red_a_state() {
  GameState s = make_state(tb8(), 2, 500);
  s.players[0].cash = 300;
  s.owner[1] = 0;
  return s;
}

}  // namespace

TEST_CASE("landing distribution on the tb8 die") {
  GameState s = make_state(tb8(), 2, 500);
  const Eigen::MatrixXd land = landing_prob(s, 0, 2, tb8()->dice);
  CHECK(land(1, 0) == doctest::Approx(0.5));
  CHECK(land(2, 0) == doctest::Approx(0.5));
  CHECK(land(2, 1) == doctest::Approx(0.25));
  CHECK(land(3, 1) == doctest::Approx(0.5));
  CHECK(land(4, 1) == doctest::Approx(0.25));
  for (int t = 0; t < 2; ++t) CHECK(land.col(t).sum() == doctest::Approx(1.0));
}

TEST_CASE("a one-face die lands with certainty") {
  GameState s = make_state(share(tb8_fixed_die(3)), 2, 500);
  s.players[1].position = 6;
  const Eigen::MatrixXd land = landing_prob(s, 1, 1, s.spec().dice);
  CHECK(land(1, 0) == 1.0);
  CHECK(land.col(0).sum() == 1.0);
}

TEST_CASE("landing matches roll-sequence enumeration") {
  BoardSpec twelve = tb8_board();
  twelve.squares.resize(12, SquareSpec{SquareKind::kFreeParking, "Rest"});
  twelve.dice.dice = {Die{{1, 2, 3, 4}, {0.1, 0.2, 0.3, 0.4}}, Die{{1, 3}, {0.25, 0.75}}};
  GameState s = make_state(share(twelve), 1, 0);
  for (int start = 0; start < 12; ++start) {
    s.players[0].position = start;
    const Eigen::MatrixXd land = landing_prob(s, 0, 3, twelve.dice);
    const auto ref = oracle::landing_by_sequences(12, start, 3, twelve.dice);
    for (int t = 0; t < 3; ++t) {
      for (int sq = 0; sq < 12; ++sq) CHECK(land(sq, t) == doctest::Approx(ref[t][sq]).epsilon(1e-12));
    }
  }
}

TEST_CASE("asset value counts unmortgaged property and builds at cost") {
  GameState s = make_state(tb8(), 2, 500);
  CHECK(assets_value(s, 0) == 0);
  s.owner[1] = 0;
  s.owner[4] = 0;
  s.mortgaged[4] = 1;
  CHECK(assets_value(s, 0) == 100);
  s.mortgaged[4] = 0;
  s.owner[4] = kBank;
  s.level[1] = 1;
  CHECK(assets_value(s, 0) == 150);
}

TEST_CASE("short-term gain over one turn") {
  const ValueParams p = tb8_params(1);
  GameState s = red_a_state();
  CHECK(short_term_gain(s, 0, p, make_context(s, p)) == doctest::Approx(5.0));
  s.owner[2] = 1;
  CHECK(short_term_gain(s, 0, p, make_context(s, p)) == doctest::Approx(0.0));
  GameState empty = make_state(tb8(), 3, 500);
  for (int k : {1, 3, 5}) {
    const ValueParams pk = tb8_params(k);
    CHECK(short_term_gain(empty, 0, pk, make_context(empty, pk)) == 0);
  }
}

TEST_CASE("long-term gain uses one landing per expected roll") {
  const ValueParams p = tb8_params();
  GameState s = red_a_state();
  CHECK(long_term_gain(s, 0, p, make_context(s, p)) == doctest::Approx(5.0 * 10 / 1.5));
  BoardSpec even = tb8_board();
  even.squares[4].base_rent = 10;
  GameState sym = make_state(share(even), 2, 500);
  sym.owner[1] = 0;
  sym.owner[4] = 1;
  const ValueParams q = params_from_board(even);
  CHECK(long_term_gain(sym, 0, q, make_context(sym, q)) == doctest::Approx(0.0));
  sym.players[1].bankrupt = true;
  CHECK(long_term_gain(sym, 0, q, make_context(sym, q)) == 0);
}

TEST_CASE("monopoly gain completes and builds the red set") {
  const ValueParams p = tb8_params();
  GameState s = red_a_state();
  CHECK(monopoly_gain(s, 0, p, make_context(s, p)) == doctest::Approx(60.0));
  GameState none = make_state(tb8(), 2, 500);
  CHECK(monopoly_gain(none, 0, p, make_context(none, p)) == 0);
}

TEST_CASE("monopoly gain on a held set with no building money") {
  ValueParams p = tb8_params();
  p.go_increment_belief = 0;
  GameState s = make_state(tb8(), 2, 0);
  s.owner[1] = s.owner[2] = 0;
  s.owner[4] = s.owner[6] = 1;
  const EvalContext ctx = make_context(s, p);
  REQUIRE(long_term_gain(s, 0, p, ctx) < -50);
  CHECK(monopoly_gain(s, 0, p, ctx) == doctest::Approx(40.0));
}

TEST_CASE("composite value with a one-turn horizon") {
  const ValueParams p = tb8_params(1);
  const GameState s = red_a_state();
  const ValueTerms t = value_terms(s, 0, p, make_context(s, p));
  CHECK(t.assets == doctest::Approx(100));
  CHECK(t.short_term == doctest::Approx(5));
  CHECK(t.long_term == doctest::Approx(100.0 / 3));
  CHECK(t.monopoly == doctest::Approx(60));
  CHECK(evaluate_state(s, 0, p) == doctest::Approx(198.33).epsilon(1e-4));
}

TEST_CASE("value of an empty position is zero") {
  const GameState s = make_state(tb8(), 4, 500);
  CHECK(evaluate_state(s, 0, tb8_params()) == 0);
}

TEST_CASE("a rent-free property adds at least its price") {
  BoardSpec b = tb8_board();
  b.squares[4].base_rent = b.squares[4].monopoly_rent = 0;
  b.squares[4].house_rents = {0, 0};
  GameState s = make_state(share(b), 2, 300);
  s.owner[1] = 0;
  const ValueParams p = params_from_board(b);
  const Money before = evaluate_state(s, 0, p);
  s.owner[4] = 0;
  CHECK(evaluate_state(s, 0, p) - before >= 200 - 1e-9);
}

TEST_CASE("guard conditions") {
  ValueParams p = tb8_params();
  GuardReport g;
  g.next_gain = -50;
  CHECK_FALSE(with_cost(g, 300, 500, p).condition1);
  CHECK_FALSE(with_cost(g, 300, 500, p).passes());

  g = GuardReport{};
  g.worth_scaled = 50;
  g.worst_rent = 400;
  const GuardReport r = with_cost(g, 100, 500, p);
  CHECK(r.condition1);
  CHECK(r.condition2);
  CHECK(r.passes());

  g = GuardReport{};
  g.worst_rent = 100;
  g.worth_scaled = 50;
  CHECK(with_cost(g, 0, 200, p).passes());
}

TEST_CASE("guard report reads the board") {
  const ValueParams p = tb8_params();
  GameState s = make_state(tb8(), 2, 500);
  s.owner[1] = 0;
  s.owner[2] = 0;
  s.level[1] = s.level[2] = 1;
  s.owner[4] = 1;
  s.players[0].position = 2;
  const GuardReport g = guard_report(s, 0, 0, p, make_context(s, p));
  CHECK(g.worth_scaled == doctest::Approx(150));
  CHECK(g.worst_rent == 20);
  s.players[0].position = 5;
  CHECK(guard_report(s, 0, 0, p, make_context(s, p)).worst_rent == 0);
}

TEST_CASE("cheaper moves of the same kind pass whenever dearer ones do") {
  Rng rng(8);
  const ValueParams p = tb8_params();
  for (int i = 0; i < 200; ++i) {
    const GameState s = random_state(tb8(), 3, rng);
    const GuardReport base = guard_report(s, 0, 0, p, make_context(s, p));
    const Money cost = static_cast<Money>(rng.below(400));
    if (with_cost(base, cost, s.players[0].cash, p).passes()) {
      CHECK(with_cost(base, cost / 2, s.players[0].cash, p).passes());
    }
  }
}

TEST_CASE("simulated moves touch only their direct effects") {
  const ValueParams p = tb8_params();
  GameState s = make_state(tb8(), 2, 500);
  GameState after = simulate_move(s, 0, {MoveKind::kBuyProperty, 1, 0, 100, {}}, p);
  CHECK(after.players[0].cash == 400);
  CHECK(after.owner[1] == 0);
  CHECK(s.owner[1] == kBank);

  after = simulate_move(s, 0, Move{}, p);
  CHECK(after.players == s.players);
  CHECK(after.owner == s.owner);

  s.owner[1] = 0;
  after = simulate_move(s, 0, {MoveKind::kMortgage, 1, 0, 0, {}}, p);
  CHECK(after.players[0].cash == 550);
  CHECK(after.mortgaged[1]);
}

TEST_CASE("choose_move buys when the value is higher and the guards hold") {
  const ValueParams p = tb8_params(1);
  GameState s = make_state(tb8(), 2, 400);
  s.players[0].position = 1;
  s.phase = Phase::kBuy;
  s.pending_square = 1;
  const auto legal = legal_moves(s, 0);
  const Money v_buy = evaluate_state(simulate_move(s, 0, legal[0], p), 0, p);
  CHECK(v_buy == doctest::Approx(198.33).epsilon(1e-4));
  CHECK(choose_move(s, 0, legal, p).kind == MoveKind::kBuyProperty);

  s.players[0].cash = 250;
  CHECK(choose_move(s, 0, legal, p).kind == MoveKind::kDeclineBuy);
}

TEST_CASE("when every move fails the guards the zero-cost move wins") {
  const ValueParams p = tb8_params();
  GameState s = make_state(tb8(), 2, 10);
  s.owner[1] = 0;
  s.owner[2] = 1;
  s.owner[4] = s.owner[6] = 1;
  s.level[4] = s.level[6] = 2;
  s.phase = Phase::kPostRoll;
  const std::vector<Move> legal{{MoveKind::kEndPhase, -1, 0, 0, {}},
                                {MoveKind::kMortgage, 1, 0, 0, {}}};
  const GuardReport base = guard_report(s, 0, 0, p, make_context(s, p));
  REQUIRE_FALSE(base.passes());
  CHECK(choose_move(s, 0, legal, p).kind == MoveKind::kEndPhase);
}

TEST_CASE("ties break by move kind then square") {
  ValueParams p = tb8_params();
  p.tie_tolerance = 1e9;
  GameState s = make_state(tb8(), 2, 5000);
  s.owner[1] = s.owner[2] = 0;
  s.phase = Phase::kPostRoll;
  const auto legal = legal_moves(s, 0);
  const Move m = choose_move(s, 0, legal, p);
  CHECK(m.kind == MoveKind::kImprove);
  CHECK(m.square == 1);
  CHECK(choose_move(s, 0, legal, p) == m);
}

TEST_CASE("short-term gain flips sign when two players swap places") {
  Rng rng(21);
  const ValueParams p = tb8_params();
  for (int i = 0; i < 100; ++i) {
    GameState s = random_state(tb8(), 2, rng);
    GameState swapped = s;
    std::swap(swapped.players[0].position, swapped.players[1].position);
    for (int sq = 0; sq < 8; ++sq) {
      if (s.owner[sq] >= 0) swapped.owner[sq] = 1 - s.owner[sq];
    }
    CHECK(short_term_gain(swapped, 0, p, make_context(swapped, p)) ==
          doctest::Approx(-short_term_gain(s, 0, p, make_context(s, p))));
  }
}

TEST_CASE("each term scales with the money on the board") {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const GameState s = random_state(tb8(), 3, rng);
    const ValueParams p = tb8_params();
    const ValueTerms base = value_terms(s, 0, p, make_context(s, p));
    for (double lambda : {0.5, 3.0}) {
      auto board = share(scale_money(tb8_board(), lambda));
      const GameState t = scale_state(s, board, lambda);
      const ValueParams q = params_from_board(*board);
      const ValueTerms scaled = value_terms(t, 0, q, make_context(t, q));
      CHECK(scaled.assets == doctest::Approx(lambda * base.assets));
      CHECK(scaled.short_term == doctest::Approx(lambda * base.short_term));
      CHECK(scaled.long_term == doctest::Approx(lambda * base.long_term));
      CHECK(scaled.monopoly == doctest::Approx(lambda * base.monopoly));
    }
  }
}

TEST_CASE("monopoly gain is zero without property and never drops with more") {
  Rng rng(13);
  const ValueParams p = tb8_params();
  for (int i = 0; i < 200; ++i) {
    GameState s = random_state(tb8(), 2, rng);
    const auto held = s.properties_of(0);
    const Money before = monopoly_gain(s, 0, p, make_context(s, p));
    if (held.empty()) CHECK(before == 0);
    for (int sq : {1, 2, 4, 6}) {
      if (s.owner[sq] == 0 || s.level[sq] > 0) continue;
      GameState more = s;
      more.owner[sq] = 0;
      more.mortgaged[sq] = 0;
      bool built = false;
      for (int other : s.spec().color_group(s.spec().at(sq).color)) built |= s.level[other] > 0;
      if (built) continue;
      // Compare with every other quantity fixed, including the long-term term.
      const Money lt = long_term_gain(s, 0, p, make_context(s, p));
      const Money lt_more = long_term_gain(more, 0, p, make_context(more, p));
      if (lt_more < lt) continue;
      CHECK(monopoly_gain(more, 0, p, make_context(more, p)) >= before - 1e-9);
    }
  }
}

TEST_CASE("evaluation agrees with the straight-line oracle") {
  Rng rng(99);
  for (int i = 0; i < 20; ++i) {
    const int players = 2 + static_cast<int>(rng.below(3));
    const GameState s = random_state(tb8(), players, rng);
    const ValueParams p = tb8_params();
    const oracle::Terms ref = oracle::value_terms(s, 0, p.k_short, p.k_loops);
    CHECK(evaluate_state(s, 0, p) == doctest::Approx(ref.total()).epsilon(1e-12));
  }
}

TEST_CASE("detections feed the believed attributes") {
  const ValueParams p = tb8_params();
  const ValueParams rent = adapt_params(p, {DeviationEvent{"rent.1.base", 10, 40, 3}});
  CHECK(rent.rent_expectations[1][0] == 40);
  CHECK(rent.rent_expectations[2][0] == 10);

  const ValueParams go = adapt_params(p, {DeviationEvent{"go_increment", 200, 0, 3}});
  CHECK(go.go_increment_belief == 0);
  GameState s = red_a_state();
  s.players[0].cash = 0;
  CHECK(monopoly_gain(s, 0, p, make_context(s, p)) == doctest::Approx(60));
  CHECK(monopoly_gain(s, 0, go, make_context(s, go)) == doctest::Approx(5));

  const ValueParams same = adapt_params(p, {});
  CHECK(same.rent_expectations == p.rent_expectations);
  CHECK(same.go_increment_belief == p.go_increment_belief);
  CHECK(same.mortgage_rate_belief == p.mortgage_rate_belief);
  CHECK(same.dice_model == p.dice_model);
}
