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

#include <cmath>

#include "monolab/detection.hpp"
#include "monolab/novelty.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace monolab;
using namespace monolab::testing;

namespace {

GameEvent event(EventKind kind, int square, Money amount, std::string detail = {}) {
  GameEvent e;
  e.kind = kind;
  e.player = 0;
  e.square = square;
  e.amount = amount;
  e.detail = std::move(detail);
  return e;
}

}  // namespace

TEST_CASE("state observation reports a changed rent once") {
  AttributeTracker tracker(tb8_board());
  BoardSpec visible = tb8_board();
  CHECK(tracker.observe_state(visible, 0).empty());

  visible.squares[1].base_rent = 40;
  const auto found = tracker.observe_state(visible, 4);
  REQUIRE(found.size() == 1);
  CHECK(found[0] == DeviationEvent{"rent.1.base", 10, 40, 4, 1.0, {}});

  visible.squares[1].base_rent = 45;
  CHECK(tracker.observe_state(visible, 5).empty());
  CHECK(tracker.reported("rent.1.base"));
}

TEST_CASE("state observation sees reordered squares and recolored ones") {
  SUBCASE("swap") {
    AttributeTracker tracker(tb8_board());
    const BoardSpec swapped =
        inject_novelty(tb8_board(), {NoveltyClass::kRepresentation, Difficulty::kEasy, 0,
                                     SquareSwap{1, 4}});
    const auto found = tracker.observe_state(swapped, 2);
    REQUIRE_FALSE(found.empty());
    CHECK(found[0].path == "order.1");
  }
  SUBCASE("color") {
    AttributeTracker tracker(tb8_board());
    BoardSpec recolored = tb8_board();
    recolored.squares[2].color = "blue";
    const auto found = tracker.observe_state(recolored, 2);
    bool color = false;
    for (const auto& d : found) color |= d.path == "color.2";
    CHECK(color);
  }
  SUBCASE("set size") {
    AttributeTracker tracker(tb8_board());
    BoardSpec smaller = tb8_board();
    smaller.monopoly_sizes["blue"] = 1;
    const auto found = tracker.observe_state(smaller, 2);
    REQUIRE(found.size() == 1);
    CHECK(found[0].path == "set_size.blue");
    CHECK(found[0].observed == 1);
  }
}

TEST_CASE("outcome observation compares cash flows") {
  AttributeTracker tracker(tb8_board());
  const GameState s = make_state(tb8(), 2, 500);

  const auto mortgage = tracker.observe_outcome(s, event(EventKind::kMortgage, 1, 60), 3);
  REQUIRE(mortgage.size() == 1);
  CHECK(mortgage[0].path == "mortgage_value.1");
  CHECK(mortgage[0].expected == 50);
  CHECK(mortgage[0].observed == 60);

  const auto go = tracker.observe_outcome(s, event(EventKind::kGoBonus, 0, 150), 3);
  REQUIRE(go.size() == 1);
  CHECK(go[0].path == "go_increment");
  CHECK(go[0].expected == 200);
  CHECK(go[0].observed == 150);

  CHECK(tracker.observe_outcome(s, event(EventKind::kMortgage, 4, 100), 3).empty());
  CHECK(tracker.observe_outcome(s, event(EventKind::kTaxPaid, 3, 50), 3).empty());
  CHECK(tracker.observe_outcome(s, event(EventKind::kTaxPaid, 3, 20, "shortfall"), 3).empty());
}

TEST_CASE("outcome observation reads rent at the owner's tier") {
  AttributeTracker tracker(tb8_board());
  GameState s = make_state(tb8(), 2, 500);
  s.owner[1] = s.owner[2] = 1;
  CHECK(tracker.observe_outcome(s, event(EventKind::kRentPaid, 1, 20), 0).empty());
  const auto found = tracker.observe_outcome(s, event(EventKind::kRentPaid, 1, 10), 0);
  REQUIRE(found.size() == 1);
  CHECK(found[0].path == "rent.1.monopoly");

  s.owner[2] = kBank;
  CHECK(tracker.observe_outcome(s, event(EventKind::kRentPaid, 2, 10), 0).empty());
}

TEST_CASE("unmortgage cost reveals the interest rate") {
  AttributeTracker tracker(tb8_board());
  const GameState s = make_state(tb8(), 2, 500);
  CHECK(tracker.observe_outcome(s, event(EventKind::kUnmortgage, 1, 55), 0).empty());
  const auto found = tracker.observe_outcome(s, event(EventKind::kUnmortgage, 1, 60), 0);
  REQUIRE(found.size() == 1);
  CHECK(found[0].path == "mortgage_rate");
  CHECK(found[0].observed == doctest::Approx(0.2));
}

TEST_CASE("dice beliefs count observed faces") {
  const DiceSpec die = tb8_board().dice;
  DiceBeliefs b = make_dice_beliefs(die);
  CHECK(b.dice[0].alpha == Eigen::Vector2d(2, 2));
  const int one[] = {1};
  update_dice_beliefs(b, one);
  CHECK(b.dice[0].alpha == Eigen::Vector2d(3, 2));

  DiceBeliefs ten = make_dice_beliefs(die);
  for (int i = 0; i < 10; ++i) update_dice_beliefs(ten, one);
  CHECK(ten.dice[0].alpha == Eigen::Vector2d(12, 2));
  CHECK(ten.observations(0) == 10);
}

TEST_CASE("an unseen face extends the support") {
  DiceBeliefs b = make_dice_beliefs(tb8_board().dice);
  const int three[] = {3};
  update_dice_beliefs(b, three);
  CHECK(b.dice[0].faces == std::vector<int>{1, 2, 3});
  CHECK(b.dice[0].extended);
  const auto found = detect_dice_novelty(b, tb8_board().dice, 7);
  REQUIRE(found.size() == 1);
  CHECK(found[0].path == "dice.0.faces");
  CHECK(found[0].confidence == 1.0);
}

TEST_CASE("a second die in the roll is a count deviation") {
  DiceBeliefs b = make_dice_beliefs(tb8_board().dice);
  const int pair[] = {1, 2};
  update_dice_beliefs(b, pair);
  const auto found = detect_dice_novelty(b, tb8_board().dice, 2);
  REQUIRE_FALSE(found.empty());
  CHECK(found[0].path == "dice.count");
  CHECK(found[0].observed == 2);
}

TEST_CASE("posterior mode in closed form") {
  Eigen::VectorXd alpha = Eigen::VectorXd::Constant(6, 2.0);
  alpha(0) += 10;
  CHECK(dirichlet_map<double>(alpha)(0) == doctest::Approx(11.0 / 16));
  CHECK(dirichlet_map<double>(Eigen::VectorXd::Constant(4, 2.0))(2) == doctest::Approx(0.25));
  const Eigen::VectorXd two = dirichlet_map<double>(Eigen::Vector2d(3, 2));
  CHECK(two(0) == doctest::Approx(2.0 / 3));
  CHECK(two(1) == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(dirichlet_map<double>(Eigen::Vector2d(1, 1)), std::domain_error);
}

TEST_CASE("posterior mode agrees with a grid search") {
  for (const std::vector<double> alpha :
       {std::vector<double>{3, 2}, {12, 2}, {5, 9, 2}, {2.5, 7, 4}}) {
    const auto ref = oracle::dirichlet_mode_grid(alpha);
    const Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(alpha.data(), alpha.size());
    const Eigen::VectorXd mode = dirichlet_map<double>(a);
    CHECK(mode.sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      CHECK(std::fabs(mode(static_cast<Eigen::Index>(i)) - ref[i]) < 1e-6);
    }
  }
}

TEST_CASE("a heavily biased die drifts past the threshold") {
  DiceBeliefs b = make_dice_beliefs(tb8_board().dice);
  const int one[] = {1};
  for (int i = 0; i < 100; ++i) update_dice_beliefs(b, one);
  const Eigen::VectorXd mode = dice_map_estimate(b, 0);
  CHECK(mode(0) == doctest::Approx(101.0 / 102));
  CHECK(mode(1) == doctest::Approx(1.0 / 102));
  const double p = 101.0 / 102;
  const double q = 1.0 / 102;
  const double kl = p * std::log(2 * p) + q * std::log(2 * q);
  const auto found = detect_dice_novelty(b, tb8_board().dice, 9);
  REQUIRE(found.size() == 1);
  CHECK(found[0].path == "dice.0.weights");
  CHECK(found[0].observed == doctest::Approx(kl));
  CHECK(found[0].observed > 0.02);
  CHECK(found[0].confidence == doctest::Approx(1.0 - std::exp(-100 * kl)));
}

TEST_CASE("too few rolls never trigger drift") {
  DiceBeliefs b = make_dice_beliefs(tb8_board().dice);
  const int one[] = {1};
  for (int i = 0; i < 59; ++i) update_dice_beliefs(b, one);
  CHECK(detect_dice_novelty(b, tb8_board().dice, 0).empty());
}

TEST_CASE("the MAP dice model follows the evidence") {
  DiceBeliefs b = make_dice_beliefs(tb8_board().dice);
  const int two[] = {2};
  for (int i = 0; i < 8; ++i) update_dice_beliefs(b, two);
  const DiceSpec model = map_dice_model(b);
  REQUIRE(model.dice.size() == 1);
  CHECK(model.dice[0].weights[0] == doctest::Approx(0.1));
  CHECK(model.dice[0].weights[1] == doctest::Approx(0.9));
  ValueParams p = params_from_board(tb8_board());
  p = adapt_params(p, {DeviationEvent{"dice.0.weights", 0, 0.5, 1}}, &b);
  CHECK(p.dice_model == model);
}

TEST_CASE("the flag announces the first confident deviation") {
  NoveltyFlag flag;
  flag.observe({});
  CHECK_FALSE(flag.announced());
  flag.observe({DeviationEvent{"dice.0.weights", 0, 0.03, 12, 0.5}});
  CHECK_FALSE(flag.announced());
  flag.observe({DeviationEvent{"rent.1.base", 10, 40, 57, 1.0}});
  REQUIRE(flag.announced());
  CHECK(*flag.announced() == 57);
  flag.observe({DeviationEvent{"go_increment", 200, 100, 80, 1.0}});
  CHECK(*flag.announced() == 57);
  CHECK(flag.history().size() == 3);
}

TEST_CASE("exact detectors stay silent through clean games") {
  AttributeTracker tracker(tb8_board());
  std::vector<DeviationEvent> found;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<std::unique_ptr<Agent>> owned;
    GameOptions options;
    options.max_rounds = 80;
    options.observer = [&](const GameState& s, const GameEvent& e) {
      for (auto& d : tracker.observe_outcome(s, e, 0)) found.push_back(d);
    };
    for (int i = 0; i < 3; ++i) owned.push_back(std::make_unique<ScriptedAgent>());
    auto* seat0 = dynamic_cast<ScriptedAgent*>(owned[0].get());
    seat0->on_decide = [](const StateView&, std::span<const Move> legal) {
      return legal.front();
    };
    seat0->bid_cap = 100;
    std::vector<Agent*> seats{owned[0].get(), owned[1].get(), owned[2].get()};
    play_game(seats, tb8_board(), nullptr, seed, options);
    for (auto& d : tracker.observe_state(tb8_board(), 0)) found.push_back(d);
  }
  CHECK(found.empty());
}
