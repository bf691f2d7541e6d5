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

#include <fstream>
#include <sstream>

#include "monolab/board.hpp"
#include "monolab/json_util.hpp"

using namespace monolab;

namespace {

Json tb8_json() { return Json::parse(serialize_board(tb8_board())); }

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("tb8 fixture loads with its declared layout") {
  const BoardSpec b = load_board_file(data_dir() + "/tb8.json");
  CHECK(b.size() == 8);
  const auto colors = b.colors();
  REQUIRE(colors.size() == 2);
  CHECK(colors.at("red") == std::vector<int>{1, 2});
  CHECK(colors.at("blue") == std::vector<int>{4, 6});
  CHECK(b.go_increment == 200);
  REQUIRE(b.dice.dice.size() == 1);
  CHECK(b.dice.dice[0].faces == std::vector<int>{1, 2});
  CHECK(b.dice.dice[0].weights == std::vector<double>{0.5, 0.5});

  CHECK(b.at(1).name == "Red-A");
  CHECK(b.at(1).mortgage_value == 50);
  CHECK(b.at(1).house_rents == std::vector<Money>{30, 60});
  CHECK(b.at(3).kind == SquareKind::kTax);
  CHECK(b.at(3).amount == 50);
  CHECK(b.at(4).price == 200);
  CHECK(b.at(4).house_cost == 100);
  CHECK(b.at(5).kind == SquareKind::kChance);
  CHECK(b.at(7).kind == SquareKind::kFreeParking);
  CHECK_FALSE(b.at(1).hotel_rent.has_value());
}

TEST_CASE("a second Go square fails validation") {
  Json j = tb8_json();
  j["squares"][7] = Json{{"kind", "go"}, {"name", "Go again"}};
  try {
    parse_board(j.dump());
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("multiple Go squares") != std::string::npos);
  }
}

TEST_CASE("bundled standard board has forty squares and 22 color properties") {
  const BoardSpec b = standard_board();
  CHECK(b.size() == 40);
  // Count straight from the data file rather than through the parser.
  const Json raw = Json::parse(read(data_dir() + "/standard_board.json"));
  int colored = 0;
  for (const auto& sq : raw["squares"]) {
    if (sq["kind"] == "property" && !sq["color"].get<std::string>().empty()) ++colored;
  }
  int parsed = 0;
  for (const auto& [color, group] : b.colors()) parsed += static_cast<int>(group.size());
  CHECK(parsed == colored);
  CHECK(colored == 22);
}

TEST_CASE("serialize then parse round-trips exactly") {
  for (const BoardSpec& b : {tb8_board(), standard_board()}) {
    const std::string text = serialize_board(b);
    const BoardSpec again = parse_board(text);
    CHECK(again == b);
    CHECK(serialize_board(again) == text);
  }
}

TEST_CASE("bundled boards pass validation") {
  CHECK_NOTHROW(validate(tb8_board()));
  CHECK_NOTHROW(validate(standard_board()));
}

TEST_CASE("rent tiers index houses then the hotel") {
  SquareSpec sq = tb8_board().at(4);
  CHECK(sq.rent_at(0, false) == 20);
  CHECK(sq.rent_at(0, true) == 40);
  CHECK(sq.rent_at(1, true) == 60);
  CHECK(sq.rent_at(2, true) == 120);
  CHECK(sq.max_level() == 2);
  sq.hotel_rent = 300;
  CHECK(sq.max_level() == 3);
  CHECK(sq.rent_at(3, true) == 300);
}

TEST_CASE("malformed input raises parse errors") {
  CHECK_THROWS_AS(parse_board("{"), ParseError);
  CHECK_THROWS_AS(parse_board("[]"), ParseError);
  Json j = tb8_json();
  j.erase("squares");
  CHECK_THROWS_AS(parse_board(j.dump()), ParseError);
}

TEST_CASE("validation rejects inconsistent boards") {
  SUBCASE("weights must sum to one") {
    Json j = tb8_json();
    j["dice"][0]["weights"] = Json::array({0.5, 0.6});
    CHECK_THROWS_AS(parse_board(j.dump()), ValidationError);
  }
  SUBCASE("Go must open the board") {
    Json j = tb8_json();
    std::swap(j["squares"][0], j["squares"][7]);
    CHECK_THROWS_AS(parse_board(j.dump()), ValidationError);
  }
  SUBCASE("chance squares need a deck") {
    Json j = tb8_json();
    j["chance_deck"] = Json::array();
    CHECK_THROWS_AS(parse_board(j.dump()), ValidationError);
  }
  SUBCASE("rent schedule cannot fall") {
    Json j = tb8_json();
    j["squares"][1]["house_rents"] = Json::array({60, 30});
    CHECK_THROWS_AS(parse_board(j.dump()), ValidationError);
  }
  SUBCASE("monopoly size must name a color") {
    Json j = tb8_json();
    j["monopoly_sizes"] = Json{{"green", 2}};
    CHECK_THROWS_AS(parse_board(j.dump()), ValidationError);
  }
}

TEST_CASE("dice sums") {
  const BoardSpec b = standard_board();
  CHECK(b.dice.min_sum() == 2);
  CHECK(b.dice.max_sum() == 12);
  CHECK(b.dice.expected_sum() == doctest::Approx(7.0));
  CHECK(tb8_board().dice.expected_sum() == doctest::Approx(1.5));
}

TEST_CASE("monopoly size defaults to the group size") {
  BoardSpec b = tb8_board();
  CHECK(b.monopoly_size("red") == 2);
  b.monopoly_sizes["red"] = 1;
  CHECK(b.monopoly_size("red") == 1);
  CHECK_FALSE(b.jail_square().has_value());
  CHECK(standard_board().jail_square().has_value());
}
