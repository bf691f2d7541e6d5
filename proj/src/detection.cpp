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

#include "monolab/detection.hpp"

#include <algorithm>
#include <cmath>

#include "monolab/novelty.hpp"

namespace monolab {
namespace {

bool differs(double expected, double observed) {
  return std::fabs(expected - observed) > 1e-9 * std::max(1.0, std::fabs(expected));
}

std::string tier_name(const SquareSpec& sq, int level, bool monopoly) {
  if (level <= 0) return monopoly ? "monopoly" : "base";
  if (level <= static_cast<int>(sq.house_rents.size())) {
    return "house" + std::to_string(level);
  }
  return "hotel";
}

// Paths of attributes printed on the board, by square.
std::vector<std::string> square_paths(const SquareSpec& sq, int i) {
  const std::string s = std::to_string(i);
  std::vector<std::string> paths;
  if (sq.kind == SquareKind::kTax) paths.push_back("tax." + s);
  if (!sq.is_property()) return paths;
  paths.push_back("price." + s);
  paths.push_back("rent." + s + ".base");
  paths.push_back("rent." + s + ".monopoly");
  for (std::size_t h = 1; h <= sq.house_rents.size(); ++h) {
    paths.push_back("rent." + s + ".house" + std::to_string(h));
  }
  if (sq.hotel_rent) paths.push_back("rent." + s + ".hotel");
  return paths;
}

bool shortfall(const GameEvent& e) {
  return e.detail.find("shortfall") != std::string::npos;
}

int color_index(const BoardSpec& board, const std::string& color) {
  int i = 0;
  for (const auto& [c, group] : board.colors()) {
    if (c == color) return i;
    ++i;
  }
  return -1;
}

}  // namespace

Json deviation_json(const DeviationEvent& d) {
  Json j;
  j["path"] = d.path;
  j["expected"] = money_json(d.expected);
  j["observed"] = money_json(d.observed);
  j["game"] = d.game;
  j["confidence"] = d.confidence;
  if (!d.detail.empty()) j["detail"] = d.detail;
  return j;
}

AttributeTracker::AttributeTracker(const BoardSpec& known) : known_(known) {
  expected_["go_increment"] = known.go_increment;
  expected_["mortgage_rate"] = known.mortgage_interest_rate;
  expected_["jail_fine"] = known.jail_fine;
  for (int i = 0; i < known.size(); ++i) {
    const SquareSpec& sq = known.at(i);
    for (const auto& path : square_paths(sq, i)) {
      expected_[path] = attribute_value(known, path);
    }
    if (sq.is_property()) {
      expected_["mortgage_value." + std::to_string(i)] = sq.mortgage_value;
      expected_["house_cost." + std::to_string(i)] = sq.house_cost;
    }
  }
  for (const char* deck : {"chance", "community"}) {
    const auto& cards =
        std::string(deck) == "chance" ? known.chance_deck : known.community_deck;
    for (std::size_t i = 0; i < cards.size(); ++i) {
      expected_["card." + std::string(deck) + "." + std::to_string(i) + ".amount"] =
          cards[i].amount;
    }
  }
  for (const auto& [color, group] : known.colors()) {
    expected_["set_size." + color] = known.monopoly_size(color);
  }
}

void AttributeTracker::check(const std::string& path, double expected,
                             double observed, int game,
                             std::vector<DeviationEvent>& out, std::string detail) {
  if (reported_.contains(path) || !differs(expected, observed)) return;
  reported_.insert(path);
  out.push_back({path, expected, observed, game, 1.0, std::move(detail)});
}

std::vector<DeviationEvent> AttributeTracker::observe_state(const BoardSpec& visible,
                                                            int game) {
  std::vector<DeviationEvent> out;
  check("squares.count", known_.size(), visible.size(), game, out);
  check("go_increment", known_.go_increment, visible.go_increment, game, out);
  const int n = std::min(known_.size(), visible.size());
  for (int i = 0; i < n; ++i) {
    const SquareSpec& k = known_.at(i);
    const SquareSpec& v = visible.at(i);
    const std::string s = std::to_string(i);
    if (k.name != v.name || k.kind != v.kind) {
      int from = -1;
      for (int j = 0; j < known_.size(); ++j) {
        if (known_.at(j).name == v.name && known_.at(j).kind == v.kind) from = j;
      }
      check("order." + s, i, from, game, out, k.name + "->" + v.name);
    }
    if (k.is_property() && v.is_property() && k.color != v.color) {
      check("color." + s, color_index(known_, k.color),
            color_index(known_, v.color), game, out, k.color + "->" + v.color);
    }
    for (const auto& path : square_paths(k, i)) {
      double observed;
      try {
        observed = attribute_value(visible, path);
      } catch (const UnknownTargetError&) {
        continue;  // the square changed kind; reported as an order change
      }
      check(path, expected_.at(path), observed, game, out);
    }
  }
  for (const auto& [color, group] : known_.colors()) {
    if (visible.color_group(color).empty()) continue;
    check("set_size." + color, known_.monopoly_size(color),
          visible.monopoly_size(color), game, out);
  }
  return out;
}

std::vector<DeviationEvent> AttributeTracker::observe_outcome(
    const GameState& state, const GameEvent& e, int game) {
  std::vector<DeviationEvent> out;
  const std::string s = std::to_string(e.square);
  auto expect = [&](const std::string& path) -> const double* {
    auto it = expected_.find(path);
    return it == expected_.end() ? nullptr : &it->second;
  };
  auto compare = [&](const std::string& path, double observed) {
    if (const double* x = expect(path)) check(path, *x, observed, game, out);
  };
  // Per-square checks only make sense while the square is the one we know.
  const bool same_square =
      e.square >= 0 && e.square < known_.size() && e.square < state.spec().size() &&
      known_.at(e.square).name == state.spec().at(e.square).name;

  switch (e.kind) {
    case EventKind::kMortgage:
      if (same_square) compare("mortgage_value." + s, e.amount);
      break;
    case EventKind::kUnmortgage: {
      if (!same_square) break;
      const double principal = state.spec().at(e.square).mortgage_value;
      if (principal <= 0) break;
      const double expected = principal * (1.0 + known_.mortgage_interest_rate);
      if (differs(expected, e.amount)) {
        check("mortgage_rate", known_.mortgage_interest_rate,
              e.amount / principal - 1.0, game, out);
      }
      break;
    }
    case EventKind::kImprovement:
      if (same_square) compare("house_cost." + s, e.amount);
      break;
    case EventKind::kImprovementSold:
      if (same_square) compare("house_cost." + s, 2 * e.amount);
      break;
    case EventKind::kGoBonus:
      compare("go_increment", e.amount);
      break;
    case EventKind::kTaxPaid:
      if (same_square && !shortfall(e)) compare("tax." + s, e.amount);
      break;
    case EventKind::kJailRelease:
      if (e.detail == "fine") compare("jail_fine", e.amount);
      break;
    case EventKind::kCardDrawn: {
      if (shortfall(e) || e.other < 0) break;
      const std::string deck = e.detail.substr(0, e.detail.find(':'));
      const auto& cards = deck == "chance" ? known_.chance_deck : known_.community_deck;
      if (e.other >= static_cast<int>(cards.size())) break;
      const CardEffect effect = cards[e.other].effect;
      if (effect != CardEffect::kPay && effect != CardEffect::kReceive) break;
      compare("card." + deck + "." + std::to_string(e.other) + ".amount", e.amount);
      break;
    }
    case EventKind::kRentPaid: {
      if (!same_square || shortfall(e)) break;
      const SquareSpec& sq = known_.at(e.square);
      const int owner = state.owner[e.square];
      if (owner < 0) break;
      int held = 0;
      for (int j = 0; j < known_.size() && j < state.spec().size(); ++j) {
        if (state.owner[j] == owner && known_.at(j).is_property() &&
            known_.at(j).color == sq.color) {
          ++held;
        }
      }
      const bool monopoly = held >= known_.monopoly_size(sq.color);
      const int level = state.level[e.square];
      compare("rent." + s + "." + tier_name(sq, level, monopoly), e.amount);
      break;
    }
    default:
      break;
  }
  return out;
}

long DiceBeliefs::observations(int die) const {
  const DieBelief& b = dice.at(die);
  return std::lround((b.alpha - b.prior).sum());
}

DiceBeliefs make_dice_beliefs(const DiceSpec& known, double prior) {
  DiceBeliefs beliefs;
  beliefs.prior = prior;
  beliefs.expected_count = static_cast<int>(known.dice.size());
  for (const Die& die : known.dice) {
    DieBelief b;
    b.faces = die.faces;
    std::sort(b.faces.begin(), b.faces.end());
    b.prior = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(b.faces.size()), prior);
    b.alpha = b.prior;
    beliefs.dice.push_back(std::move(b));
  }
  return beliefs;
}

void update_dice_beliefs(DiceBeliefs& beliefs, std::span<const int> faces) {
  const int count = static_cast<int>(faces.size());
  if (count != beliefs.expected_count) beliefs.observed_count = count;
  if (count > static_cast<int>(beliefs.dice.size())) beliefs.dice.resize(count);
  for (int d = 0; d < count; ++d) {
    DieBelief& b = beliefs.dice[d];
    const int face = faces[d];
    auto it = std::lower_bound(b.faces.begin(), b.faces.end(), face);
    const auto idx = static_cast<Eigen::Index>(it - b.faces.begin());
    if (it != b.faces.end() && *it == face) {
      b.alpha(idx) += 1.0;
      continue;
    }
    b.extended = true;
    b.faces.insert(it, face);
    const Eigen::Index k = b.alpha.size();
    Eigen::VectorXd alpha(k + 1);
    Eigen::VectorXd prior(k + 1);
    alpha << b.alpha.head(idx), beliefs.prior + 1.0, b.alpha.tail(k - idx);
    prior << b.prior.head(idx), beliefs.prior, b.prior.tail(k - idx);
    b.alpha = std::move(alpha);
    b.prior = std::move(prior);
  }
}

Eigen::VectorXd dice_map_estimate(const DiceBeliefs& beliefs, int die) {
  const DieBelief& b = beliefs.dice.at(die);
  if (b.faces.empty()) throw std::domain_error("die has no observed support");
  return dirichlet_map<double>(b.alpha);
}

DiceSpec map_dice_model(const DiceBeliefs& beliefs) {
  DiceSpec model;
  const int count = beliefs.observed_count.value_or(beliefs.expected_count);
  for (int d = 0; d < count && d < static_cast<int>(beliefs.dice.size()); ++d) {
    const DieBelief& b = beliefs.dice[d];
    if (b.faces.empty()) continue;
    const Eigen::VectorXd p = dice_map_estimate(beliefs, d);
    Die die;
    die.faces = b.faces;
    die.weights.assign(p.data(), p.data() + p.size());
    model.dice.push_back(std::move(die));
  }
  return model;
}

std::vector<DeviationEvent> detect_dice_novelty(const DiceBeliefs& beliefs,
                                                const DiceSpec& known, int game,
                                                const DriftOptions& options) {
  std::vector<DeviationEvent> out;
  if (beliefs.observed_count) {
    out.push_back({"dice.count", static_cast<double>(known.dice.size()),
                   static_cast<double>(*beliefs.observed_count), game, 1.0, {}});
  }
  const int n = std::min<int>(known.dice.size(), beliefs.dice.size());
  for (int d = 0; d < n; ++d) {
    const DieBelief& b = beliefs.dice[d];
    const std::string path = "dice." + std::to_string(d);
    if (b.extended) {
      out.push_back({path + ".faces", static_cast<double>(known.dice[d].faces.size()),
                     static_cast<double>(b.faces.size()), game, 1.0, {}});
      continue;
    }
    const long rolls = beliefs.observations(d);
    if (rolls < options.min_rolls) continue;
    // Known weights in the sorted support order.
    const Die& spec = known.dice[d];
    Eigen::VectorXd q(static_cast<Eigen::Index>(b.faces.size()));
    for (std::size_t i = 0; i < b.faces.size(); ++i) {
      const auto at = std::find(spec.faces.begin(), spec.faces.end(), b.faces[i]);
      q(static_cast<Eigen::Index>(i)) =
          std::max(1e-300, spec.weights[at - spec.faces.begin()]);
    }
    const double kl = kl_divergence<double>(dice_map_estimate(beliefs, d), q);
    if (kl > options.kl_threshold) {
      out.push_back({path + ".weights", 0.0, kl, game,
                     1.0 - std::exp(-static_cast<double>(rolls) * kl), {}});
    }
  }
  return out;
}

void NoveltyFlag::observe(const std::vector<DeviationEvent>& deviations) {
  for (const DeviationEvent& d : deviations) {
    const bool confident = d.confidence >= threshold_;
    const bool seen = std::any_of(history_.begin(), history_.end(), [&](const auto& h) {
      return h.path == d.path && (h.confidence >= threshold_ || !confident);
    });
    if (!seen) history_.push_back(d);
    if (confident && !announced_) announced_ = d.game;
  }
}

ValueParams adapt_params(ValueParams params,
                         const std::vector<DeviationEvent>& detections,
                         const DiceBeliefs* dice) {
  for (const DeviationEvent& d : detections) {
    const std::string& p = d.path;
    if (p == "go_increment") {
      params.go_increment_belief = d.observed;
    } else if (p == "mortgage_rate") {
      params.mortgage_rate_belief = d.observed;
    } else if (p.rfind("dice.", 0) == 0) {
      if (dice) params.dice_model = map_dice_model(*dice);
    } else if (p.rfind("rent.", 0) == 0) {
      const auto dot = p.find('.', 5);
      const int sq = std::stoi(p.substr(5, dot - 5));
      const std::string tier = p.substr(dot + 1);
      if (sq >= static_cast<int>(params.rent_expectations.size())) continue;
      auto& tiers = params.rent_expectations[sq];
      std::size_t idx;
      if (tier == "base") {
        idx = 0;
      } else if (tier == "monopoly") {
        idx = 1;
      } else if (tier == "hotel") {
        idx = tiers.empty() ? 0 : tiers.size() - 1;
      } else {
        idx = 1 + std::stoul(tier.substr(5));
      }
      if (idx < tiers.size()) tiers[idx] = d.observed;
    }
  }
  return params;
}

}  // namespace monolab
