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

#include "monolab/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace monolab {
namespace {

std::vector<Money> tier_table(const SquareSpec& sq) {
  std::vector<Money> tiers{sq.base_rent, sq.monopoly_rent};
  tiers.insert(tiers.end(), sq.house_rents.begin(), sq.house_rents.end());
  if (sq.hotel_rent) tiers.push_back(*sq.hotel_rent);
  return tiers;
}

Money believed_rent(const ValueParams& params, const BoardSpec& board,
                    int square, int tier) {
  if (square < static_cast<int>(params.rent_expectations.size())) {
    const auto& tiers = params.rent_expectations[square];
    if (tier < static_cast<int>(tiers.size())) return tiers[tier];
    if (!tiers.empty()) return tiers.back();
  }
  const SquareSpec& sq = board.at(square);
  return tier <= 1 ? sq.rent_at(0, tier == 1) : sq.rent_at(tier - 1, true);
}

// Column p holds the believed rent of every square owned by player p.
Eigen::MatrixXd rent_table(const GameState& state, const ValueParams& params) {
  const int n = state.spec().size();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, state.num_players());
  for (int i = 0; i < n; ++i) {
    if (state.owner[i] >= 0) r(i, state.owner[i]) = expected_rent(state, params, i);
  }
  return r;
}

bool solvent_opponent(const GameState& state, int agent, int g) {
  return g != agent && !state.players[g].bankrupt;
}

// Σ over opponents of (their landings on our rents − our landings on theirs).
Money rent_flow(const GameState& state, int agent, const Eigen::MatrixXd& rents,
                const std::vector<Eigen::VectorXd>& landing, Money* income) {
  Money in = 0;
  Money out = 0;
  for (int g = 0; g < state.num_players(); ++g) {
    if (!solvent_opponent(state, agent, g)) continue;
    in += landing[g].dot(rents.col(agent));
    out += landing[agent].dot(rents.col(g));
  }
  if (income) *income = in;
  return in - out;
}

Money long_term_from(const GameState& state, int agent, const ValueParams& params,
                     const EvalContext& ctx, const Eigen::MatrixXd& rents) {
  if (ctx.expected_sum <= 0) {
    throw std::domain_error("expected dice sum is zero; landing rate undefined");
  }
  const double q = 1.0 / ctx.expected_sum;
  const Money mine = rents.col(agent).sum();
  Money flow = 0;
  for (int g = 0; g < state.num_players(); ++g) {
    if (!solvent_opponent(state, agent, g)) continue;
    flow += q * mine - q * rents.col(g).sum();
  }
  return params.k_loops * flow;
}

int kind_rank(MoveKind kind) {
  switch (kind) {
    case MoveKind::kBuyProperty: return 0;
    case MoveKind::kImprove: return 1;
    case MoveKind::kUnmortgage: return 2;
    case MoveKind::kBid: return 3;
    case MoveKind::kAcceptTrade: return 4;
    case MoveKind::kPayJailFine: return 5;
    case MoveKind::kUseRollForJail: return 6;
    case MoveKind::kSellImprovement: return 7;
    case MoveKind::kMortgage: return 8;
    case MoveKind::kProposeTrade: return 9;
    case MoveKind::kRejectTrade: return 10;
    case MoveKind::kDeclineBuy: return 11;
    case MoveKind::kPassBid: return 12;
    case MoveKind::kEndPhase: return 13;
  }
  return 14;
}

Money color_value(const GameState& state, int agent, const ValueParams& params,
                  const std::vector<int>& group, int required, Money funds) {
  const BoardSpec& board = state.spec();
  thread_local std::vector<int> held;
  thread_local std::vector<int> missing;
  thread_local std::vector<int> level;
  held.clear();
  missing.clear();
  for (int sq : group) {
    (state.owner[sq] == agent ? held : missing).push_back(sq);
  }
  const int owned = static_cast<int>(held.size());
  std::stable_sort(missing.begin(), missing.end(), [&](int a, int b) {
    return board.at(a).price < board.at(b).price;
  });
  const int need = std::max(0, required - owned);
  Money budget = funds;
  int bought = 0;
  for (int sq : missing) {
    if (bought == need || budget < board.at(sq).price) break;
    budget -= board.at(sq).price;
    held.push_back(sq);
    ++bought;
  }
  const bool monopoly = bought == need;

  level.assign(held.size(), 0);
  for (std::size_t i = 0; i < held.size(); ++i) {
    level[i] = state.owner[held[i]] == agent ? state.level[held[i]] : 0;
  }
  while (monopoly) {
    int low = std::numeric_limits<int>::max();
    for (std::size_t i = 0; i < held.size(); ++i) {
      if (level[i] < board.at(held[i]).max_level()) low = std::min(low, level[i]);
    }
    int pick = -1;
    for (std::size_t i = 0; i < held.size(); ++i) {
      if (level[i] != low || level[i] >= board.at(held[i]).max_level()) continue;
      const SquareSpec& sq = board.at(held[i]);
      if (pick < 0 || sq.house_cost < board.at(held[pick]).house_cost ||
          (sq.house_cost == board.at(held[pick]).house_cost &&
           held[i] < held[pick])) {
        pick = static_cast<int>(i);
      }
    }
    if (pick < 0 || budget < board.at(held[pick]).house_cost) break;
    budget -= board.at(held[pick]).house_cost;
    ++level[pick];
  }

  Money total = 0;
  for (std::size_t i = 0; i < held.size(); ++i) {
    const int tier = level[i] > 0 ? 1 + level[i] : (monopoly ? 1 : 0);
    total += believed_rent(params, board, held[i], tier);
  }
  return std::ldexp(total, -std::max(0, required - owned));
}

}  // namespace

Eigen::MatrixXd landing_prob(const GameState& state, int player, int k,
                             const DiceSpec& dice) {
  const Eigen::MatrixXd step = step_matrix<double>(state.spec().size(), dice);
  return landing_distribution<double>(step, state.players[player].position, k);
}

ValueParams params_from_board(const BoardSpec& board) {
  ValueParams params;
  refresh_visible_beliefs(params, board);
  params.mortgage_rate_belief = board.mortgage_interest_rate;
  params.dice_model = board.dice;
  return params;
}

void refresh_visible_beliefs(ValueParams& params, const BoardSpec& board) {
  params.rent_expectations.assign(board.size(), {});
  for (int i = 0; i < board.size(); ++i) {
    if (board.at(i).is_property()) {
      params.rent_expectations[i] = tier_table(board.at(i));
    }
  }
  params.go_increment_belief = board.go_increment;
}

int rent_tier(const GameState& state, int square) {
  const int level = state.level[square];
  if (level > 0) return 1 + level;
  const int o = state.owner[square];
  return o >= 0 && state.monopoly_at(o, square) ? 1 : 0;
}

Money expected_rent(const GameState& state, const ValueParams& params,
                    int square) {
  if (state.owner[square] < 0 || state.mortgaged[square]) return 0;
  if (!state.spec().at(square).is_property()) return 0;
  return believed_rent(params, state.spec(), square, rent_tier(state, square));
}

namespace {

// Landing vectors depend only on board size, dice model, horizon and start
// square, so each thread memoizes them for the last model it saw.
struct LandingCache {
  int n = -1;
  int turns = -1;
  DiceSpec dice;
  Eigen::MatrixXd step;
  Eigen::VectorXd roll_sums;
  std::vector<Eigen::VectorXd> short_horizon;
  std::vector<Eigen::VectorXd> next_turn;
  std::vector<char> ready;
};

LandingCache& landing_cache(int n, int turns, const DiceSpec& dice) {
  thread_local LandingCache cache;
  if (cache.n != n || cache.turns != turns || !(cache.dice == dice)) {
    cache.n = n;
    cache.turns = turns;
    cache.dice = dice;
    cache.step = step_matrix<double>(n, dice);
    cache.roll_sums = dice_sum_distribution<double>(dice);
    cache.short_horizon.assign(n, Eigen::VectorXd());
    cache.next_turn.assign(n, Eigen::VectorXd());
    cache.ready.assign(n, 0);
  }
  return cache;
}

}  // namespace

EvalContext make_context(const GameState& state, const ValueParams& params) {
  EvalContext ctx;
  const int n = state.spec().size();
  const int turns = std::max(1, params.k_short);
  LandingCache& cache = landing_cache(n, turns, params.dice_model);
  for (const PlayerState& p : state.players) {
    if (p.bankrupt) {
      ctx.short_horizon.push_back(Eigen::VectorXd::Zero(n));
      ctx.next_turn.push_back(Eigen::VectorXd::Zero(n));
      continue;
    }
    if (!cache.ready[p.position]) {
      const Eigen::MatrixXd land =
          landing_distribution<double>(cache.step, p.position, turns);
      cache.short_horizon[p.position] = land.rowwise().sum();
      cache.next_turn[p.position] = land.col(0);
      cache.ready[p.position] = 1;
    }
    ctx.short_horizon.push_back(cache.short_horizon[p.position]);
    ctx.next_turn.push_back(cache.next_turn[p.position]);
  }
  ctx.roll_sums = cache.roll_sums;
  ctx.expected_sum = 0;
  for (Eigen::Index s = 0; s < ctx.roll_sums.size(); ++s) {
    ctx.expected_sum += static_cast<double>(s) * ctx.roll_sums(s);
  }
  return ctx;
}

Money assets_value(const GameState& state, int agent) {
  Money total = 0;
  const BoardSpec& board = state.spec();
  for (int i = 0; i < board.size(); ++i) {
    if (state.owner[i] != agent || state.mortgaged[i]) continue;
    total += board.at(i).price + state.level[i] * board.at(i).house_cost;
  }
  return total;
}

Money short_term_gain(const GameState& state, int agent, const ValueParams& params,
                      const EvalContext& ctx) {
  return rent_flow(state, agent, rent_table(state, params), ctx.short_horizon, nullptr);
}

Money long_term_gain(const GameState& state, int agent, const ValueParams& params,
                     const EvalContext& ctx) {
  return long_term_from(state, agent, params, ctx, rent_table(state, params));
}

namespace {

Money monopoly_from(const GameState& state, int agent, const ValueParams& params,
                    Money long_term) {
  const Money funds = state.players[agent].cash +
                      params.k_loops * params.go_increment_belief + long_term;
  Money best = 0;
  bool any = false;
  const ColorIndex& index = state.colors();
  for (std::size_t c = 0; c < index.groups.size(); ++c) {
    const auto& group = index.groups[c];
    if (std::none_of(group.begin(), group.end(),
                     [&](int sq) { return state.owner[sq] == agent; })) {
      continue;
    }
    const Money v = color_value(state, agent, params, group, index.required[c], funds);
    best = any ? std::max(best, v) : v;
    any = true;
  }
  return best;
}

}  // namespace

Money monopoly_gain(const GameState& state, int agent, const ValueParams& params,
                    const EvalContext& ctx) {
  return monopoly_from(state, agent, params, long_term_gain(state, agent, params, ctx));
}

ValueTerms value_terms(const GameState& state, int agent, const ValueParams& params,
                       const EvalContext& ctx) {
  const Eigen::MatrixXd rents = rent_table(state, params);
  ValueTerms t;
  t.assets = assets_value(state, agent);
  t.short_term = rent_flow(state, agent, rents, ctx.short_horizon, nullptr);
  t.long_term = long_term_from(state, agent, params, ctx, rents);
  t.monopoly = monopoly_from(state, agent, params, t.long_term);
  return t;
}

Money evaluate_state(const GameState& state, int agent, const ValueParams& params) {
  return evaluate_state(state, agent, params, make_context(state, params));
}

Money evaluate_state(const GameState& state, int agent, const ValueParams& params,
                     const EvalContext& ctx) {
  return value_terms(state, agent, params, ctx).total();
}

GuardReport guard_report(const GameState& state, int agent, Money cost,
                         const ValueParams& params, const EvalContext& ctx) {
  GuardReport g;
  g.cost = cost;
  g.next_gain = rent_flow(state, agent, rent_table(state, params), ctx.next_turn, &g.owed);
  const BoardSpec& board = state.spec();
  for (int i = 0; i < board.size(); ++i) {
    if (state.owner[i] != agent) continue;
    if (!state.mortgaged[i]) g.worth_scaled += board.at(i).mortgage_value;
    g.worth_scaled += state.level[i] * board.at(i).house_cost / 2;
  }
  const int pos = state.players[agent].position;
  for (Eigen::Index s = 0; s < ctx.roll_sums.size(); ++s) {
    if (ctx.roll_sums(s) <= 0) continue;
    const int sq = static_cast<int>((pos + s) % board.size());
    if (state.owner[sq] >= 0 && state.owner[sq] != agent) {
      g.worst_rent = std::max(g.worst_rent, expected_rent(state, params, sq));
    }
  }
  return with_cost(g, cost, state.players[agent].cash, params);
}

GuardReport with_cost(GuardReport g, Money cost, Money cash, const ValueParams& params) {
  g.cost = cost;
  g.condition1 = cash + g.next_gain - cost >= params.cash_min;
  g.condition2 = cash + g.owed + g.worth_scaled - cost - g.worst_rent > 0;
  return g;
}

bool passes_guards(const GameState& state, int agent, const Move& move,
                   const ValueParams& params) {
  return guard_report(state, agent, move_cost(state, agent, move, params), params,
                      make_context(state, params))
      .passes();
}

Money move_cost(const GameState& state, int agent, const Move& move,
                const ValueParams& params) {
  switch (move.kind) {
    case MoveKind::kUnmortgage:
      return state.spec().at(move.square).mortgage_value *
             (1.0 + params.mortgage_rate_belief);
    case MoveKind::kBid:
      return move.amount;
    case MoveKind::kProposeTrade:
      return std::max<Money>(0, move.offer.cash);
    case MoveKind::kAcceptTrade:
      return move.offer.counterparty == agent ? std::max<Money>(0, -move.offer.cash)
                                              : 0;
    default:
      return move.cost;
  }
}

GameState simulate_move(const GameState& state, int agent, const Move& move,
                        const ValueParams& params) {
  GameState s = state;
  PlayerState& p = s.players[agent];
  const BoardSpec& board = s.spec();
  switch (move.kind) {
    case MoveKind::kBuyProperty:
      p.cash -= board.at(move.square).price;
      s.owner[move.square] = agent;
      break;
    case MoveKind::kBid:
      p.cash -= move.amount;
      s.owner[move.square] = agent;
      break;
    case MoveKind::kImprove:
      p.cash -= board.at(move.square).house_cost;
      s.level[move.square] += 1;
      break;
    case MoveKind::kSellImprovement:
      p.cash += board.at(move.square).house_cost / 2;
      s.level[move.square] -= 1;
      break;
    case MoveKind::kMortgage:
      p.cash += board.at(move.square).mortgage_value;
      s.mortgaged[move.square] = 1;
      break;
    case MoveKind::kUnmortgage:
      p.cash -= move_cost(state, agent, move, params);
      s.mortgaged[move.square] = 0;
      break;
    case MoveKind::kPayJailFine:
      p.cash -= board.jail_fine;
      p.in_jail = false;
      p.jail_turns = 0;
      break;
    case MoveKind::kAcceptTrade:
    case MoveKind::kProposeTrade: {
      const TradeOffer& o = move.offer;
      s.owner[o.give] = o.counterparty;
      s.owner[o.receive] = o.proposer;
      s.players[o.proposer].cash -= o.cash;
      s.players[o.counterparty].cash += o.cash;
      break;
    }
    case MoveKind::kDeclineBuy:
    case MoveKind::kPassBid:
    case MoveKind::kRejectTrade:
    case MoveKind::kUseRollForJail:
    case MoveKind::kEndPhase:
      break;
  }
  return s;
}

Move choose_move(const GameState& state, int agent, std::span<const Move> legal,
                 const ValueParams& params, const DecisionTrace& trace) {
  if (legal.empty()) throw std::invalid_argument("choose_move: no legal moves");
  const EvalContext ctx = make_context(state, params);
  const GuardReport base = guard_report(state, agent, 0, params, ctx);
  const Money cash = state.players[agent].cash;
  std::vector<CandidateTrace> candidates;
  candidates.reserve(legal.size());
  for (const Move& m : legal) {
    if (m.kind == MoveKind::kProposeTrade) continue;
    CandidateTrace c;
    c.move = m;
    c.value = evaluate_state(simulate_move(state, agent, m, params), agent, params, ctx);
    c.guards = with_cost(base, move_cost(state, agent, m, params), cash, params);
    candidates.push_back(c);
  }
  if (candidates.empty()) {
    // Only trade proposals on offer; the caller's trade logic owns them.
    return legal.back();
  }

  std::vector<const CandidateTrace*> pool;
  for (const auto& c : candidates) {
    if (c.guards.passes()) pool.push_back(&c);
  }
  if (pool.empty()) {
    for (const auto& c : candidates) {
      if (c.guards.cost == 0) pool.push_back(&c);
    }
  }
  if (pool.empty()) {
    for (const auto& c : candidates) pool.push_back(&c);
  }

  Money top = -std::numeric_limits<Money>::infinity();
  for (const auto* c : pool) top = std::max(top, c->value);
  const Money tol = params.tie_tolerance * std::max<Money>(1.0, std::fabs(top));
  const CandidateTrace* best = nullptr;
  for (const auto* c : pool) {
    if (c->value < top - tol) continue;
    if (best == nullptr) {
      best = c;
      continue;
    }
    const int rc = kind_rank(c->move.kind);
    const int rb = kind_rank(best->move.kind);
    if (rc < rb || (rc == rb && c->move.square < best->move.square)) best = c;
  }
  if (trace) trace(candidates, best->move);
  return best->move;
}

std::optional<Money> bid_amount(const GameState& state, int agent, int square,
                                Money min_bid, const ValueParams& params) {
  if (min_bid > state.players[agent].cash) return std::nullopt;
  const EvalContext ctx = make_context(state, params);
  Move bid{MoveKind::kBid, square, min_bid, min_bid, {}};
  const Money gain =
      evaluate_state(simulate_move(state, agent, bid, params), agent, params, ctx) -
      evaluate_state(state, agent, params, ctx);
  if (min_bid > gain) return std::nullopt;
  if (!guard_report(state, agent, min_bid, params, ctx).passes()) return std::nullopt;
  return min_bid;
}

bool completes_set(const GameState& state, int player, int gained_square,
                   int lost_square) {
  const BoardSpec& board = state.spec();
  const std::string& color = board.at(gained_square).color;
  if (state.has_monopoly(player, color)) return false;
  int count = state.owned_in_color(player, color) + 1;
  if (lost_square >= 0 && board.at(lost_square).color == color) --count;
  return count >= board.monopoly_size(color);
}

namespace {

// Giving `lost` away must not break a set the player already holds.
bool keeps_sets(const GameState& state, int player, int lost) {
  return !state.has_monopoly(player, state.spec().at(lost).color);
}

bool tradable_for(const GameState& state, int player, int square) {
  const SquareSpec& sq = state.spec().at(square);
  return sq.is_property() && state.owner[square] == player &&
         !state.mortgaged[square] && !state.group_has_improvements(player, sq.color);
}

}  // namespace

std::optional<TradeOffer> propose_trade(const GameState& state, int agent,
                                        const ValueParams& params) {
  const BoardSpec& board = state.spec();
  const EvalContext ctx = make_context(state, params);
  for (int receive = 0; receive < board.size(); ++receive) {
    const int other = state.owner[receive];
    if (other < 0 || other == agent || state.players[other].bankrupt) continue;
    if (!tradable_for(state, other, receive)) continue;
    for (int give = 0; give < board.size(); ++give) {
      if (!tradable_for(state, agent, give)) continue;
      if (!keeps_sets(state, agent, give)) continue;
      if (!completes_set(state, agent, receive, give)) continue;
      if (completes_set(state, other, give, receive)) continue;
      // Sweetener so a face-value counterparty sees a strict gain.
      const Money cash =
          std::max<Money>(0, board.at(receive).price - board.at(give).price) +
          board.at(receive).price / 10;
      if (cash > state.players[agent].cash) continue;
      if (!guard_report(state, agent, cash, params, ctx).passes()) continue;
      return TradeOffer{agent, other, give, receive, cash};
    }
  }
  return std::nullopt;
}

bool accept_trade(const GameState& state, int agent, const TradeOffer& offer,
                  const ValueParams& params) {
  if (offer.counterparty != agent) return false;
  if (!keeps_sets(state, agent, offer.receive)) return false;
  if (!completes_set(state, agent, offer.give, offer.receive)) return false;
  if (completes_set(state, offer.proposer, offer.receive, offer.give)) return false;
  const Money cost = std::max<Money>(0, -offer.cash);
  return guard_report(state, agent, cost, params, make_context(state, params))
      .passes();
}

}  // namespace monolab
