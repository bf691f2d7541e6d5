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

#include "monolab/engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "monolab/agent.hpp"
#include "monolab/event_log.hpp"
#include "monolab/novelty.hpp"

namespace monolab {
namespace {

constexpr int kMaxLandingChain = 4;

// Min and max improvement level across the player's holdings in a color.
std::pair<int, int> level_range(const GameState& s, int player, int square) {
  int lo = 1 << 20;
  int hi = -1;
  const ColorIndex& index = s.colors();
  for (int i : index.groups[index.color_of[square]]) {
    if (s.owner[i] != player) continue;
    lo = std::min(lo, s.level[i]);
    hi = std::max(hi, s.level[i]);
  }
  return {lo, hi};
}

bool group_has_mortgage(const GameState& s, int player, int square) {
  const ColorIndex& index = s.colors();
  for (int i : index.groups[index.color_of[square]]) {
    if (s.owner[i] == player && s.mortgaged[i]) return true;
  }
  return false;
}

bool tradable(const GameState& s, int player, int square) {
  const ColorIndex& index = s.colors();
  if (index.color_of[square] < 0 || s.owner[square] != player || s.mortgaged[square]) {
    return false;
  }
  for (int i : index.groups[index.color_of[square]]) {
    if (s.owner[i] == player && s.level[i] > 0) return false;
  }
  return true;
}

bool can_build(const GameState& s, int square) {
  const SquareSpec& sq = s.spec().at(square);
  const int next = s.level[square] + 1;
  const int houses = static_cast<int>(sq.house_rents.size());
  if (next <= houses) return s.houses_in_use() < s.spec().bank_houses;
  return s.hotels_in_use() < s.spec().bank_hotels;
}

bool can_sell(const GameState& s, int square) {
  const SquareSpec& sq = s.spec().at(square);
  const int houses = static_cast<int>(sq.house_rents.size());
  const bool is_hotel = sq.hotel_rent && s.level[square] == houses + 1;
  if (!is_hotel) return true;
  return s.spec().bank_houses - s.houses_in_use() >= houses;
}

void append_out_of_turn(const GameState& s, int player, bool allow_trades,
                        std::vector<Move>& moves) {
  const BoardSpec& b = s.spec();
  for (int i = 0; i < b.size(); ++i) {
    if (s.owner[i] != player) continue;
    const SquareSpec& sq = b.squares[i];
    if (s.mortgaged[i]) {
      moves.push_back({MoveKind::kUnmortgage, i, 0, unmortgage_cost(s, i), {}});
      continue;
    }
    if (!sq.is_property()) continue;
    const auto [lo, hi] = level_range(s, player, i);
    if (s.monopoly_at(player, i) && !group_has_mortgage(s, player, i) && s.level[i] == lo &&
        s.level[i] < sq.max_level() && can_build(s, i)) {
      moves.push_back({MoveKind::kImprove, i, 0, sq.house_cost, {}});
    }
    if (s.level[i] > 0 && s.level[i] == hi && can_sell(s, i)) {
      moves.push_back({MoveKind::kSellImprovement, i, 0, 0, {}});
    }
    if (hi == 0) moves.push_back({MoveKind::kMortgage, i, 0, 0, {}});
  }
  if (allow_trades && !s.proposed_trade[player]) {
    std::vector<int> mine;
    std::vector<int> theirs;
    for (int i = 0; i < b.size(); ++i) {
      const int o = s.owner[i];
      if (o < 0 || s.players[o].bankrupt || !tradable(s, o, i)) continue;
      (o == player ? mine : theirs).push_back(i);
    }
    moves.reserve(moves.size() + mine.size() * theirs.size() + 1);
    for (int give : mine) {
      for (int receive : theirs) {
        Move m{MoveKind::kProposeTrade, give, 0, 0, {}};
        m.offer = TradeOffer{player, s.owner[receive], give, receive, 0};
        moves.push_back(m);
      }
    }
  }
  moves.push_back({MoveKind::kEndPhase, -1, 0, 0, {}});
}

}  // namespace

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::kPreRoll: return "pre_roll";
    case Phase::kJail: return "jail";
    case Phase::kBuy: return "buy";
    case Phase::kAuction: return "auction";
    case Phase::kPostRoll: return "post_roll";
    case Phase::kTradeResponse: return "trade_response";
    case Phase::kFinished: return "finished";
  }
  return "unknown";
}

std::string_view to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::kBuyProperty: return "buy_property";
    case MoveKind::kDeclineBuy: return "decline_buy";
    case MoveKind::kImprove: return "improve";
    case MoveKind::kSellImprovement: return "sell_improvement";
    case MoveKind::kMortgage: return "mortgage";
    case MoveKind::kUnmortgage: return "unmortgage";
    case MoveKind::kBid: return "bid";
    case MoveKind::kPassBid: return "pass_bid";
    case MoveKind::kProposeTrade: return "propose_trade";
    case MoveKind::kAcceptTrade: return "accept_trade";
    case MoveKind::kRejectTrade: return "reject_trade";
    case MoveKind::kPayJailFine: return "pay_jail_fine";
    case MoveKind::kUseRollForJail: return "use_roll_for_jail";
    case MoveKind::kEndPhase: return "end_phase";
  }
  return "unknown";
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kGameStart: return "game_start";
    case EventKind::kNoveltyInjected: return "novelty_injected";
    case EventKind::kRoll: return "roll";
    case EventKind::kLanded: return "landed";
    case EventKind::kGoBonus: return "go_bonus";
    case EventKind::kRentPaid: return "rent_paid";
    case EventKind::kTaxPaid: return "tax_paid";
    case EventKind::kCardDrawn: return "card_drawn";
    case EventKind::kPurchase: return "purchase";
    case EventKind::kAuctionStep: return "auction_step";
    case EventKind::kAuctionWon: return "auction_won";
    case EventKind::kMortgage: return "mortgage";
    case EventKind::kUnmortgage: return "unmortgage";
    case EventKind::kImprovement: return "improvement";
    case EventKind::kImprovementSold: return "improvement_sold";
    case EventKind::kJail: return "jail";
    case EventKind::kJailRelease: return "jail_release";
    case EventKind::kTrade: return "trade";
    case EventKind::kBankruptcy: return "bankruptcy";
    case EventKind::kForfeit: return "forfeit";
    case EventKind::kGameEnd: return "game_end";
  }
  return "unknown";
}

std::string describe(const Move& move) {
  std::ostringstream out;
  out << to_string(move.kind);
  if (move.kind == MoveKind::kProposeTrade) {
    out << "(give " << move.offer.give << ", receive " << move.offer.receive
        << " from " << move.offer.counterparty << ", cash " << move.offer.cash
        << ")";
  } else if (move.kind == MoveKind::kBid) {
    out << "(" << move.amount << ")";
  } else if (move.square >= 0) {
    out << "(" << move.square << ")";
  }
  return out.str();
}

ColorIndex::ColorIndex(const BoardSpec& b) : board(&b), color_of(b.size(), -1) {
  for (int i = 0; i < b.size(); ++i) {
    if (!b.squares[i].is_property()) continue;
    int id = find(b.squares[i].color);
    if (id < 0) {
      id = static_cast<int>(names.size());
      names.push_back(b.squares[i].color);
      groups.emplace_back();
    }
    groups[id].push_back(i);
    color_of[i] = id;
  }
  for (const auto& name : names) required.push_back(b.monopoly_size(name));
}

int ColorIndex::find(const std::string& color) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == color) return static_cast<int>(i);
  }
  return -1;
}

const ColorIndex& GameState::colors() const {
  if (!color_index_ || color_index_->board != board.get()) {
    color_index_ = std::make_shared<const ColorIndex>(*board);
  }
  return *color_index_;
}

bool GameState::has_monopoly(int player, const std::string& color) const {
  const ColorIndex& index = colors();
  const int id = index.find(color);
  return id >= 0 && monopoly_at(player, index.groups[id].front());
}

bool GameState::monopoly_at(int player, int square) const {
  const ColorIndex& index = colors();
  const int id = index.color_of[square];
  if (id < 0 || index.required[id] < 1) return false;
  int count = 0;
  for (int sq : index.groups[id]) count += owner[sq] == player;
  return count >= index.required[id];
}

int GameState::owned_in_color(int player, const std::string& color) const {
  const ColorIndex& index = colors();
  const int id = index.find(color);
  if (id < 0) return 0;
  int count = 0;
  for (int sq : index.groups[id]) count += owner[sq] == player;
  return count;
}

bool GameState::group_has_improvements(int player,
                                       const std::string& color) const {
  const ColorIndex& index = colors();
  const int id = index.find(color);
  if (id < 0) return false;
  for (int sq : index.groups[id]) {
    if (owner[sq] == player && level[sq] > 0) return true;
  }
  return false;
}

Money GameState::rent_due(int square) const {
  const int o = owner[square];
  if (o < 0 || mortgaged[square]) return 0;
  const SquareSpec& sq = spec().at(square);
  return sq.rent_at(level[square], monopoly_at(o, square));
}

int GameState::houses_in_use() const {
  int total = 0;
  const BoardSpec& b = spec();
  for (int i = 0; i < b.size(); ++i) {
    if (level[i] > 0 && level[i] <= static_cast<int>(b.squares[i].house_rents.size())) {
      total += level[i];
    }
  }
  return total;
}

int GameState::hotels_in_use() const {
  int total = 0;
  const BoardSpec& b = spec();
  for (int i = 0; i < b.size(); ++i) {
    if (level[i] > static_cast<int>(b.squares[i].house_rents.size())) ++total;
  }
  return total;
}

std::vector<int> GameState::properties_of(int player) const {
  std::vector<int> result;
  for (int i = 0; i < spec().size(); ++i) {
    if (owner[i] == player) result.push_back(i);
  }
  return result;
}

int GameState::solvent_count() const {
  return static_cast<int>(std::count_if(
      players.begin(), players.end(),
      [](const PlayerState& p) { return !p.bankrupt; }));
}

Money GameState::net_worth(int player) const {
  Money worth = players[player].cash;
  const BoardSpec& b = spec();
  for (int i = 0; i < b.size(); ++i) {
    if (owner[i] == player && !mortgaged[i]) {
      worth += b.squares[i].price + level[i] * b.squares[i].house_cost;
    }
  }
  return worth;
}

std::uint64_t GameState::digest() const {
  // FNV-1a over the observable state.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (const PlayerState& p : players) {
    mix(static_cast<std::uint64_t>(p.position));
    mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(p.cash * 100.0)));
    mix(p.bankrupt);
    mix(p.in_jail);
  }
  for (std::size_t i = 0; i < owner.size(); ++i) {
    mix(static_cast<std::uint64_t>(owner[i] + 1));
    mix(static_cast<std::uint64_t>(level[i]));
    mix(static_cast<std::uint64_t>(mortgaged[i]));
  }
  mix(static_cast<std::uint64_t>(round));
  return h;
}

Money unmortgage_cost(const GameState& state, int square) {
  return state.spec().at(square).mortgage_value *
         (1.0 + state.spec().mortgage_interest_rate);
}

GameState initial_state(std::shared_ptr<const BoardSpec> board, int num_players,
                        std::uint64_t seed) {
  GameState s;
  s.board = std::move(board);
  const int n = s.spec().size();
  for (int p = 0; p < num_players; ++p) {
    s.players.push_back(PlayerState{p, 0, s.spec().starting_cash, false, 0, false});
  }
  s.owner.assign(n, kBank);
  s.level.assign(n, 0);
  s.mortgaged.assign(n, 0);
  s.proposed_trade.assign(num_players, 0);
  s.rng = Rng(seed);
  s.chance_order.resize(s.spec().chance_deck.size());
  std::iota(s.chance_order.begin(), s.chance_order.end(), 0);
  s.community_order.resize(s.spec().community_deck.size());
  std::iota(s.community_order.begin(), s.community_order.end(), 0);
  s.rng.shuffle(std::span<int>(s.chance_order));
  s.rng.shuffle(std::span<int>(s.community_order));
  return s;
}

namespace {

std::vector<Move> enumerate_moves(const GameState& state, int player,
                                  bool with_trades) {
  std::vector<Move> moves;
  moves.reserve(16);
  if (player < 0 || player >= state.num_players() ||
      state.players[player].bankrupt || state.phase == Phase::kFinished ||
      player != state.decider) {
    return moves;
  }
  const BoardSpec& b = state.spec();
  switch (state.phase) {
    case Phase::kPreRoll:
    case Phase::kPostRoll:
      append_out_of_turn(state, player,
                         with_trades && state.phase == Phase::kPreRoll, moves);
      break;
    case Phase::kJail:
      moves.push_back({MoveKind::kPayJailFine, -1, 0, b.jail_fine, {}});
      if (b.dice.dice.size() >= 2 && state.players[player].jail_turns < 3) {
        moves.push_back({MoveKind::kUseRollForJail, -1, 0, 0, {}});
      }
      break;
    case Phase::kBuy: {
      const int sq = state.pending_square;
      moves.push_back({MoveKind::kBuyProperty, sq, 0, b.at(sq).price, {}});
      moves.push_back({MoveKind::kDeclineBuy, sq, 0, 0, {}});
      break;
    }
    case Phase::kAuction: {
      const int sq = state.pending_square;
      moves.push_back({MoveKind::kBid, sq, state.min_bid, state.min_bid, {}});
      moves.push_back({MoveKind::kPassBid, sq, 0, 0, {}});
      break;
    }
    case Phase::kTradeResponse: {
      const TradeOffer& offer = *state.pending_trade;
      Move accept{MoveKind::kAcceptTrade, offer.receive, 0,
                  std::max<Money>(0, -offer.cash), offer};
      Move reject{MoveKind::kRejectTrade, offer.receive, 0, 0, offer};
      moves.push_back(accept);
      moves.push_back(reject);
      break;
    }
    case Phase::kFinished:
      break;
  }
  return moves;
}

}  // namespace

std::vector<Move> legal_moves(const GameState& state, int player) {
  return enumerate_moves(state, player, true);
}

bool is_legal(const GameState& state, int player, const Move& move) {
  if (player < 0 || player >= state.num_players() ||
      state.players[player].bankrupt || player != state.decider) {
    return false;
  }
  if (move.kind == MoveKind::kProposeTrade) {
    if (state.phase != Phase::kPreRoll || state.proposed_trade[player]) {
      return false;
    }
    const TradeOffer& o = move.offer;
    if (o.proposer != player || o.counterparty < 0 ||
        o.counterparty >= state.num_players() || o.counterparty == player ||
        state.players[o.counterparty].bankrupt) {
      return false;
    }
    if (o.give < 0 || o.give >= state.spec().size() || o.receive < 0 ||
        o.receive >= state.spec().size()) {
      return false;
    }
    if (!tradable(state, player, o.give) ||
        !tradable(state, o.counterparty, o.receive)) {
      return false;
    }
    if (o.cash > 0 && state.players[player].cash < o.cash) return false;
    if (o.cash < 0 && state.players[o.counterparty].cash < -o.cash) return false;
    return move.cost == std::max<Money>(0, o.cash);
  }
  if (move.kind == MoveKind::kBid) {
    return state.phase == Phase::kAuction &&
           move.square == state.pending_square &&
           move.amount >= state.min_bid && move.cost == move.amount;
  }
  for (const Move& m : enumerate_moves(state, player, false)) {
    if (m == move) return true;
  }
  return false;
}

Game::Game(std::shared_ptr<const BoardSpec> board, std::vector<Agent*> agents,
           std::uint64_t seed, GameOptions options)
    : state_(initial_state(std::move(board), static_cast<int>(agents.size()), seed)),
      agents_(std::move(agents)),
      options_(std::move(options)) {}

void Game::emit(GameEvent event) {
  event.round = state_.round;
  if (options_.observer) options_.observer(state_, event);
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (agents_[i]) agents_[i]->on_event(StateView(state_, static_cast<int>(i)), event);
  }
  if (options_.record_events) events_.push_back(std::move(event));
}

void Game::apply_move(int player, const Move& move) {
  if (!is_legal(state_, player, move)) {
    throw IllegalMoveError("player " + std::to_string(player) +
                           " attempted illegal move " + describe(move) +
                           " in phase " + std::string(to_string(state_.phase)));
  }
  perform(player, move);
}

void Game::perform(int player, const Move& move) {
  PlayerState& p = state_.players[player];
  const BoardSpec& b = state_.spec();
  switch (move.kind) {
    case MoveKind::kBuyProperty: {
      const int sq = move.square;
      if (p.cash < move.cost) {
        // Unaffordable purchase falls back to the auction.
        run_auction(sq);
        break;
      }
      p.cash -= move.cost;
      state_.owner[sq] = player;
      emit({0, EventKind::kPurchase, player, sq, -1, move.cost, -move.cost, {}, {}});
      break;
    }
    case MoveKind::kDeclineBuy:
      run_auction(move.square);
      break;
    case MoveKind::kImprove: {
      if (p.cash < move.cost) break;
      p.cash -= move.cost;
      state_.level[move.square] += 1;
      emit({0, EventKind::kImprovement, player, move.square, -1, move.cost,
            -move.cost, {}, {}});
      break;
    }
    case MoveKind::kSellImprovement: {
      const Money proceeds = b.at(move.square).house_cost / 2;
      p.cash += proceeds;
      state_.level[move.square] -= 1;
      emit({0, EventKind::kImprovementSold, player, move.square, -1, proceeds,
            proceeds, {}, {}});
      break;
    }
    case MoveKind::kMortgage: {
      const Money value = b.at(move.square).mortgage_value;
      p.cash += value;
      state_.mortgaged[move.square] = 1;
      emit({0, EventKind::kMortgage, player, move.square, -1, value, value, {}, {}});
      break;
    }
    case MoveKind::kUnmortgage: {
      if (p.cash < move.cost) break;
      p.cash -= move.cost;
      state_.mortgaged[move.square] = 0;
      emit({0, EventKind::kUnmortgage, player, move.square, -1, move.cost,
            -move.cost, {}, {}});
      break;
    }
    case MoveKind::kBid:
      state_.high_bidder = player;
      emit({0, EventKind::kAuctionStep, player, move.square, -1, move.amount, 0,
            {}, "bid"});
      break;
    case MoveKind::kPassBid:
      emit({0, EventKind::kAuctionStep, player, move.square, -1, 0, 0, {}, "pass"});
      break;
    case MoveKind::kAcceptTrade: {
      const TradeOffer o = *state_.pending_trade;
      state_.owner[o.give] = o.counterparty;
      state_.owner[o.receive] = o.proposer;
      state_.players[o.proposer].cash -= o.cash;
      state_.players[o.counterparty].cash += o.cash;
      state_.pending_trade.reset();
      emit({0, EventKind::kTrade, o.proposer, o.give, o.counterparty, o.cash, 0,
            {o.give, o.receive}, "accepted"});
      break;
    }
    case MoveKind::kRejectTrade: {
      const TradeOffer o = *state_.pending_trade;
      state_.pending_trade.reset();
      emit({0, EventKind::kTrade, o.proposer, o.give, o.counterparty, o.cash, 0,
            {o.give, o.receive}, "rejected"});
      break;
    }
    case MoveKind::kPayJailFine: {
      charge(player, kBank, b.jail_fine, EventKind::kJailRelease, -1, "fine");
      if (!p.bankrupt) {
        p.in_jail = false;
        p.jail_turns = 0;
      }
      break;
    }
    case MoveKind::kProposeTrade:
      state_.proposed_trade[player] = 1;
      state_.pending_trade = move.offer;
      state_.phase = Phase::kTradeResponse;
      state_.decider = move.offer.counterparty;
      break;
    case MoveKind::kUseRollForJail:
    case MoveKind::kEndPhase:
      break;
  }
}

void Game::roll_and_advance(int player) {
  PlayerState& p = state_.players[player];
  const BoardSpec& b = state_.spec();
  std::vector<int> faces;
  faces.reserve(b.dice.dice.size());
  int total = 0;
  for (const Die& die : b.dice.dice) {
    const int face = die.faces[state_.rng.categorical(die.weights)];
    faces.push_back(face);
    total += face;
  }
  const bool doubles =
      faces.size() >= 2 &&
      std::all_of(faces.begin(), faces.end(), [&](int f) { return f == faces[0]; });
  emit({0, EventKind::kRoll, player, p.position, -1, static_cast<Money>(total), 0,
        faces, {}});

  if (p.in_jail) {
    if (doubles) {
      p.in_jail = false;
      p.jail_turns = 0;
      emit({0, EventKind::kJailRelease, player, p.position, -1, 0, 0, {}, "doubles"});
    } else if (++p.jail_turns >= 3) {
      charge(player, kBank, b.jail_fine, EventKind::kJailRelease, -1, "fine");
      if (p.bankrupt) return;
      p.in_jail = false;
      p.jail_turns = 0;
    } else {
      return;
    }
  }
  const int n = b.size();
  const int target = ((p.position + total) % n + n) % n;
  const int wraps = (p.position + total) / n;
  p.position = target;
  for (int w = 0; w < wraps; ++w) {
    p.cash += b.go_increment;
    emit({0, EventKind::kGoBonus, player, 0, -1, b.go_increment, b.go_increment,
          {}, {}});
  }
  emit({0, EventKind::kLanded, player, target, -1, 0, 0, {}, {}});
}

void Game::move_to(int player, int target, bool collect_go) {
  PlayerState& p = state_.players[player];
  const BoardSpec& b = state_.spec();
  if (collect_go && target <= p.position) {
    p.cash += b.go_increment;
    emit({0, EventKind::kGoBonus, player, 0, -1, b.go_increment, b.go_increment,
          {}, {}});
  }
  p.position = target;
  emit({0, EventKind::kLanded, player, target, -1, 0, 0, {}, {}});
}

void Game::send_to_jail(int player) {
  PlayerState& p = state_.players[player];
  p.position = *state_.spec().jail_square();
  p.in_jail = true;
  p.jail_turns = 0;
  emit({0, EventKind::kJail, player, p.position, -1, 0, 0, {}, {}});
}

void Game::draw_card(int player, bool chance) {
  const BoardSpec& b = state_.spec();
  const auto& deck = chance ? b.chance_deck : b.community_deck;
  auto& order = chance ? state_.chance_order : state_.community_order;
  auto& cursor = chance ? state_.chance_cursor : state_.community_cursor;
  if (deck.empty()) return;
  const int index = order[cursor];
  cursor = (cursor + 1) % order.size();
  const CardSpec& card = deck[index];
  const std::string deck_name = chance ? "chance" : "community";
  PlayerState& p = state_.players[player];

  GameEvent e{0, EventKind::kCardDrawn, player, -1, index, 0, 0, {}, deck_name};
  switch (card.effect) {
    case CardEffect::kReceive:
      p.cash += card.amount;
      e.amount = card.amount;
      e.bank_flow = card.amount;
      emit(e);
      break;
    case CardEffect::kPay:
      charge(player, kBank, card.amount, EventKind::kCardDrawn, index, deck_name);
      break;
    case CardEffect::kPayPerHouse: {
      Money total = 0;
      const int n = b.size();
      for (int i = 0; i < n; ++i) {
        if (state_.owner[i] != player || state_.level[i] == 0) continue;
        const int houses = static_cast<int>(b.squares[i].house_rents.size());
        total += state_.level[i] > houses ? card.per_hotel
                                          : card.amount * state_.level[i];
      }
      charge(player, kBank, total, EventKind::kCardDrawn, index, deck_name);
      break;
    }
    case CardEffect::kMoveTo:
      emit(e);
      if (card.square != p.position) {
        move_to(player, card.square, true);
        resolve_landing(player);
      }
      break;
    case CardEffect::kGoToJail:
      emit(e);
      send_to_jail(player);
      break;
  }
}

void Game::resolve_landing(int player) {
  if (landing_depth_ >= kMaxLandingChain) return;
  ++landing_depth_;
  PlayerState& p = state_.players[player];
  const int sq = p.position;
  const SquareSpec& spec = state_.spec().at(sq);
  switch (spec.kind) {
    case SquareKind::kProperty: {
      const int o = state_.owner[sq];
      if (o == kBank) {
        state_.phase = Phase::kBuy;
        state_.decider = player;
        state_.pending_square = sq;
        const auto m = ask_decide(player);
        if (alive(player)) perform(player, m);
        state_.pending_square = -1;
      } else if (o != player && !state_.mortgaged[sq]) {
        charge(player, o, state_.rent_due(sq), EventKind::kRentPaid, sq);
      }
      break;
    }
    case SquareKind::kTax:
      charge(player, kBank, spec.amount, EventKind::kTaxPaid, sq);
      break;
    case SquareKind::kChance:
      draw_card(player, true);
      break;
    case SquareKind::kCommunity:
      draw_card(player, false);
      break;
    case SquareKind::kGoToJail:
      send_to_jail(player);
      break;
    default:
      break;
  }
  --landing_depth_;
}

Money Game::charge(int debtor, int creditor, Money amount, EventKind kind,
                   int square, std::string detail) {
  PlayerState& d = state_.players[debtor];
  GameEvent e;
  e.kind = kind;
  e.player = debtor;
  e.square = kind == EventKind::kCardDrawn ? -1 : square;
  e.other = kind == EventKind::kCardDrawn ? square : creditor;
  e.detail = std::move(detail);
  if (amount <= 0) {
    emit(e);
    return 0;
  }
  if (d.cash < amount) liquidate(debtor, amount);
  const Money paid = std::min(d.cash, amount);
  d.cash -= paid;
  if (creditor >= 0) state_.players[creditor].cash += paid;
  e.amount = paid;
  e.bank_flow = creditor >= 0 ? 0 : -paid;
  if (paid < amount) e.detail += e.detail.empty() ? "shortfall" : ":shortfall";
  emit(e);
  if (paid < amount) resolve_bankruptcy(debtor, creditor);
  return paid;
}

void Game::liquidate(int debtor, Money target) {
  PlayerState& d = state_.players[debtor];
  const BoardSpec& b = state_.spec();
  while (d.cash < target) {
    int best = -1;
    for (int i = 0; i < b.size(); ++i) {
      if (state_.owner[i] == debtor && state_.level[i] > 0 &&
          (best < 0 || state_.level[i] > state_.level[best])) {
        best = i;
      }
    }
    if (best >= 0) {
      const Money proceeds = b.at(best).house_cost / 2;
      state_.level[best] -= 1;
      d.cash += proceeds;
      emit({0, EventKind::kImprovementSold, debtor, best, -1, proceeds, proceeds,
            {}, "forced"});
      continue;
    }
    for (int i = 0; i < b.size(); ++i) {
      if (state_.owner[i] == debtor && !state_.mortgaged[i] &&
          (best < 0 || b.at(i).mortgage_value < b.at(best).mortgage_value)) {
        best = i;
      }
    }
    if (best < 0) break;
    const Money value = b.at(best).mortgage_value;
    state_.mortgaged[best] = 1;
    d.cash += value;
    emit({0, EventKind::kMortgage, debtor, best, -1, value, value, {}, "forced"});
  }
}

void Game::resolve_bankruptcy(int debtor, int creditor) {
  PlayerState& d = state_.players[debtor];
  d.bankrupt = true;
  d.in_jail = false;
  const std::vector<int> holdings = state_.properties_of(debtor);
  const Money remaining = d.cash;
  d.cash = 0;
  GameEvent e{0, EventKind::kBankruptcy, debtor, -1, creditor, remaining, 0, {}, {}};
  if (creditor >= 0) {
    state_.players[creditor].cash += remaining;
    for (int sq : holdings) {
      state_.owner[sq] = creditor;
      state_.level[sq] = 0;
    }
  } else {
    e.bank_flow = -remaining;
    for (int sq : holdings) {
      state_.owner[sq] = kBank;
      state_.level[sq] = 0;
      state_.mortgaged[sq] = 0;
    }
  }
  e.faces = holdings;
  emit(e);
  if (creditor < 0 && state_.solvent_count() > 1) {
    for (int sq : holdings) run_auction(sq);
  }
}

void Game::forfeit(int player, const std::string& reason) {
  if (state_.players[player].bankrupt) return;
  forfeits_.push_back(player);
  PlayerState& p = state_.players[player];
  p.bankrupt = true;
  p.in_jail = false;
  const Money remaining = p.cash;
  p.cash = 0;
  std::vector<int> holdings = state_.properties_of(player);
  for (int sq : holdings) {
    state_.owner[sq] = kBank;
    state_.level[sq] = 0;
    state_.mortgaged[sq] = 0;
  }
  emit({0, EventKind::kForfeit, player, -1, -1, remaining, -remaining, holdings,
        reason});
}

void Game::run_auction(int square) {
  const Phase saved_phase = state_.phase;
  const int saved_decider = state_.decider;
  const int saved_pending = state_.pending_square;
  state_.phase = Phase::kAuction;
  state_.pending_square = square;
  state_.high_bidder = -1;
  Money standing = 0;

  // Seat order, every solvent player including the one who declined.
  std::vector<int> active;
  for (int q = 0; q < state_.num_players(); ++q) {
    if (alive(q)) active.push_back(q);
  }
  auto settled = [&] {
    return active.empty() ||
           (active.size() == 1 && active[0] == state_.high_bidder);
  };
  while (!settled()) {
    for (std::size_t idx = 0; idx < active.size() && !settled();) {
      const int q = active[idx];
      if (q == state_.high_bidder) {
        ++idx;
        continue;
      }
      state_.decider = q;
      state_.min_bid = state_.high_bidder < 0
                           ? options_.auction_start
                           : standing + options_.auction_increment;
      const std::vector<Move> legal = legal_moves(state_, q);
      Move reply{MoveKind::kPassBid, square, 0, 0, {}};
      try {
        reply = agents_[q]->bid(StateView(state_, q), square, standing, legal);
      } catch (const std::exception& ex) {
        forfeit(q, std::string("agent error: ") + ex.what());
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(idx));
        continue;
      }
      if (reply.kind == MoveKind::kBid && !is_legal(state_, q, reply)) {
        forfeit(q, "illegal bid " + describe(reply));
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(idx));
        continue;
      }
      if (reply.kind == MoveKind::kBid &&
          reply.amount <= state_.players[q].cash) {
        apply_move(q, reply);
        standing = reply.amount;
        ++idx;
      } else {
        // Passing, or bidding beyond one's cash, leaves the auction.
        apply_move(q, Move{MoveKind::kPassBid, square, 0, 0, {}});
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(idx));
      }
    }
  }

  const int winner = state_.high_bidder;
  if (winner >= 0 && alive(winner)) {
    state_.players[winner].cash -= standing;
    state_.owner[square] = winner;
    emit({0, EventKind::kAuctionWon, winner, square, -1, standing, -standing, {}, {}});
  }
  state_.high_bidder = -1;
  state_.min_bid = 0;
  state_.phase = saved_phase;
  state_.decider = saved_decider;
  state_.pending_square = saved_pending;
}

Move Game::ask_decide(int player) {
  const std::vector<Move> legal = legal_moves(state_, player);
  Move fallback = legal.empty() ? Move{} : legal.back();
  Move choice;
  try {
    choice = agents_[player]->decide(StateView(state_, player), legal);
  } catch (const std::exception& ex) {
    forfeit(player, std::string("agent error: ") + ex.what());
    return fallback;
  }
  if (std::find(legal.begin(), legal.end(), choice) == legal.end() &&
      !is_legal(state_, player, choice)) {
    forfeit(player, "illegal move " + describe(choice));
    return fallback;
  }
  return choice;
}

void Game::handle_trade(int proposer, const Move& move) {
  perform(proposer, move);
  const TradeOffer offer = move.offer;
  const int cp = offer.counterparty;
  const std::vector<Move> legal = legal_moves(state_, cp);
  Move reply = legal.back();
  try {
    reply = agents_[cp]->respond_trade(StateView(state_, cp), offer, legal);
  } catch (const std::exception& ex) {
    state_.pending_trade.reset();
    forfeit(cp, std::string("agent error: ") + ex.what());
    return;
  }
  if (!is_legal(state_, cp, reply)) {
    state_.pending_trade.reset();
    forfeit(cp, "illegal trade response " + describe(reply));
    return;
  }
  perform(cp, reply);
}

void Game::decision_phase(int player, Phase phase) {
  state_.proposed_trade[player] = 0;
  for (int action = 0; action < options_.max_phase_actions; ++action) {
    if (!alive(player) || state_.solvent_count() <= 1) break;
    state_.phase = phase;
    state_.decider = player;
    const Move m = ask_decide(player);
    if (!alive(player) || m.kind == MoveKind::kEndPhase) break;
    if (m.kind == MoveKind::kProposeTrade) {
      handle_trade(player, m);
    } else {
      perform(player, m);
    }
  }
  state_.phase = phase;
  state_.decider = player;
}

void Game::handle_jail(int player) {
  state_.phase = Phase::kJail;
  state_.decider = player;
  const Move m = ask_decide(player);
  if (!alive(player)) return;
  if (m.kind == MoveKind::kPayJailFine) {
    perform(player, m);
    if (!alive(player)) return;
  }
  roll_and_advance(player);
  if (!alive(player) || state_.players[player].in_jail) return;
  resolve_landing(player);
}

void Game::play_turn(int player) {
  const int n = state_.num_players();
  for (int k = 0; k < n; ++k) {
    const int q = (player + k) % n;
    if (alive(q) && state_.solvent_count() > 1) decision_phase(q, Phase::kPreRoll);
  }
  if (!alive(player) || state_.solvent_count() <= 1) return;
  state_.current = player;
  if (state_.players[player].in_jail) {
    handle_jail(player);
  } else {
    roll_and_advance(player);
    if (alive(player)) resolve_landing(player);
  }
  if (alive(player) && state_.solvent_count() > 1) {
    decision_phase(player, Phase::kPostRoll);
  }
}

void Game::start() {
  emit({0, EventKind::kGameStart, -1, -1, state_.num_players(), 0, 0, {}, {}});
  if (!options_.novelty_note.empty()) {
    emit({0, EventKind::kNoveltyInjected, -1, -1, -1, 0, 0, {},
          options_.novelty_note});
  }
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    agents_[i]->on_game_start(StateView(state_, static_cast<int>(i)),
                              options_.game_index);
  }
}

GameResult Game::finish() {
  GameResult result;
  state_.phase = Phase::kFinished;
  if (state_.solvent_count() == 1) {
    for (const PlayerState& p : state_.players) {
      if (!p.bankrupt) result.winner = p.id;
    }
  } else if (state_.solvent_count() > 1) {
    // Round cap: richest by cash plus unmortgaged holdings, ties to nobody.
    result.round_cap = true;
    Money best = 0;
    int best_player = -1;
    bool tie = false;
    for (const PlayerState& p : state_.players) {
      if (p.bankrupt) continue;
      const Money worth = state_.net_worth(p.id);
      if (best_player < 0 || worth > best) {
        best = worth;
        best_player = p.id;
        tie = false;
      } else if (worth == best) {
        tie = true;
      }
    }
    if (!tie) result.winner = best_player;
  }
  emit({0, EventKind::kGameEnd, result.winner.value_or(-1), -1, -1, 0, 0, {},
        result.round_cap ? "round_cap" : "last_solvent"});
  result.rounds = state_.round;
  result.digest = state_.digest();
  result.forfeits = forfeits_;
  result.events = events_;
  return result;
}

GameResult Game::play() {
  start();
  bool done = state_.solvent_count() <= 1;
  while (!done && state_.round < options_.max_rounds) {
    for (int p = 0; p < state_.num_players(); ++p) {
      if (!alive(p)) continue;
      state_.current = p;
      play_turn(p);
      if (state_.solvent_count() <= 1) {
        done = true;
        break;
      }
    }
    ++state_.round;
  }
  GameResult result = finish();
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    agents_[i]->on_game_end(StateView(state_, static_cast<int>(i)), result);
  }
  return result;
}

GameResult play_game(std::span<Agent* const> agents, const BoardSpec& board,
                     const NoveltySpec* novelty, std::uint64_t seed,
                     GameOptions options) {
  auto spec = std::make_shared<const BoardSpec>(
      novelty ? inject_novelty(board, *novelty) : board);
  if (novelty) options.novelty_note = describe(*novelty);
  Game game(spec, std::vector<Agent*>(agents.begin(), agents.end()), seed,
            std::move(options));
  return game.play();
}

Json event_json(const GameEvent& event) {
  Json payload = Json::object();
  if (event.square >= 0) payload["square"] = event.square;
  if (event.other >= 0) payload["other"] = event.other;
  if (event.amount != 0) payload["amount"] = money_json(event.amount);
  if (event.bank_flow != 0) payload["bank_flow"] = money_json(event.bank_flow);
  if (!event.faces.empty()) payload["faces"] = event.faces;
  if (!event.detail.empty()) payload["detail"] = event.detail;
  Json j;
  j["round"] = event.round;
  j["kind"] = std::string(to_string(event.kind));
  j["player"] = event.player;
  j["payload"] = std::move(payload);
  return j;
}

namespace {

void append_int(std::string& out, std::int64_t value) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, res.ptr);
}

void append_money(std::string& out, Money value) {
  if (value == std::floor(value) && std::fabs(value) < 9.0e15) {
    append_int(out, static_cast<std::int64_t>(value));
  } else {
    out += money_json(value).dump();
  }
}

void append_string(std::string& out, const std::string& text) {
  const bool ascii = std::all_of(text.begin(), text.end(), [](char c) {
    return static_cast<unsigned char>(c) >= 0x20 && static_cast<unsigned char>(c) < 0x80 &&
           c != '"' && c != '\\';
  });
  if (!ascii) {
    out += Json(text).dump();
    return;
  }
  out += '"';
  out += text;
  out += '"';
}

}  // namespace

// Hand-rolled so logging and replay stay cheap; the bytes match
// event_json(event).dump().
std::string event_line(const GameEvent& event) {
  std::string out;
  out.reserve(112);
  out += "{\"round\":";
  append_int(out, event.round);
  out += ",\"kind\":\"";
  out += to_string(event.kind);
  out += "\",\"player\":";
  append_int(out, event.player);
  out += ",\"payload\":{";
  bool first = true;
  auto key = [&](std::string_view name) {
    if (!first) out += ',';
    first = false;
    out += '"';
    out += name;
    out += "\":";
  };
  if (event.square >= 0) {
    key("square");
    append_int(out, event.square);
  }
  if (event.other >= 0) {
    key("other");
    append_int(out, event.other);
  }
  if (event.amount != 0) {
    key("amount");
    append_money(out, event.amount);
  }
  if (event.bank_flow != 0) {
    key("bank_flow");
    append_money(out, event.bank_flow);
  }
  if (!event.faces.empty()) {
    key("faces");
    out += '[';
    for (std::size_t i = 0; i < event.faces.size(); ++i) {
      if (i) out += ',';
      append_int(out, event.faces[i]);
    }
    out += ']';
  }
  if (!event.detail.empty()) {
    key("detail");
    append_string(out, event.detail);
  }
  out += "}}";
  return out;
}

}  // namespace monolab
