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

#ifndef MONOLAB_ENGINE_HPP_
#define MONOLAB_ENGINE_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "monolab/board.hpp"
#include "monolab/rng.hpp"

namespace monolab {

class Agent;
struct NoveltySpec;

inline constexpr int kBank = -1;

class IllegalMoveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Phase {
  kPreRoll,  // out-of-turn round before the roll; every solvent player acts
  kJail,
  kBuy,
  kAuction,
  kPostRoll,
  kTradeResponse,
  kFinished,
};

std::string_view to_string(Phase phase);

enum class MoveKind {
  kBuyProperty,
  kDeclineBuy,
  kImprove,
  kSellImprovement,
  kMortgage,
  kUnmortgage,
  kBid,
  kPassBid,
  kProposeTrade,
  kAcceptTrade,
  kRejectTrade,
  kPayJailFine,
  kUseRollForJail,
  kEndPhase,
};

std::string_view to_string(MoveKind kind);

// One property for one property, plus cash paid by the proposer (negative
// when the counterparty pays).
struct TradeOffer {
  int proposer = -1;
  int counterparty = -1;
  int give = -1;
  int receive = -1;
  Money cash = 0;

  bool operator==(const TradeOffer&) const = default;
};

struct Move {
  MoveKind kind = MoveKind::kEndPhase;
  int square = -1;
  Money amount = 0;  // bid amount
  Money cost = 0;    // cash the mover pays out when the move executes
  TradeOffer offer;

  bool operator==(const Move&) const = default;
};

std::string describe(const Move& move);

struct PlayerState {
  int id = 0;
  int position = 0;
  Money cash = 0;
  bool in_jail = false;
  int jail_turns = 0;
  bool bankrupt = false;

  bool operator==(const PlayerState&) const = default;
};

// Property groups of one board, indexed by color id.
struct ColorIndex {
  explicit ColorIndex(const BoardSpec& board);

  const BoardSpec* board;
  std::vector<int> color_of;  // per square; -1 off properties
  std::vector<std::string> names;
  std::vector<std::vector<int>> groups;
  std::vector<int> required;

  int find(const std::string& color) const;
};

struct GameState {
  std::shared_ptr<const BoardSpec> board;
  std::vector<PlayerState> players;
  std::vector<int> owner;       // per square; kBank when unowned
  std::vector<int> level;       // improvement level per square
  std::vector<char> mortgaged;  // per square
  int round = 0;
  int current = 0;  // player whose turn it is
  int decider = 0;  // player expected to answer in the current phase
  Phase phase = Phase::kPreRoll;
  int pending_square = -1;
  Money min_bid = 0;  // smallest acceptable bid in an auction
  int high_bidder = -1;
  std::optional<TradeOffer> pending_trade;
  std::vector<int> chance_order;
  std::vector<int> community_order;
  std::size_t chance_cursor = 0;
  std::size_t community_cursor = 0;
  std::vector<char> proposed_trade;  // per player, reset each phase
  Rng rng;

  const BoardSpec& spec() const { return *board; }
  int num_players() const { return static_cast<int>(players.size()); }

  const ColorIndex& colors() const;
  bool has_monopoly(int player, const std::string& color) const;
  // Whether the owner-to-be `player` holds the full set of `square`'s color.
  bool monopoly_at(int player, int square) const;
  // Properties of `color` held by `player`.
  int owned_in_color(int player, const std::string& color) const;
  bool group_has_improvements(int player, const std::string& color) const;
  Money rent_due(int square) const;
  int houses_in_use() const;
  int hotels_in_use() const;
  std::vector<int> properties_of(int player) const;
  int solvent_count() const;
  Money net_worth(int player) const;
  std::uint64_t digest() const;

 private:
  mutable std::shared_ptr<const ColorIndex> color_index_;
};

GameState initial_state(std::shared_ptr<const BoardSpec> board, int num_players,
                        std::uint64_t seed);

enum class EventKind {
  kGameStart,
  kNoveltyInjected,
  kRoll,
  kLanded,
  kGoBonus,
  kRentPaid,
  kTaxPaid,
  kCardDrawn,
  kPurchase,
  kAuctionStep,
  kAuctionWon,
  kMortgage,
  kUnmortgage,
  kImprovement,
  kImprovementSold,
  kJail,
  kJailRelease,
  kTrade,
  kBankruptcy,
  kForfeit,
  kGameEnd,
};

std::string_view to_string(EventKind kind);

// Flat record so the hot path never allocates JSON; `payload_json` renders
// the kind-specific payload for logs.
struct GameEvent {
  int round = 0;
  EventKind kind = EventKind::kGameStart;
  int player = -1;
  int square = -1;
  int other = -1;     // counterparty, creditor, or deck card index
  Money amount = 0;   // cash moved or bid
  Money bank_flow = 0;  // net cash the bank paid to players in this event
  std::vector<int> faces;
  std::string detail;

  bool operator==(const GameEvent&) const = default;
};

class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void emit(const GameState& state, const GameEvent& event) = 0;
};

struct GameResult {
  std::optional<int> winner;
  int rounds = 0;
  bool round_cap = false;
  std::uint64_t digest = 0;
  std::vector<int> forfeits;
  std::vector<GameEvent> events;  // empty unless recording was requested
};

using GameObserver = std::function<void(const GameState&, const GameEvent&)>;

struct GameOptions {
  int max_rounds = 1000;
  int max_phase_actions = 16;
  Money auction_start = 10;
  Money auction_increment = 10;
  bool record_events = false;
  GameObserver observer;
  int game_index = 0;  // passed through to agents
  std::string novelty_note;  // logged as novelty_injected when non-empty
};

// Pure rules queries.
std::vector<Move> legal_moves(const GameState& state, int player);
bool is_legal(const GameState& state, int player, const Move& move);
Money unmortgage_cost(const GameState& state, int square);

// Drives one game. Operations mirror the rules steps and are public so tests
// can exercise each step in isolation.
class Game {
 public:
  Game(std::shared_ptr<const BoardSpec> board, std::vector<Agent*> agents,
       std::uint64_t seed, GameOptions options = {});

  GameState& state() { return state_; }
  const GameState& state() const { return state_; }
  const std::vector<GameEvent>& events() const { return events_; }

  void apply_move(int player, const Move& move);
  void roll_and_advance(int player);
  void resolve_landing(int player);
  void run_auction(int square);
  // Moves `amount` from debtor to creditor, liquidating and declaring
  // bankruptcy as needed. Returns the amount actually paid.
  Money charge(int debtor, int creditor, Money amount, EventKind kind,
               int square = -1, std::string detail = {});
  void resolve_bankruptcy(int debtor, int creditor);
  void forfeit(int player, const std::string& reason);

  void emit(GameEvent event);
  GameResult play();

 private:
  void start();
  // apply_move without the legality check, for moves already validated.
  void perform(int player, const Move& move);
  void play_turn(int player);
  void decision_phase(int player, Phase phase);
  void handle_jail(int player);
  void handle_trade(int proposer, const Move& move);
  void liquidate(int debtor, Money target);
  void send_to_jail(int player);
  void move_to(int player, int target, bool collect_go);
  void draw_card(int player, bool chance);
  GameResult finish();
  Move ask_decide(int player);
  bool alive(int player) const { return !state_.players[player].bankrupt; }

  GameState state_;
  std::vector<Agent*> agents_;
  GameOptions options_;
  std::vector<GameEvent> events_;
  std::vector<int> forfeits_;
  int landing_depth_ = 0;
};

// Convenience wrapper: optional novelty is applied to the board first.
GameResult play_game(std::span<Agent* const> agents, const BoardSpec& board,
                     const NoveltySpec* novelty, std::uint64_t seed,
                     GameOptions options);

}  // namespace monolab

#endif  // MONOLAB_ENGINE_HPP_
