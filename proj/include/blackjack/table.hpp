#pragma once

#include "blackjack/action.hpp"
#include "blackjack/card.hpp"
#include "blackjack/shoe.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace blackjack {

struct TableConfig {
  DeckConfig deck;
  int seats = 2;
  bool doubleAfterSplit = false;
};

enum class Phase { Dealing, PlayerTurns, DealerTurn, Settled };

struct Hand {
  std::vector<Card> cards;
  int betMultiplier = 1;
  bool resolved = false;
  bool surrendered = false;
  bool fromSplit = false;

  HandValue value() const { return handValue(cards, fromSplit); }
};

struct SeatState {
  std::vector<Hand> hands;
  size_t activeHand = 0;
  bool insuranceTaken = false;
  bool firstDecisionMade = false;
  bool splitDone = false;
  std::vector<Action> actions;
  std::vector<Card> initialCards;

  bool resolved() const;
  bool anyBust() const;
  bool surrendered() const;
};

inline constexpr int kFeatureCount = 6;
using Features = std::array<double, kFeatureCount>;

/** What an agent sees for the acting seat's active hand. `features` is the
 * normalized vector fed to value networks; the raw fields back tabular keys
 * and analysis. */
struct Observation {
  Features features{};
  ActionMask legal{};
  int playerTotal = 0;
  int dealerUpcard = 0; // 2..11, Ace = 11
  bool soft = false;
  bool canSplit = false;
  bool canDouble = false;
  double trueCount = 0.0;
};

/** Builds the normalized vector: total/32, upcard/11, soft, split, double, clip(tc,-10,10)/10. */
Features makeFeatures(int playerTotal, int dealerUpcard, bool soft, bool canSplit, bool canDouble,
                      double trueCount);

struct StepResult {
  bool handDone = false;
  bool seatDone = false;
  bool roundDone = false;
};

struct RoundTrace {
  uint64_t roundId = 0;
  int seat = 0;
  std::vector<Card> initialCards;
  Card dealerUpcard;
  std::vector<int> actions;
  double finalReward = 0.0;
  bool busted = false;
  bool surrendered = false;
  double trueCountAtDeal = 0.0;
  std::vector<Card> dealerCards;

  nlohmann::json toJson() const;
};

class IllegalAction : public std::logic_error {
public:
  IllegalAction(int seat, Action action, const std::string &why);
  Action action() const { return action_; }

private:
  Action action_;
};

/** Seat reward for a completed round against the dealer's final hand. */
double settleSeat(const SeatState &seat, const HandValue &dealer);

/** Dealer S17 policy: draws until the total reaches 17, standing on soft 17. */
template <class DrawFn> HandValue dealerPlay(std::vector<Card> &cards, DrawFn &&draw) {
  HandValue hv = handValue(cards);
  while (hv.total < 17) {
    cards.push_back(draw());
    hv = handValue(cards);
  }
  return hv;
}

/** Rule-legal actions for a seat's active hand, ignoring any curriculum. */
ActionMask ruleLegalActions(const SeatState &seat, Card dealerUpcard, bool doubleAfterSplit);

/** Deterministic-given-seed multi-seat table: dealing, legality, dealer S17
 * play and settlement. One instance owns its shoe and RNG. */
class Table {
public:
  Table(TableConfig cfg, uint64_t seed);

  /** Reshuffles if the cut card was reached, then deals two cards to every
   * seat and to the dealer. Naturals are resolved immediately. */
  void startRound();

  Phase phase() const { return phase_; }
  bool roundDone() const { return phase_ == Phase::Settled; }
  std::optional<int> actingSeat() const;

  ActionMask ruleLegal(int seat) const;
  ActionMask legalActions(int seat, ActionSet allowed) const;
  Observation observe(int seat, ActionSet allowed) const;

  /** Applies `action` for the acting seat. Throws IllegalAction when the
   * action is masked; the table is left unchanged in that case. */
  StepResult step(int seat, Action action, ActionSet allowed);

  /** Final reward for the seat; only meaningful once the round is settled. */
  double seatReward(int seat) const { return rewards_.at(seat); }
  const SeatState &seat(int seat) const { return seats_.at(seat); }
  int seatCount() const { return static_cast<int>(seats_.size()); }
  const std::vector<Card> &dealerCards() const { return dealer_; }
  Card dealerUpcard() const { return dealer_.front(); }
  HandValue dealerValue() const { return handValue(dealer_); }
  bool dealerDrew() const { return dealer_.size() > 2; }
  uint64_t roundId() const { return roundId_; }
  double trueCountAtDeal() const { return tcAtDeal_; }
  RoundTrace trace(int seat) const;

  const Shoe &shoe() const { return shoe_; }
  Shoe &shoe() { return shoe_; }
  const TableConfig &config() const { return cfg_; }

private:
  Card drawCard();
  void advance(int seatIndex);
  void finishRound();
  std::vector<Card> cardsInPlay() const;

  TableConfig cfg_;
  Shoe shoe_;
  Phase phase_ = Phase::Settled;
  std::vector<SeatState> seats_;
  std::vector<Card> dealer_;
  std::vector<double> rewards_;
  uint64_t roundId_ = 0;
  double tcAtDeal_ = 0.0;
};

} // namespace blackjack
