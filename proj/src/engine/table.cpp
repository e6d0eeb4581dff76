#include "blackjack/table.hpp"

#include <algorithm>
#include <string>

namespace blackjack {

bool SeatState::resolved() const {
  return std::all_of(hands.begin(), hands.end(), [](const Hand &h) { return h.resolved; });
}

bool SeatState::anyBust() const {
  return std::any_of(hands.begin(), hands.end(), [](const Hand &h) { return h.value().bust; });
}

bool SeatState::surrendered() const {
  return std::any_of(hands.begin(), hands.end(), [](const Hand &h) { return h.surrendered; });
}

Features makeFeatures(int playerTotal, int dealerUpcard, bool soft, bool canSplit, bool canDouble,
                      double trueCount) {
  const double tc = std::clamp(trueCount, -10.0, 10.0);
  return {playerTotal / 32.0, dealerUpcard / 11.0, soft ? 1.0 : 0.0,
          canSplit ? 1.0 : 0.0, canDouble ? 1.0 : 0.0, tc / 10.0};
}

nlohmann::json RoundTrace::toJson() const {
  auto labels = [](const std::vector<Card> &cards) {
    nlohmann::json arr = nlohmann::json::array();
    for (Card c : cards) arr.push_back(c.label());
    return arr;
  };
  return {{"round_id", roundId},
          {"seat", seat},
          {"initial_cards", labels(initialCards)},
          {"dealer_upcard", dealerUpcard.label()},
          {"actions", actions},
          {"final_reward", finalReward},
          {"busted", busted},
          {"surrendered", surrendered},
          {"true_count_at_deal", trueCountAtDeal},
          {"dealer_cards", labels(dealerCards)}};
}

IllegalAction::IllegalAction(int seat, Action action, const std::string &why)
    : std::logic_error("illegal action " + std::string(actionName(action)) + " for seat " +
                       std::to_string(seat) + ": " + why),
      action_(action) {}

double settleSeat(const SeatState &seat, const HandValue &dealer) {
  double reward = 0.0;
  for (const Hand &hand : seat.hands) {
    if (hand.surrendered) {
      reward -= 0.5;
      continue;
    }
    const HandValue hv = hand.value();
    const double mult = hand.betMultiplier;
    if (hv.bust) {
      reward -= mult;
    } else if (hv.blackjack) {
      reward += dealer.blackjack ? 0.0 : 1.5;
    } else if (dealer.blackjack) {
      reward -= mult;
    } else if (dealer.bust || hv.total > dealer.total) {
      reward += mult;
    } else if (hv.total < dealer.total) {
      reward -= mult;
    }
  }
  if (seat.insuranceTaken) reward += dealer.blackjack ? 1.0 : -0.5;
  return reward;
}

ActionMask ruleLegalActions(const SeatState &seat, Card dealerUpcard, bool doubleAfterSplit) {
  ActionMask m{};
  if (seat.activeHand >= seat.hands.size()) return m;
  const Hand &hand = seat.hands[seat.activeHand];
  if (hand.resolved) return m;
  const bool twoCards = hand.cards.size() == 2;
  const bool unsplit = seat.hands.size() == 1;
  m[code(Action::Stand)] = true;
  m[code(Action::Hit)] = true;
  m[code(Action::Double)] = twoCards && (!hand.fromSplit || doubleAfterSplit);
  m[code(Action::Split)] = twoCards && !seat.splitDone && hand.cards[0].rank == hand.cards[1].rank;
  m[code(Action::Surrender)] = !seat.firstDecisionMade && unsplit && twoCards;
  m[code(Action::Insurance)] =
      !seat.firstDecisionMade && unsplit && dealerUpcard.isAce() && !seat.insuranceTaken;
  return m;
}

Table::Table(TableConfig cfg, uint64_t seed) : cfg_(cfg), shoe_(cfg.deck, seed) {
  if (cfg_.seats < 1) throw std::invalid_argument("table needs at least one seat");
}

Card Table::drawCard() {
  if (!shoe_.config().infinite() && shoe_.remaining() == 0) {
    const auto inPlay = cardsInPlay();
    shoe_.reshuffle(inPlay);
  }
  return shoe_.draw();
}

std::vector<Card> Table::cardsInPlay() const {
  std::vector<Card> cards = dealer_;
  for (const auto &s : seats_)
    for (const auto &h : s.hands) cards.insert(cards.end(), h.cards.begin(), h.cards.end());
  return cards;
}

void Table::startRound() {
  if (phase_ != Phase::Settled) throw std::logic_error("round already in progress");
  if (shoe_.reshuffleDue()) shoe_.reshuffle();
  ++roundId_;
  phase_ = Phase::Dealing;
  tcAtDeal_ = shoe_.trueCount();
  seats_.assign(cfg_.seats, SeatState{});
  dealer_.clear();
  rewards_.assign(cfg_.seats, 0.0);
  for (auto &s : seats_) s.hands.emplace_back();
  for (int pass = 0; pass < 2; ++pass) {
    for (auto &s : seats_) s.hands[0].cards.push_back(drawCard());
    dealer_.push_back(drawCard());
  }
  for (auto &s : seats_) {
    s.initialCards = s.hands[0].cards;
    if (s.hands[0].value().blackjack) s.hands[0].resolved = true;
  }
  phase_ = Phase::PlayerTurns;
  if (!actingSeat()) finishRound();
}

std::optional<int> Table::actingSeat() const {
  if (phase_ != Phase::PlayerTurns) return std::nullopt;
  for (int i = 0; i < seatCount(); ++i) {
    if (!seats_[i].resolved()) return i;
  }
  return std::nullopt;
}

ActionMask Table::ruleLegal(int seat) const {
  if (phase_ != Phase::PlayerTurns) return {};
  return ruleLegalActions(seats_.at(seat), dealerUpcard(), cfg_.doubleAfterSplit);
}

ActionMask Table::legalActions(int seat, ActionSet allowed) const {
  return ruleLegal(seat) & allowed.mask();
}

Observation Table::observe(int seat, ActionSet allowed) const {
  Observation obs;
  const SeatState &s = seats_.at(seat);
  const Hand &hand = s.hands.at(std::min(s.activeHand, s.hands.size() - 1));
  const HandValue hv = hand.value();
  const ActionMask rule = ruleLegal(seat);
  obs.legal = rule & allowed.mask();
  obs.playerTotal = hv.total;
  const int up = dealerUpcard().value();
  obs.dealerUpcard = up == 1 ? 11 : up;
  obs.soft = hv.soft;
  obs.canSplit = rule[code(Action::Split)];
  obs.canDouble = rule[code(Action::Double)];
  obs.trueCount = shoe_.trueCount();
  obs.features = makeFeatures(obs.playerTotal, obs.dealerUpcard, obs.soft, obs.canSplit,
                              obs.canDouble, obs.trueCount);
  return obs;
}

StepResult Table::step(int seatIndex, Action action, ActionSet allowed) {
  const auto acting = actingSeat();
  if (!acting || *acting != seatIndex) throw IllegalAction(seatIndex, action, "seat is not acting");
  if (!allowed.contains(action)) throw IllegalAction(seatIndex, action, "not in current stage");
  if (!ruleLegal(seatIndex)[code(action)]) throw IllegalAction(seatIndex, action, "violates table rules");

  SeatState &seat = seats_[seatIndex];
  seat.actions.push_back(action);
  if (action != Action::Insurance) seat.firstDecisionMade = true;
  Hand &hand = seat.hands[seat.activeHand];

  switch (action) {
  case Action::Stand:
    hand.resolved = true;
    break;
  case Action::Hit: {
    hand.cards.push_back(drawCard());
    const HandValue hv = hand.value();
    if (hv.bust || hv.total == 21) hand.resolved = true;
    break;
  }
  case Action::Double:
    hand.betMultiplier = 2;
    hand.cards.push_back(drawCard());
    hand.resolved = true;
    break;
  case Action::Split: {
    seat.splitDone = true;
    Hand second;
    second.fromSplit = true;
    second.cards.push_back(hand.cards[1]);
    hand.cards.pop_back();
    hand.fromSplit = true;
    hand.cards.push_back(drawCard());
    second.cards.push_back(drawCard());
    const bool aces = hand.cards[0].isAce();
    seat.hands.push_back(second);
    for (Hand &h : seat.hands) {
      if (aces || h.value().total == 21) h.resolved = true;
    }
    break;
  }
  case Action::Surrender:
    hand.surrendered = true;
    hand.resolved = true;
    break;
  case Action::Insurance:
    seat.insuranceTaken = true;
    break;
  }

  StepResult result;
  result.handDone = seat.hands[seat.activeHand].resolved;
  advance(seatIndex);
  result.seatDone = seat.resolved();
  if (!actingSeat()) finishRound();
  result.roundDone = roundDone();
  return result;
}

void Table::advance(int seatIndex) {
  SeatState &seat = seats_[seatIndex];
  while (seat.activeHand < seat.hands.size() && seat.hands[seat.activeHand].resolved) {
    ++seat.activeHand;
  }
  if (seat.activeHand >= seat.hands.size()) seat.activeHand = seat.hands.size() - 1;
}

void Table::finishRound() {
  phase_ = Phase::DealerTurn;
  const bool anyLive = std::any_of(seats_.begin(), seats_.end(), [](const SeatState &s) {
    return std::any_of(s.hands.begin(), s.hands.end(),
                       [](const Hand &h) { return !h.surrendered && !h.value().bust; });
  });
  HandValue dealer = handValue(dealer_);
  if (anyLive) dealer = dealerPlay(dealer_, [this] { return drawCard(); });
  for (int i = 0; i < seatCount(); ++i) rewards_[i] = settleSeat(seats_[i], dealer);
  phase_ = Phase::Settled;
}

RoundTrace Table::trace(int seatIndex) const {
  const SeatState &s = seats_.at(seatIndex);
  RoundTrace t;
  t.roundId = roundId_;
  t.seat = seatIndex;
  t.initialCards = s.initialCards;
  t.dealerUpcard = dealer_.front();
  for (Action a : s.actions) t.actions.push_back(code(a));
  t.finalReward = rewards_.at(seatIndex);
  t.busted = s.anyBust();
  t.surrendered = s.surrendered();
  t.trueCountAtDeal = tcAtDeal_;
  t.dealerCards = dealer_;
  return t;
}

} // namespace blackjack
