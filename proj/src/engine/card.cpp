#include "blackjack/card.hpp"

#include <stdexcept>

namespace blackjack {

namespace {
constexpr std::array<std::string_view, kNumRanks> kLabels = {
    "A", "2", "3", "4", "5", "6", "7", "8", "9", "10", "J", "Q", "K"};
}

std::string Card::label() const {
  return std::string(kLabels[static_cast<int>(rank) - 1]);
}

std::optional<Card> Card::fromLabel(std::string_view label) {
  for (int i = 0; i < kNumRanks; ++i) {
    if (kLabels[i] == label) return Card{static_cast<Rank>(i + 1)};
  }
  if (label == "T") return Card{Rank::Ten};
  return std::nullopt;
}

HandValue handValue(std::span<const Card> cards, bool fromSplit) {
  HandValue hv;
  int hard = 0;
  bool hasAce = false;
  for (Card c : cards) {
    hard += c.value();
    hasAce = hasAce || c.isAce();
  }
  if (hasAce && hard + 10 <= 21) {
    hv.total = hard + 10;
    hv.soft = true;
  } else {
    hv.total = hard;
  }
  hv.bust = hv.total > 21;
  hv.blackjack = !fromSplit && cards.size() == 2 && hv.total == 21;
  return hv;
}

Card cardOfValue(int value) {
  if (value == 1 || value == 11) return Card{Rank::Ace};
  if (value < 2 || value > 10) throw std::invalid_argument("card value out of range");
  return Card{static_cast<Rank>(value)};
}

std::array<Card, 52> standardDeck() {
  std::array<Card, 52> deck{};
  int i = 0;
  for (int r = 1; r <= kNumRanks; ++r) {
    for (int s = 0; s < 4; ++s) deck[i++] = Card{static_cast<Rank>(r)};
  }
  return deck;
}

std::vector<Card> parseCards(std::initializer_list<std::string_view> labels) {
  std::vector<Card> out;
  out.reserve(labels.size());
  for (auto l : labels) {
    auto c = Card::fromLabel(l);
    if (!c) throw std::invalid_argument("bad card label: " + std::string(l));
    out.push_back(*c);
  }
  return out;
}

} // namespace blackjack
