#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace blackjack {

enum class Rank : uint8_t {
  Ace = 1, Two, Three, Four, Five, Six, Seven, Eight, Nine, Ten, Jack, Queen, King
};

inline constexpr int kNumRanks = 13;

struct Card {
  Rank rank = Rank::Two;

  /** Blackjack value: faces count 10, Ace reported as 1. */
  constexpr int value() const {
    const int r = static_cast<int>(rank);
    return r >= 10 ? 10 : r;
  }
  constexpr bool isAce() const { return rank == Rank::Ace; }

  std::string label() const;
  static std::optional<Card> fromLabel(std::string_view label);

  friend constexpr bool operator==(Card, Card) = default;
};

/** Hi-Lo tag: +1 for 2-6, 0 for 7-9, -1 for tens and aces. */
constexpr int hiLoDelta(Card c) {
  const int v = c.value();
  if (v >= 2 && v <= 6) return 1;
  if (v >= 7 && v <= 9) return 0;
  return -1;
}

struct HandValue {
  int total = 0;
  bool soft = false;
  bool blackjack = false;
  bool bust = false;

  friend bool operator==(const HandValue &, const HandValue &) = default;
};

/** Best total <= 21 when one exists, otherwise the minimum total.
 * `fromSplit` suppresses the natural flag for post-split hands. */
HandValue handValue(std::span<const Card> cards, bool fromSplit = false);

/** Cards for a rank given by blackjack value (1 or 11 maps to Ace). */
Card cardOfValue(int value);

/** The 52 cards of one standard deck in rank-major order. */
std::array<Card, 52> standardDeck();

/** Convenience for tests and fixtures: {"A","K","5"} -> cards. Throws on bad labels. */
std::vector<Card> parseCards(std::initializer_list<std::string_view> labels);

} // namespace blackjack
