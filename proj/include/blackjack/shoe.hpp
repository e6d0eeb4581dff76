#pragma once

#include "blackjack/card.hpp"
#include "blackjack/rng.hpp"

#include <array>
#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <vector>

namespace blackjack {

/** Shoe composition. decks == 0 denotes an infinite deck. */
struct DeckConfig {
  int decks = 8;
  double penetration = 0.9;

  bool infinite() const { return decks == 0; }
  int cardCount() const { return 52 * decks; }
  /** "8-deck" or "infinite" */
  std::string label() const;
  /** Throws std::invalid_argument on decks < 0 or penetration outside (0,1]. */
  void validate() const;
};

/** Parses "1", "4", "8", "inf"/"infinite". */
int parseDeckCount(std::string_view text);

/** Hi-Lo true count: running / max(remaining/52, 0.5). */
double trueCountOf(int runningCount, int remainingCards);

class Shoe {
public:
  Shoe(DeckConfig cfg, uint64_t seed);

  Card draw();

  /** Cut-card check, evaluated by the table between rounds only. */
  bool reshuffleDue() const;
  /** Reshuffles the full shoe. Cards still on the table are withheld from
   * the new shoe and counted as dealt. */
  void reshuffle(std::span<const Card> inPlay = {});

  /** ceil(penetration * cards); dealt count at which the cut card is reached. */
  int cutThreshold() const { return cut_; }
  int runningCount() const { return running_; }
  int dealt() const { return dealt_; }
  int remaining() const;
  /** running / max(remaining/52, 0.5); 0 for an infinite deck. */
  double trueCount() const;
  /** Undealt cards per rank (index rank-1). Infinite shoes report zeros. */
  std::array<int, kNumRanks> remainingByRank() const;
  uint64_t shuffles() const { return shuffles_; }
  const DeckConfig &config() const { return cfg_; }

  /** Test hook: these cards are dealt next, in order, ahead of the shoe. */
  void stack(std::span<const Card> cards);
  /** Test hook: every draw cycles through `cards` forever, bypassing the shoe. */
  void rig(std::vector<Card> cards);

private:
  void observe(Card c);

  DeckConfig cfg_;
  Rng rng_;
  std::vector<Card> cards_;
  size_t next_ = 0;
  int cut_ = 0;
  int dealt_ = 0;
  int running_ = 0;
  uint64_t shuffles_ = 0;
  std::deque<Card> stacked_;
  std::vector<Card> rigged_;
  size_t rigPos_ = 0;
};

} // namespace blackjack
