#include "blackjack/shoe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blackjack {

std::string DeckConfig::label() const {
  return infinite() ? std::string("infinite") : std::to_string(decks) + "-deck";
}

void DeckConfig::validate() const {
  if (decks < 0) throw std::invalid_argument("deck count must be >= 0");
  if (!(penetration > 0.0 && penetration <= 1.0))
    throw std::invalid_argument("penetration must lie in (0, 1]");
}

int parseDeckCount(std::string_view text) {
  if (text == "inf" || text == "infinite") return 0;
  if (text == "1") return 1;
  if (text == "4") return 4;
  if (text == "8") return 8;
  throw std::invalid_argument("deck count must be one of 1, 4, 8, inf");
}

Shoe::Shoe(DeckConfig cfg, uint64_t seed) : cfg_(cfg), rng_(seed) {
  cfg_.validate();
  if (!cfg_.infinite()) {
    cut_ = static_cast<int>(std::ceil(cfg_.penetration * cfg_.cardCount() - 1e-9));
    reshuffle();
    shuffles_ = 0;
  }
}

void Shoe::reshuffle(std::span<const Card> inPlay) {
  running_ = 0;
  dealt_ = 0;
  next_ = 0;
  ++shuffles_;
  if (cfg_.infinite()) return;
  cards_.clear();
  cards_.reserve(cfg_.cardCount());
  const auto deck = standardDeck();
  for (int d = 0; d < cfg_.decks; ++d) cards_.insert(cards_.end(), deck.begin(), deck.end());
  for (Card c : inPlay) {
    auto it = std::find(cards_.begin(), cards_.end(), c);
    if (it != cards_.end()) {
      cards_.erase(it);
      ++dealt_;
    }
  }
  rng_.shuffle(cards_.begin(), cards_.end());
}

void Shoe::observe(Card c) {
  if (!cfg_.infinite()) running_ += hiLoDelta(c);
  ++dealt_;
}

Card Shoe::draw() {
  if (!rigged_.empty()) {
    Card c = rigged_[rigPos_];
    rigPos_ = (rigPos_ + 1) % rigged_.size();
    return c;
  }
  if (!stacked_.empty()) {
    Card c = stacked_.front();
    stacked_.pop_front();
    observe(c);
    return c;
  }
  if (cfg_.infinite()) {
    Card c{static_cast<Rank>(rng_.below(kNumRanks) + 1)};
    ++dealt_;
    return c;
  }
  if (next_ >= cards_.size()) throw std::logic_error("shoe exhausted");
  Card c = cards_[next_++];
  observe(c);
  return c;
}

bool Shoe::reshuffleDue() const { return !cfg_.infinite() && dealt_ >= cut_; }

int Shoe::remaining() const {
  if (cfg_.infinite()) return 0;
  return static_cast<int>(cards_.size() - next_);
}

double trueCountOf(int runningCount, int remainingCards) {
  return runningCount / std::max(remainingCards / 52.0, 0.5);
}

double Shoe::trueCount() const {
  if (cfg_.infinite()) return 0.0;
  return trueCountOf(running_, remaining());
}

std::array<int, kNumRanks> Shoe::remainingByRank() const {
  std::array<int, kNumRanks> out{};
  if (cfg_.infinite()) return out;
  for (size_t i = next_; i < cards_.size(); ++i) ++out[static_cast<int>(cards_[i].rank) - 1];
  return out;
}

void Shoe::stack(std::span<const Card> cards) {
  stacked_.insert(stacked_.end(), cards.begin(), cards.end());
}

void Shoe::rig(std::vector<Card> cards) {
  rigged_ = std::move(cards);
  rigPos_ = 0;
}

} // namespace blackjack
