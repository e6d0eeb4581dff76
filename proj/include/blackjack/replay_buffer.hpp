#pragma once

#include "blackjack/action.hpp"
#include "blackjack/rng.hpp"
#include "blackjack/table.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace blackjack {

struct ReplayEntry {
  Features state{};
  int action = 0;
  double reward = 0.0;
  Features next{};
  ActionMask nextLegal{};
  bool done = false;
};

/** Fixed-capacity ring; the oldest entry is overwritten first. */
class ReplayBuffer {
public:
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("replay capacity must be positive");
    entries_.reserve(std::min<size_t>(capacity_, 1 << 16));
  }

  void push(const ReplayEntry &e) {
    if (entries_.size() < capacity_) {
      entries_.push_back(e);
    } else {
      entries_[head_] = e;
      head_ = (head_ + 1) % capacity_;
    }
  }

  size_t size() const { return entries_.size(); }
  size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }

  /** i-th entry counting from the oldest retained one. */
  const ReplayEntry &at(size_t i) const { return entries_.at((head_ + i) % entries_.size()); }

  /** `count` distinct positions, uniform without replacement (Floyd). */
  std::vector<size_t> sampleIndices(size_t count, Rng &rng) const {
    const size_t n = entries_.size();
    if (count > n) throw std::invalid_argument("sample larger than buffer");
    std::vector<size_t> picked;
    picked.reserve(count);
    for (size_t j = n - count; j < n; ++j) {
      const size_t t = rng.below(j + 1);
      if (std::find(picked.begin(), picked.end(), t) == picked.end()) {
        picked.push_back(t);
      } else {
        picked.push_back(j);
      }
    }
    return picked;
  }

  const ReplayEntry &raw(size_t physical) const { return entries_[physical]; }
  void clear() {
    entries_.clear();
    head_ = 0;
  }

private:
  size_t capacity_;
  size_t head_ = 0;
  std::vector<ReplayEntry> entries_;
};

} // namespace blackjack
