#pragma once

#include "blackjack/agent.hpp"

#include <compare>
#include <map>

namespace blackjack {

/** Discrete state for lookup: (total, upcard, soft, can split, can double, rounded TC in [-5,5]). */
struct StateKey {
  int playerTotal = 0;
  int dealerUpcard = 0;
  int soft = 0;
  int canSplit = 0;
  int canDouble = 0;
  int trueCount = 0;

  auto operator<=>(const StateKey &) const = default;
};

StateKey stateKey(const Observation &obs);

/** Q-values and visit counts keyed by a discrete state. The step size is
 * alpha0 / (1 + visits(s, a)) and the visit count is incremented after use. */
template <class Key> class QTable {
public:
  struct Entry {
    QValues q{};
    std::array<uint64_t, kNumActions> visits{};
  };

  explicit QTable(double alpha0 = 0.1) : alpha0_(alpha0) {}

  double alpha(const Key &key, Action a) const {
    auto it = entries_.find(key);
    const uint64_t n = it == entries_.end() ? 0 : it->second.visits[code(a)];
    return alpha0_ / (1.0 + static_cast<double>(n));
  }

  QValues values(const Key &key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? QValues{} : it->second.q;
  }

  double maxLegal(const Key &key, const ActionMask &legal) const {
    const QValues q = values(key);
    double best = 0.0;
    bool any = false;
    for (int a = 0; a < kNumActions; ++a) {
      if (!legal[a]) continue;
      if (!any || q[a] > best) best = q[a];
      any = true;
    }
    return best;
  }

  /** Watkins update; returns the TD error. */
  double update(const Key &key, Action a, double reward, const Key &nextKey, const ActionMask &nextLegal,
                bool done, double gamma) {
    const double bootstrap = done ? 0.0 : gamma * maxLegal(nextKey, nextLegal);
    const double step = alpha(key, a);
    Entry &e = entries_[key];
    const double td = reward + bootstrap - e.q[code(a)];
    e.q[code(a)] += step * td;
    ++e.visits[code(a)];
    return td;
  }

  uint64_t visits(const Key &key, Action a) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.visits[code(a)];
  }

  double alpha0() const { return alpha0_; }
  const std::map<Key, Entry> &entries() const { return entries_; }
  std::map<Key, Entry> &entries() { return entries_; }

private:
  double alpha0_;
  std::map<Key, Entry> entries_;
};

struct TabularParams {
  double alpha0 = 0.1;
  double gamma = 1.0;
  double epsilon = 1.0;
  double epsilonDecay = 0.9999;
  double epsilonMin = 0.05;
};

class TabularAgent : public Agent {
public:
  explicit TabularAgent(TabularParams params = {}, uint64_t seed = 0);

  AgentKind kind() const override { return AgentKind::Tabular; }
  Action selectAction(const Observation &obs, bool greedy) override;
  QValues qValues(const Observation &obs) const override;
  void learn(const Experience &exp) override;
  void endEpisode() override;
  double epsilon() const override { return epsilon_; }
  std::unique_ptr<Agent> clonePolicy() const override;
  nlohmann::json checkpoint() const override;
  static std::unique_ptr<TabularAgent> fromCheckpoint(const nlohmann::json &ckpt, uint64_t seed);

  double adaptiveAlpha(const Observation &obs, Action a) const { return table_.alpha(stateKey(obs), a); }
  const QTable<StateKey> &table() const { return table_; }
  const TabularParams &params() const { return params_; }
  void setEpsilon(double eps) { epsilon_ = eps; }

private:
  TabularParams params_;
  QTable<StateKey> table_;
  double epsilon_;
  Rng rng_;
};

} // namespace blackjack
