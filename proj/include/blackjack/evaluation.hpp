#pragma once

#include "blackjack/agent.hpp"
#include "blackjack/curriculum.hpp"
#include "blackjack/table.hpp"

#include <functional>

namespace blackjack {

/** Per-episode outcome counts. An episode is one seat's round: won iff the
 * seat's total reward is positive, pushed iff zero, busted iff any hand busted. */
struct Metrics {
  long episodes = 0;
  long wins = 0;
  long pushes = 0;
  long losses = 0;
  long busts = 0;
  long surrenders = 0;
  double totalReward = 0.0;

  void add(double reward, bool busted, bool surrendered);
  double winRate() const { return ratio(wins); }
  double pushRate() const { return ratio(pushes); }
  double lossRate() const { return ratio(losses); }
  double bustRate() const { return ratio(busts); }
  double avgReward() const { return episodes ? totalReward / static_cast<double>(episodes) : 0.0; }

  nlohmann::json toJson() const;
  static Metrics fromJson(const nlohmann::json &j);
  bool operator==(const Metrics &) const = default;

private:
  double ratio(long n) const { return episodes ? static_cast<double>(n) / static_cast<double>(episodes) : 0.0; }
};

/** Called once per counted episode with the settled table and the seat. */
using EpisodeSink = std::function<void(const Table &, int)>;

/** Plays `episodes` greedy episodes on an existing table with no learning.
 * Decision points are tallied into `visits` when given. */
Metrics evaluateOn(Table &table, const Agent &agent, ActionSet allowed, long episodes, CellVisits *visits = nullptr,
                   const EpisodeSink &sink = {});

/** Greedy evaluation on a fresh table seeded with `seed`. */
Metrics runEvaluation(const Agent &agent, const TableConfig &cfg, ActionSet allowed, long episodes, uint64_t seed,
                      CellVisits *visits = nullptr);

} // namespace blackjack
