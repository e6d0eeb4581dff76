#include "blackjack/evaluation.hpp"

namespace blackjack {

void Metrics::add(double reward, bool busted, bool surrendered) {
  ++episodes;
  if (reward > 0) {
    ++wins;
  } else if (reward < 0) {
    ++losses;
  } else {
    ++pushes;
  }
  if (busted) ++busts;
  if (surrendered) ++surrenders;
  totalReward += reward;
}

nlohmann::json Metrics::toJson() const {
  return {{"episodes", episodes},     {"wins", wins},
          {"pushes", pushes},         {"losses", losses},
          {"busts", busts},           {"surrenders", surrenders},
          {"total_reward", totalReward}, {"win_rate", winRate()},
          {"push_rate", pushRate()},  {"loss_rate", lossRate()},
          {"bust_rate", bustRate()},  {"avg_reward", avgReward()}};
}

Metrics Metrics::fromJson(const nlohmann::json &j) {
  Metrics m;
  m.episodes = j.at("episodes").get<long>();
  m.wins = j.at("wins").get<long>();
  m.pushes = j.at("pushes").get<long>();
  m.losses = j.at("losses").get<long>();
  m.busts = j.at("busts").get<long>();
  m.surrenders = j.at("surrenders").get<long>();
  m.totalReward = j.at("total_reward").get<double>();
  return m;
}

Metrics evaluateOn(Table &table, const Agent &agent, ActionSet allowed, long episodes, CellVisits *visits,
                   const EpisodeSink &sink) {
  Metrics m;
  while (m.episodes < episodes) {
    table.startRound();
    while (auto seat = table.actingSeat()) {
      const Observation obs = table.observe(*seat, allowed);
      if (visits) {
        if (auto cell = cellOf(obs)) ++(*visits)[*cell];
      }
      table.step(*seat, agent.greedyAction(obs), allowed);
    }
    for (int s = 0; s < table.seatCount() && m.episodes < episodes; ++s) {
      const SeatState &seat = table.seat(s);
      m.add(table.seatReward(s), seat.anyBust(), seat.surrendered());
      if (sink) sink(table, s);
    }
  }
  return m;
}

Metrics runEvaluation(const Agent &agent, const TableConfig &cfg, ActionSet allowed, long episodes, uint64_t seed,
                      CellVisits *visits) {
  Table table(cfg, seed);
  return evaluateOn(table, agent, allowed, episodes, visits);
}

} // namespace blackjack
