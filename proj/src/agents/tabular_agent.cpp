#include "blackjack/tabular_agent.hpp"

#include <algorithm>
#include <cmath>

namespace blackjack {

StateKey stateKey(const Observation &obs) {
  const int tc = static_cast<int>(std::lround(obs.trueCount));
  return {obs.playerTotal, obs.dealerUpcard, obs.soft ? 1 : 0, obs.canSplit ? 1 : 0,
          obs.canDouble ? 1 : 0, std::clamp(tc, -5, 5)};
}

TabularAgent::TabularAgent(TabularParams params, uint64_t seed)
    : params_(params), table_(params.alpha0), epsilon_(params.epsilon), rng_(seed) {}

Action TabularAgent::selectAction(const Observation &obs, bool greedy) {
  return epsilonGreedy(qValues(obs), obs.legal, epsilon_, greedy, rng_);
}

QValues TabularAgent::qValues(const Observation &obs) const { return table_.values(stateKey(obs)); }

void TabularAgent::learn(const Experience &exp) {
  table_.update(stateKey(exp.state), exp.action, exp.reward, stateKey(exp.next), exp.next.legal, exp.done,
                params_.gamma);
}

void TabularAgent::endEpisode() { epsilon_ = std::max(epsilon_ * params_.epsilonDecay, params_.epsilonMin); }

std::unique_ptr<Agent> TabularAgent::clonePolicy() const { return std::make_unique<TabularAgent>(*this); }

nlohmann::json TabularAgent::checkpoint() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto &[key, entry] : table_.entries()) {
    rows.push_back({{"key", {key.playerTotal, key.dealerUpcard, key.soft, key.canSplit, key.canDouble, key.trueCount}},
                    {"q", entry.q},
                    {"visits", entry.visits}});
  }
  return {{"format", "blackjack-agent"},
          {"version", kCheckpointVersion},
          {"kind", "tabular"},
          {"alpha0", params_.alpha0},
          {"gamma", params_.gamma},
          {"epsilon_decay", params_.epsilonDecay},
          {"epsilon_min", params_.epsilonMin},
          {"epsilon", epsilon_},
          {"table", rows}};
}

std::unique_ptr<TabularAgent> TabularAgent::fromCheckpoint(const nlohmann::json &ckpt, uint64_t seed) {
  TabularParams p;
  p.alpha0 = ckpt.at("alpha0").get<double>();
  p.gamma = ckpt.at("gamma").get<double>();
  p.epsilonDecay = ckpt.at("epsilon_decay").get<double>();
  p.epsilonMin = ckpt.at("epsilon_min").get<double>();
  p.epsilon = ckpt.at("epsilon").get<double>();
  auto agent = std::make_unique<TabularAgent>(p, seed);
  for (const auto &row : ckpt.at("table")) {
    const auto k = row.at("key").get<std::vector<int>>();
    if (k.size() != 6) throw CheckpointError("tabular key must have six fields");
    StateKey key{k[0], k[1], k[2], k[3], k[4], k[5]};
    auto &e = agent->table_.entries()[key];
    e.q = row.at("q").get<QValues>();
    e.visits = row.at("visits").get<std::array<uint64_t, kNumActions>>();
  }
  return agent;
}

} // namespace blackjack
