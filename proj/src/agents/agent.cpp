#include "blackjack/agent.hpp"
#include "blackjack/dqn_agent.hpp"
#include "blackjack/tabular_agent.hpp"

#include <fstream>

namespace blackjack {

std::string_view agentKindName(AgentKind kind) {
  switch (kind) {
  case AgentKind::Tabular: return "tabular";
  case AgentKind::Dqn: return "dqn";
  case AgentKind::Fixed: return "fixed";
  }
  return "?";
}

AgentKind parseAgentKind(std::string_view text) {
  if (text == "tabular") return AgentKind::Tabular;
  if (text == "dqn") return AgentKind::Dqn;
  throw std::invalid_argument("agent must be tabular or dqn");
}

Action maskedArgmax(const QValues &q, const ActionMask &legal) {
  int best = -1;
  for (int a = 0; a < kNumActions; ++a) {
    if (!legal[a]) continue;
    if (best < 0 || q[a] > q[best]) best = a;
  }
  if (best < 0) throw NoLegalAction();
  return static_cast<Action>(best);
}

Action epsilonGreedy(const QValues &q, const ActionMask &legal, double epsilon, bool greedy, Rng &rng) {
  if (!greedy && rng.uniform() < epsilon) {
    const int n = countLegal(legal);
    if (n == 0) throw NoLegalAction();
    int pick = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
    for (int a = 0; a < kNumActions; ++a) {
      if (legal[a] && pick-- == 0) return static_cast<Action>(a);
    }
  }
  return maskedArgmax(q, legal);
}

QValues PolicyAgent::qValues(const Observation &obs) const {
  QValues q{};
  q[code(policy_(obs))] = 1.0;
  return q;
}

nlohmann::json PolicyAgent::checkpoint() const {
  return {{"format", "blackjack-agent"}, {"version", kCheckpointVersion}, {"kind", "fixed"}, {"name", name_}};
}

std::unique_ptr<Agent> agentFromCheckpoint(const nlohmann::json &ckpt, uint64_t seed) {
  try {
    if (ckpt.value("format", "") != "blackjack-agent") throw CheckpointError("not an agent checkpoint");
    if (ckpt.at("version").get<int>() != kCheckpointVersion) throw CheckpointError("unsupported checkpoint version");
    const std::string kind = ckpt.at("kind").get<std::string>();
    if (kind == "tabular") return TabularAgent::fromCheckpoint(ckpt, seed);
    if (kind == "dqn") return DqnAgent::fromCheckpoint(ckpt, seed);
    throw CheckpointError("checkpoint kind '" + kind + "' cannot be restored");
  } catch (const nlohmann::json::exception &e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument &e) {
    throw CheckpointError(std::string("inconsistent checkpoint: ") + e.what());
  }
}

void saveCheckpoint(const Agent &agent, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write " + path.string());
  out << agent.checkpoint().dump() << '\n';
}

std::unique_ptr<Agent> loadCheckpoint(const std::filesystem::path &path, uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception &e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
  return agentFromCheckpoint(j, seed);
}

} // namespace blackjack
