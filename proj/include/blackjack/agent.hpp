#pragma once

#include "blackjack/action.hpp"
#include "blackjack/rng.hpp"
#include "blackjack/table.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

namespace blackjack {

enum class AgentKind { Tabular, Dqn, Fixed };

std::string_view agentKindName(AgentKind kind);
AgentKind parseAgentKind(std::string_view text);

using QValues = std::array<double, kNumActions>;

struct Experience {
  Observation state;
  Action action = Action::Stand;
  double reward = 0.0;
  Observation next;
  bool done = false;
};

class NoLegalAction : public std::logic_error {
public:
  NoLegalAction() : std::logic_error("observation has no legal action") {}
};

class CheckpointError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/** Argmax restricted to legal entries; ties go to the lowest action code. */
Action maskedArgmax(const QValues &q, const ActionMask &legal);

/** Epsilon-greedy over legal actions. The exploration draw is skipped when greedy. */
Action epsilonGreedy(const QValues &q, const ActionMask &legal, double epsilon, bool greedy, Rng &rng);

/** Shared learner interface used by the harness for both agent families. */
class Agent {
public:
  virtual ~Agent() = default;

  virtual AgentKind kind() const = 0;
  virtual Action selectAction(const Observation &obs, bool greedy) = 0;
  virtual QValues qValues(const Observation &obs) const = 0;
  virtual void learn(const Experience &exp) = 0;
  /** Called once per finished episode: epsilon decay. */
  virtual void endEpisode() = 0;
  virtual void onStageEntered(int /*stageId*/) {}
  virtual double epsilon() const = 0;

  /** Value copy of everything needed to act and to checkpoint; replay
   * memory is not carried over. */
  virtual std::unique_ptr<Agent> clonePolicy() const = 0;
  virtual nlohmann::json checkpoint() const = 0;

  /** Greedy choice with no exploration and no state change. */
  Action greedyAction(const Observation &obs) const { return maskedArgmax(qValues(obs), obs.legal); }
};

/** Wraps a fixed decision rule (always-stand, chart-following, ...). */
class PolicyAgent : public Agent {
public:
  using Policy = std::function<Action(const Observation &)>;

  PolicyAgent(std::string name, Policy policy) : name_(std::move(name)), policy_(std::move(policy)) {}

  AgentKind kind() const override { return AgentKind::Fixed; }
  Action selectAction(const Observation &obs, bool) override { return policy_(obs); }
  QValues qValues(const Observation &obs) const override;
  void learn(const Experience &) override {}
  void endEpisode() override {}
  double epsilon() const override { return 0.0; }
  std::unique_ptr<Agent> clonePolicy() const override { return std::make_unique<PolicyAgent>(*this); }
  nlohmann::json checkpoint() const override;

private:
  std::string name_;
  Policy policy_;
};

/** Restores a tabular or DQN agent from `checkpoint()` output. Throws CheckpointError. */
std::unique_ptr<Agent> agentFromCheckpoint(const nlohmann::json &ckpt, uint64_t seed = 0);

void saveCheckpoint(const Agent &agent, const std::filesystem::path &path);
std::unique_ptr<Agent> loadCheckpoint(const std::filesystem::path &path, uint64_t seed = 0);

inline constexpr int kCheckpointVersion = 1;

} // namespace blackjack
