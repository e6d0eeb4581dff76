#pragma once

#include "blackjack/agent.hpp"
#include "blackjack/mlp.hpp"
#include "blackjack/replay_buffer.hpp"

#include <span>

namespace blackjack {

struct DqnParams {
  std::vector<int> layerSizes = {kFeatureCount, 128, 128, kNumActions};
  double learningRate = 0.0005;
  double gamma = 1.0;
  size_t batchSize = 64;
  size_t warmup = 1000;
  size_t replayCapacity = 100000;
  int64_t targetSyncEvery = 1000;
  double epsilon = 1.0;
  double epsilonDecay = 0.99995;
  double epsilonMin = 0.05;
  double stageLrFactor = 1.2;
  int stageLrFromStage = 3;
  double huberDelta = 1.0;
  AdamConfig adam;
};

/** Vanilla DQN: online and target MLPs, uniform replay, Huber TD loss, Adam. */
class DqnAgent : public Agent {
public:
  explicit DqnAgent(DqnParams params = {}, uint64_t seed = 0);

  AgentKind kind() const override { return AgentKind::Dqn; }
  Action selectAction(const Observation &obs, bool greedy) override;
  QValues qValues(const Observation &obs) const override;
  /** Stores the transition and trains one batch once the buffer holds `warmup` entries. */
  void learn(const Experience &exp) override;
  void endEpisode() override;
  void onStageEntered(int stageId) override;
  double epsilon() const override { return epsilon_; }
  std::unique_ptr<Agent> clonePolicy() const override;
  nlohmann::json checkpoint() const override;
  static std::unique_ptr<DqnAgent> fromCheckpoint(const nlohmann::json &ckpt, uint64_t seed);

  /** One optimizer step on the online net; returns the batch loss. */
  double trainBatch(std::span<const ReplayEntry> batch);
  /** Bootstrapped targets r + gamma * (1 - done) * max_legal target(next). */
  Eigen::VectorXd targets(std::span<const ReplayEntry> batch) const;
  void syncTarget() { target_ = online_; }

  const Mlp &online() const { return online_; }
  Mlp &online() { return online_; }
  const Mlp &target() const { return target_; }
  const ReplayBuffer &buffer() const { return buffer_; }
  const DqnParams &params() const { return params_; }
  double learningRate() const { return lr_; }
  bool stageBoostApplied() const { return boosted_; }
  int64_t stepCounter() const { return steps_; }
  void setEpsilon(double eps) { epsilon_ = eps; }

private:
  DqnParams params_;
  Rng rng_;
  Mlp online_;
  Mlp target_;
  Adam adam_;
  ReplayBuffer buffer_;
  double lr_;
  bool boosted_ = false;
  double epsilon_;
  int64_t steps_ = 0;
};

} // namespace blackjack
