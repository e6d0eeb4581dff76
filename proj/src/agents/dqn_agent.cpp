#include "blackjack/dqn_agent.hpp"

#include <algorithm>

namespace blackjack {

namespace {

Eigen::VectorXd toVector(const Features &f) { return Eigen::Map<const Eigen::VectorXd>(f.data(), kFeatureCount); }

std::vector<double> flattenLayers(const LayerGrads &layers) {
  std::vector<double> out;
  for (const auto &l : layers) {
    out.insert(out.end(), l.weight.data(), l.weight.data() + l.weight.size());
    out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return out;
}

LayerGrads unflattenLayers(const Mlp &shape, const std::vector<double> &flat) {
  Mlp tmp = shape;
  tmp.setFlat(flat);
  return tmp.layers();
}

Mlp restoreNet(const std::vector<int> &sizes, const nlohmann::json &params) {
  Mlp net(sizes);
  const auto flat = params.get<std::vector<double>>();
  if (flat.size() != net.parameterCount()) throw CheckpointError("parameter array length does not match layer sizes");
  net.setFlat(flat);
  return net;
}

} // namespace

DqnAgent::DqnAgent(DqnParams params, uint64_t seed)
    : params_(std::move(params)), rng_(seed), buffer_(params_.replayCapacity), lr_(params_.learningRate),
      epsilon_(params_.epsilon) {
  if (params_.layerSizes.front() != kFeatureCount || params_.layerSizes.back() != kNumActions)
    throw std::invalid_argument("network must map 6 features to 6 action values");
  if (!(lr_ > 0.0)) throw std::invalid_argument("learning rate must be positive");
  Rng init(Rng::derive(seed, 0xD1));
  online_ = Mlp::heUniform(params_.layerSizes, init);
  target_ = online_;
  adam_ = Adam(online_, params_.adam);
}

QValues DqnAgent::qValues(const Observation &obs) const {
  const Eigen::VectorXd out = online_.forward(toVector(obs.features));
  QValues q{};
  for (int a = 0; a < kNumActions; ++a) q[a] = out(a);
  return q;
}

Action DqnAgent::selectAction(const Observation &obs, bool greedy) {
  if (!greedy && rng_.uniform() < epsilon_) {
    // Skip the forward pass when exploring; the draw sequence matches epsilonGreedy.
    const int n = countLegal(obs.legal);
    if (n == 0) throw NoLegalAction();
    int pick = static_cast<int>(rng_.below(static_cast<uint64_t>(n)));
    for (int a = 0; a < kNumActions; ++a) {
      if (obs.legal[a] && pick-- == 0) return static_cast<Action>(a);
    }
  }
  return maskedArgmax(qValues(obs), obs.legal);
}

Eigen::VectorXd DqnAgent::targets(std::span<const ReplayEntry> batch) const {
  const auto n = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd next(kFeatureCount, n);
  for (Eigen::Index j = 0; j < n; ++j) next.col(j) = toVector(batch[j].next);
  const Eigen::MatrixXd qNext = target_.forward(next);
  Eigen::VectorXd y(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const ReplayEntry &e = batch[j];
    double bootstrap = 0.0;
    if (!e.done) {
      bool any = false;
      for (int a = 0; a < kNumActions; ++a) {
        if (!e.nextLegal[a]) continue;
        if (!any || qNext(a, j) > bootstrap) bootstrap = qNext(a, j);
        any = true;
      }
    }
    y(j) = e.reward + params_.gamma * bootstrap;
  }
  return y;
}

double DqnAgent::trainBatch(std::span<const ReplayEntry> batch) {
  const auto n = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd x(kFeatureCount, n);
  std::vector<int> actions(batch.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    x.col(j) = toVector(batch[j].state);
    actions[j] = batch[j].action;
  }
  const Eigen::VectorXd y = targets(batch);
  LayerGrads grads;
  const double loss = huberTdLoss(online_, x, actions, y, params_.huberDelta, &grads);
  adam_.step(online_, grads, lr_);
  ++steps_;
  if (steps_ % params_.targetSyncEvery == 0) syncTarget();
  return loss;
}

void DqnAgent::learn(const Experience &exp) {
  ReplayEntry e;
  e.state = exp.state.features;
  e.action = code(exp.action);
  e.reward = exp.reward;
  e.next = exp.next.features;
  e.nextLegal = exp.next.legal;
  e.done = exp.done;
  buffer_.push(e);
  if (buffer_.size() < std::max(params_.warmup, params_.batchSize)) return;
  const auto idx = buffer_.sampleIndices(params_.batchSize, rng_);
  std::vector<ReplayEntry> batch;
  batch.reserve(idx.size());
  for (size_t i : idx) batch.push_back(buffer_.raw(i));
  trainBatch(batch);
}

void DqnAgent::endEpisode() { epsilon_ = std::max(epsilon_ * params_.epsilonDecay, params_.epsilonMin); }

void DqnAgent::onStageEntered(int stageId) {
  if (stageId >= params_.stageLrFromStage && !boosted_) {
    lr_ *= params_.stageLrFactor;
    boosted_ = true;
  }
}

std::unique_ptr<Agent> DqnAgent::clonePolicy() const {
  DqnParams p = params_;
  p.replayCapacity = 1;
  auto copy = std::make_unique<DqnAgent>(p, 0);
  copy->params_.replayCapacity = params_.replayCapacity;
  copy->rng_ = rng_;
  copy->online_ = online_;
  copy->target_ = target_;
  copy->adam_ = adam_;
  copy->lr_ = lr_;
  copy->boosted_ = boosted_;
  copy->epsilon_ = epsilon_;
  copy->steps_ = steps_;
  return copy;
}

nlohmann::json DqnAgent::checkpoint() const {
  return {{"format", "blackjack-agent"},
          {"version", kCheckpointVersion},
          {"kind", "dqn"},
          {"layer_sizes", params_.layerSizes},
          {"online", online_.flat()},
          {"target", target_.flat()},
          {"adam_m", flattenLayers(adam_.firstMoment())},
          {"adam_v", flattenLayers(adam_.secondMoment())},
          {"adam_t", adam_.steps()},
          {"learning_rate", lr_},
          {"base_learning_rate", params_.learningRate},
          {"stage_boost_applied", boosted_},
          {"gamma", params_.gamma},
          {"batch_size", params_.batchSize},
          {"warmup", params_.warmup},
          {"replay_capacity", params_.replayCapacity},
          {"target_sync_every", params_.targetSyncEvery},
          {"epsilon", epsilon_},
          {"epsilon_decay", params_.epsilonDecay},
          {"epsilon_min", params_.epsilonMin},
          {"huber_delta", params_.huberDelta},
          {"step_counter", steps_}};
}

std::unique_ptr<DqnAgent> DqnAgent::fromCheckpoint(const nlohmann::json &ckpt, uint64_t seed) {
  DqnParams p;
  p.layerSizes = ckpt.at("layer_sizes").get<std::vector<int>>();
  p.learningRate = ckpt.at("base_learning_rate").get<double>();
  p.gamma = ckpt.at("gamma").get<double>();
  p.batchSize = ckpt.at("batch_size").get<size_t>();
  p.warmup = ckpt.at("warmup").get<size_t>();
  p.replayCapacity = ckpt.at("replay_capacity").get<size_t>();
  p.targetSyncEvery = ckpt.at("target_sync_every").get<int64_t>();
  p.epsilon = ckpt.at("epsilon").get<double>();
  p.epsilonDecay = ckpt.at("epsilon_decay").get<double>();
  p.epsilonMin = ckpt.at("epsilon_min").get<double>();
  p.huberDelta = ckpt.at("huber_delta").get<double>();
  auto agent = std::make_unique<DqnAgent>(p, seed);
  agent->online_ = restoreNet(p.layerSizes, ckpt.at("online"));
  agent->target_ = restoreNet(p.layerSizes, ckpt.at("target"));
  agent->adam_.restore(unflattenLayers(agent->online_, ckpt.at("adam_m").get<std::vector<double>>()),
                       unflattenLayers(agent->online_, ckpt.at("adam_v").get<std::vector<double>>()),
                       ckpt.at("adam_t").get<int64_t>());
  agent->lr_ = ckpt.at("learning_rate").get<double>();
  agent->boosted_ = ckpt.at("stage_boost_applied").get<bool>();
  agent->steps_ = ckpt.at("step_counter").get<int64_t>();
  return agent;
}

} // namespace blackjack
