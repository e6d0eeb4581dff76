#pragma once

#include "blackjack/rng.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace blackjack {

struct DenseLayer {
  Eigen::MatrixXd weight; // out x in
  Eigen::VectorXd bias;   // out
};

using LayerGrads = std::vector<DenseLayer>;

/** Fully connected network with rectifier hidden layers and a linear output.
 * Batches are column-major: one sample per column. */
class Mlp {
public:
  Mlp() = default;
  /** All weights and biases zero. */
  explicit Mlp(std::vector<int> sizes);
  /** U(-sqrt(6/fan_in), +sqrt(6/fan_in)) weights, zero biases. */
  static Mlp heUniform(std::vector<int> sizes, Rng &rng);

  /** Activations kept from a forward pass for backpropagation. */
  struct Tape {
    std::vector<Eigen::MatrixXd> inputs;      // input to each layer
    std::vector<Eigen::MatrixXd> preActivity; // affine output of each layer
  };

  Eigen::VectorXd forward(const Eigen::VectorXd &x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd &x, Tape *tape = nullptr) const;
  /** Gradients of a scalar loss given dLoss/dOutput for the batch in `tape`. */
  LayerGrads backward(const Tape &tape, const Eigen::MatrixXd &dOutput) const;

  const std::vector<int> &sizes() const { return sizes_; }
  std::vector<DenseLayer> &layers() { return layers_; }
  const std::vector<DenseLayer> &layers() const { return layers_; }

  size_t parameterCount() const;
  /** Layer by layer: weights column-major, then bias. */
  std::vector<double> flat() const;
  void setFlat(std::span<const double> params);
  bool allFinite() const;

  friend bool operator==(const Mlp &a, const Mlp &b);

private:
  std::vector<int> sizes_;
  std::vector<DenseLayer> layers_;
};

LayerGrads zeroGradsLike(const Mlp &net);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
public:
  Adam() = default;
  Adam(const Mlp &shape, AdamConfig cfg = {});

  void step(Mlp &net, const LayerGrads &grads, double lr);

  int64_t steps() const { return t_; }
  const LayerGrads &firstMoment() const { return m_; }
  const LayerGrads &secondMoment() const { return v_; }
  void restore(LayerGrads m, LayerGrads v, int64_t t);

private:
  AdamConfig cfg_;
  LayerGrads m_;
  LayerGrads v_;
  int64_t t_ = 0;
};

double huber(double error, double delta = 1.0);
double huberDerivative(double error, double delta = 1.0);

/** Mean Huber loss between online(x)[action_j] and target_j over the batch.
 * When `grads` is non-null it receives dLoss/dParams. */
double huberTdLoss(const Mlp &net, const Eigen::MatrixXd &x, std::span<const int> actions,
                   const Eigen::VectorXd &targets, double delta, LayerGrads *grads);

} // namespace blackjack
