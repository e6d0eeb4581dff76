#include "blackjack/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace blackjack {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("network needs at least two layer sizes");
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
    layers_.push_back({Eigen::MatrixXd::Zero(sizes_[l + 1], sizes_[l]), Eigen::VectorXd::Zero(sizes_[l + 1])});
  }
}

Mlp Mlp::heUniform(std::vector<int> sizes, Rng &rng) {
  Mlp net(std::move(sizes));
  for (auto &layer : net.layers_) {
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.weight.cols()));
    for (Eigen::Index j = 0; j < layer.weight.cols(); ++j)
      for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) layer.weight(i, j) = rng.uniform(-bound, bound);
  }
  return net;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd &x) const {
  Eigen::VectorXd a = x;
  for (size_t l = 0; l < layers_.size(); ++l) {
    Eigen::VectorXd z = layers_[l].weight * a + layers_[l].bias;
    a = (l + 1 < layers_.size()) ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
  }
  return a;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd &x, Tape *tape) const {
  if (tape) {
    tape->inputs.resize(layers_.size());
    tape->preActivity.resize(layers_.size());
  }
  Eigen::MatrixXd a = x;
  for (size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].weight * a;
    z.colwise() += layers_[l].bias;
    if (tape) {
      tape->inputs[l] = a;
      tape->preActivity[l] = z;
    }
    a = (l + 1 < layers_.size()) ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
  }
  return a;
}

LayerGrads Mlp::backward(const Tape &tape, const Eigen::MatrixXd &dOutput) const {
  LayerGrads grads(layers_.size());
  Eigen::MatrixXd delta = dOutput;
  for (size_t l = layers_.size(); l-- > 0;) {
    if (l + 1 < layers_.size()) {
      delta = delta.cwiseProduct((tape.preActivity[l].array() > 0.0).cast<double>().matrix());
    }
    grads[l].weight.noalias() = delta * tape.inputs[l].transpose();
    grads[l].bias = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd prev = layers_[l].weight.transpose() * delta;
      delta = std::move(prev);
    }
  }
  return grads;
}

size_t Mlp::parameterCount() const {
  size_t n = 0;
  for (const auto &l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

std::vector<double> Mlp::flat() const {
  std::vector<double> out;
  out.reserve(parameterCount());
  for (const auto &l : layers_) {
    out.insert(out.end(), l.weight.data(), l.weight.data() + l.weight.size());
    out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return out;
}

void Mlp::setFlat(std::span<const double> params) {
  if (params.size() != parameterCount()) throw std::invalid_argument("parameter count mismatch");
  size_t k = 0;
  for (auto &l : layers_) {
    std::copy_n(params.begin() + k, l.weight.size(), l.weight.data());
    k += l.weight.size();
    std::copy_n(params.begin() + k, l.bias.size(), l.bias.data());
    k += l.bias.size();
  }
}

bool Mlp::allFinite() const {
  for (const auto &l : layers_) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

bool operator==(const Mlp &a, const Mlp &b) {
  if (a.sizes_ != b.sizes_) return false;
  for (size_t l = 0; l < a.layers_.size(); ++l) {
    if (a.layers_[l].weight != b.layers_[l].weight || a.layers_[l].bias != b.layers_[l].bias) return false;
  }
  return true;
}

LayerGrads zeroGradsLike(const Mlp &net) {
  LayerGrads g;
  for (const auto &l : net.layers()) {
    g.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()), Eigen::VectorXd::Zero(l.bias.size())});
  }
  return g;
}

Adam::Adam(const Mlp &shape, AdamConfig cfg) : cfg_(cfg), m_(zeroGradsLike(shape)), v_(zeroGradsLike(shape)) {}

void Adam::step(Mlp &net, const LayerGrads &grads, double lr) {
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const double stepSize = lr * std::sqrt(c2) / c1;
  const double epsHat = cfg_.epsilon * std::sqrt(c2);
  auto update = [&](auto &param, auto &m, auto &v, const auto &g) {
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
    v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    param.array() -= stepSize * m.array() / (v.array().sqrt() + epsHat);
  };
  auto &layers = net.layers();
  for (size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weight, m_[l].weight, v_[l].weight, grads[l].weight);
    update(layers[l].bias, m_[l].bias, v_[l].bias, grads[l].bias);
  }
}

void Adam::restore(LayerGrads m, LayerGrads v, int64_t t) {
  m_ = std::move(m);
  v_ = std::move(v);
  t_ = t;
}

double huber(double error, double delta) {
  const double a = std::abs(error);
  return a <= delta ? 0.5 * error * error : delta * (a - 0.5 * delta);
}

double huberDerivative(double error, double delta) {
  if (error > delta) return delta;
  if (error < -delta) return -delta;
  return error;
}

double huberTdLoss(const Mlp &net, const Eigen::MatrixXd &x, std::span<const int> actions,
                   const Eigen::VectorXd &targets, double delta, LayerGrads *grads) {
  const Eigen::Index batch = x.cols();
  Mlp::Tape tape;
  const Eigen::MatrixXd q = net.forward(x, grads ? &tape : nullptr);
  double loss = 0.0;
  Eigen::MatrixXd dOut;
  if (grads) dOut = Eigen::MatrixXd::Zero(q.rows(), batch);
  for (Eigen::Index j = 0; j < batch; ++j) {
    const double err = q(actions[j], j) - targets(j);
    loss += huber(err, delta);
    if (grads) dOut(actions[j], j) = huberDerivative(err, delta) / static_cast<double>(batch);
  }
  if (grads) *grads = net.backward(tape, dOut);
  return loss / static_cast<double>(batch);
}

} // namespace blackjack
