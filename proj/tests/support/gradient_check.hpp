#pragma once

// Central finite differences against the analytic Huber TD gradient.

#include <blackjack/mlp.hpp>

#include <algorithm>
#include <cmath>

namespace oracle {

struct GradientCheck {
  double maxRelativeError = 0.0;
  double maxAbsoluteError = 0.0;
  size_t parameters = 0;
};

// Relative error |a - n| / max(|a|, |n|, floor). The floor keeps parameters
// whose true gradient is zero (dead units) from dividing roundoff by zero.
inline GradientCheck checkHuberGradient(const blackjack::Mlp &net, const Eigen::MatrixXd &x,
                                        const std::vector<int> &actions, const Eigen::VectorXd &targets,
                                        double h = 1e-5, double floor = 1e-6) {
  blackjack::LayerGrads grads;
  blackjack::huberTdLoss(net, x, actions, targets, 1.0, &grads);
  std::vector<double> analytic;
  for (const auto &l : grads) {
    analytic.insert(analytic.end(), l.weight.data(), l.weight.data() + l.weight.size());
    analytic.insert(analytic.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  blackjack::Mlp probe = net;
  std::vector<double> params = net.flat();
  GradientCheck out;
  out.parameters = params.size();
  for (size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    probe.setFlat(params);
    const double up = blackjack::huberTdLoss(probe, x, actions, targets, 1.0, nullptr);
    params[i] = saved - h;
    probe.setFlat(params);
    const double down = blackjack::huberTdLoss(probe, x, actions, targets, 1.0, nullptr);
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double diff = std::abs(numeric - analytic[i]);
    const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), floor});
    out.maxAbsoluteError = std::max(out.maxAbsoluteError, diff);
    out.maxRelativeError = std::max(out.maxRelativeError, diff / scale);
  }
  return out;
}

// Random batch: features in [-1, 1], random actions, targets in [-2, 2].
inline void randomBatch(int batch, blackjack::Rng &rng, Eigen::MatrixXd &x, std::vector<int> &actions,
                        Eigen::VectorXd &targets) {
  x.resize(6, batch);
  actions.resize(static_cast<size_t>(batch));
  targets.resize(batch);
  for (int j = 0; j < batch; ++j) {
    for (int i = 0; i < 6; ++i) x(i, j) = rng.uniform(-1.0, 1.0);
    actions[static_cast<size_t>(j)] = static_cast<int>(rng.below(6));
    targets(j) = rng.uniform(-2.0, 2.0);
  }
}

} // namespace oracle
