#include <doctest.h>

#include "gradient_check.hpp"
#include "mdp_training.hpp"

#include <blackjack/dqn_agent.hpp>
#include <blackjack/tabular_agent.hpp>

#include <cmath>
#include <filesystem>

using namespace blackjack;

namespace {

Observation makeObs(int total, int upcard, bool soft, bool canSplit, bool canDouble, double tc,
                    ActionMask legal = {true, true, false, false, false, false}) {
  Observation o;
  o.playerTotal = total;
  o.dealerUpcard = upcard;
  o.soft = soft;
  o.canSplit = canSplit;
  o.canDouble = canDouble;
  o.trueCount = tc;
  o.legal = legal;
  o.features = makeFeatures(total, upcard, soft, canSplit, canDouble, tc);
  return o;
}

DqnParams smallDqn() {
  DqnParams p;
  p.layerSizes = {kFeatureCount, 16, 16, kNumActions};
  p.warmup = 64;
  p.replayCapacity = 512;
  return p;
}

ReplayEntry randomEntry(Rng &rng) {
  ReplayEntry e;
  for (auto &f : e.state) f = rng.uniform(-1.0, 1.0);
  for (auto &f : e.next) f = rng.uniform(-1.0, 1.0);
  e.action = static_cast<int>(rng.below(kNumActions));
  e.reward = rng.uniform(-1.0, 1.0);
  e.nextLegal = {true, true, rng.below(2) == 1, false, rng.below(2) == 1, false};
  e.done = rng.below(3) == 0;
  return e;
}

} // namespace

TEST_CASE("masked argmax picks the best legal action") {
  Rng rng(1);
  const QValues q{0.2, 0.5, -1, -1, -1, -1};
  CHECK(epsilonGreedy(q, {true, true, false, false, false, false}, 0.0, false, rng) == Action::Hit);
  const QValues flat{0.3, 0.3, 0.3, 0.3, 0.3, 0.3};
  CHECK(epsilonGreedy(flat, {true, true, true, true, false, false}, 0.0, false, rng) == Action::Stand);
  const QValues illegalBest{0.0, 0.1, 9.0, 0.0, 0.0, 0.0};
  CHECK(maskedArgmax(illegalBest, {true, true, false, false, false, false}) == Action::Hit);
  CHECK_THROWS_AS(maskedArgmax(q, ActionMask{}), NoLegalAction);
}

TEST_CASE("epsilon one explores uniformly over legal actions") {
  Rng rng(2024);
  const ActionMask legal{true, false, true, false, false, true};
  const QValues q{5, 0, 0, 0, 0, 0};
  std::array<long, kNumActions> counts{};
  const long trials = 1'000'000;
  for (long i = 0; i < trials; ++i) ++counts[code(epsilonGreedy(q, legal, 1.0, false, rng))];
  CHECK(counts[1] == 0);
  CHECK(counts[3] == 0);
  CHECK(counts[4] == 0);
  for (int a : {0, 2, 5}) CHECK(std::abs(static_cast<double>(counts[a]) / trials - 1.0 / 3.0) < 0.005);
}

TEST_CASE("greedy choice is invariant to shifts and positive scaling") {
  Rng rng(77);
  for (int trial = 0; trial < 10'000; ++trial) {
    QValues q;
    for (auto &v : q) v = rng.uniform(-2.0, 2.0);
    ActionMask legal{true, true, false, false, false, false};
    for (int a = 2; a < kNumActions; ++a) legal[a] = rng.below(2) == 1;
    const double shift = rng.uniform(-100.0, 100.0);
    const double scale = rng.uniform(0.01, 50.0);
    QValues shifted = q;
    QValues scaled = q;
    for (int a = 0; a < kNumActions; ++a) {
      shifted[a] += shift;
      scaled[a] *= scale;
    }
    const Action base = maskedArgmax(q, legal);
    REQUIRE(maskedArgmax(shifted, legal) == base);
    REQUIRE(maskedArgmax(scaled, legal) == base);
  }
}

TEST_CASE("adaptive step size follows visit counts") {
  TabularAgent agent;
  const Observation s = makeObs(16, 10, false, false, true, 0.0);
  const Observation terminal = makeObs(16, 10, false, false, true, 0.0, ActionMask{});
  CHECK(agent.adaptiveAlpha(s, Action::Hit) == doctest::Approx(0.1));
  agent.learn({s, Action::Hit, 0.0, terminal, true});
  CHECK(agent.adaptiveAlpha(s, Action::Hit) == doctest::Approx(0.05));
  for (int i = 0; i < 8; ++i) agent.learn({s, Action::Hit, 0.0, terminal, true});
  CHECK(agent.table().visits(stateKey(s), Action::Hit) == 9);
  CHECK(agent.adaptiveAlpha(s, Action::Hit) == doctest::Approx(0.01));
  CHECK(agent.adaptiveAlpha(s, Action::Stand) == doctest::Approx(0.1));
}

TEST_CASE("tabular update examples") {
  TabularAgent agent;
  const Observation s = makeObs(20, 6, false, false, false, 0.0);
  const Observation terminal = makeObs(20, 6, false, false, false, 0.0, ActionMask{});
  agent.learn({s, Action::Stand, 1.0, terminal, true});
  CHECK(agent.qValues(s)[0] == doctest::Approx(0.1));
  CHECK(agent.table().visits(stateKey(s), Action::Stand) == 1);

  // Bootstrap uses only legal next actions.
  QTable<int> t(1.0);
  ActionMask all{true, true, true, true, true, true};
  t.update(1, Action::Double, 5.0, 0, all, true, 1.0);
  CHECK(t.values(1)[2] == 5.0);
  ActionMask onlyStand{true, false, false, false, false, false};
  t.update(0, Action::Hit, 0.0, 1, onlyStand, false, 1.0);
  CHECK(t.values(0)[1] == 0.0);
}

TEST_CASE("optimal values are a fixed point of the update") {
  const auto m = oracle::chainMdp(5);
  const auto qStar = oracle::valueIteration(m, 1.0);
  QTable<int> table(0.1);
  for (int s = 0; s < m.states; ++s) {
    for (int a = 0; a < m.actions; ++a) table.entries()[s].q[a] = qStar[s][a];
  }
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const int s = static_cast<int>(rng.below(5));
    const int a = static_cast<int>(rng.below(2));
    const int nx = m.next[s][a];
    const bool done = nx == oracle::DeterministicMdp::kTerminal;
    const double td = table.update(s, static_cast<Action>(a), m.reward[s][a], done ? 0 : nx,
                                   {true, true, false, false, false, false}, done, 1.0);
    CHECK(td == 0.0);
  }
  CHECK(oracle::maxAbsError(table, qStar) == 0.0);
}

TEST_CASE("chain MDP is learned exactly") {
  const auto m = oracle::chainMdp(5);
  const auto qStar = oracle::valueIteration(m, 1.0);
  for (int s = 0; s < 5; ++s) {
    CHECK(qStar[s][0] == 1.0);
    CHECK(qStar[s][1] == 1.0);
  }
  QTable<int> table(1.0);
  Rng rng(11);
  const long used = oracle::trainReverseReplay(table, m, 1.0, 10'000, rng);
  CHECK(used <= 10'000);
  CHECK(oracle::maxAbsError(table, qStar) == 0.0);
}

TEST_CASE("random acyclic MDPs converge to value iteration") {
  Rng rng(31337);
  for (int trial = 0; trial < 3; ++trial) {
    const auto m = oracle::randomAcyclicMdp(20, 3, rng);
    SUBCASE("undiscounted, backward sweeps") {
      const auto qStar = oracle::valueIteration(m, 1.0);
      QTable<int> table(1.0);
      oracle::trainBackwardSweeps(table, m, 1.0, 50);
      CHECK(oracle::maxAbsError(table, qStar) < 1e-3);
    }
    SUBCASE("discounted, random-order sweeps") {
      const auto qStar = oracle::valueIteration(m, 0.5);
      QTable<int> table(1.0);
      oracle::trainRandomSweeps(table, m, 0.5, 100'000, rng);
      CHECK(oracle::maxAbsError(table, qStar) < 1e-3);
    }
  }
}

TEST_CASE("mlp forward examples") {
  const Mlp zero({6, 128, 128, 6});
  Eigen::VectorXd x(6);
  x << 0.5, -0.3, 1, 0, 0.2, -1;
  CHECK(zero.forward(x).isZero());
  CHECK(zero.forward(x).size() == 6);

  Mlp net({2, 2, 1});
  net.layers()[0].weight << 1, -1, 2, 0;
  net.layers()[0].bias << 0.5, -3;
  net.layers()[1].weight << 3, -2;
  net.layers()[1].bias << 0.25;
  Eigen::VectorXd in(2);
  in << 1, 2;
  // hidden = relu([1 - 2 + 0.5, 2 - 3]) = [0, 0]; output 0.25
  CHECK(net.forward(in)(0) == doctest::Approx(0.25));
  in << 2, 0.5;
  // hidden = relu([2.0, 1.0]); output 6 - 2 + 0.25
  CHECK(net.forward(in)(0) == doctest::Approx(4.25));
}

TEST_CASE("mlp output change is bounded by the product of spectral norms") {
  Rng rng(8);
  const Mlp net = Mlp::heUniform({6, 128, 128, 6}, rng);
  double lipschitz = 1.0;
  for (const auto &l : net.layers()) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(l.weight);
    lipschitz *= svd.singularValues()(0);
  }
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x(6);
    for (int i = 0; i < 6; ++i) x(i) = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd y = x;
    y(static_cast<Eigen::Index>(rng.below(6))) += 1e-6;
    const double change = (net.forward(y) - net.forward(x)).norm();
    CHECK(change <= lipschitz * 1e-6 * (1 + 1e-9));
  }
}

TEST_CASE("batched forward matches per-sample forward") {
  Rng rng(4);
  const Mlp net = Mlp::heUniform({6, 32, 32, 6}, rng);
  Eigen::MatrixXd x(6, 7);
  for (int j = 0; j < 7; ++j)
    for (int i = 0; i < 6; ++i) x(i, j) = rng.uniform(-1.0, 1.0);
  const Eigen::MatrixXd batched = net.forward(x);
  for (int j = 0; j < 7; ++j) CHECK((batched.col(j) - net.forward(Eigen::VectorXd(x.col(j)))).norm() < 1e-12);
}

TEST_CASE("huber loss pieces") {
  CHECK(huber(0.5) == doctest::Approx(0.125));
  CHECK(huber(-3.0) == doctest::Approx(2.5));
  CHECK(huberDerivative(0.5) == doctest::Approx(0.5));
  CHECK(huberDerivative(-3.0) == doctest::Approx(-1.0));
}

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(99);
  const Mlp net = Mlp::heUniform({6, 128, 128, 6}, rng);
  Eigen::MatrixXd x;
  std::vector<int> actions;
  Eigen::VectorXd targets;
  oracle::randomBatch(10, rng, x, actions, targets);
  const auto result = oracle::checkHuberGradient(net, x, actions, targets);
  INFO("max abs error " << result.maxAbsoluteError);
  CHECK(result.parameters == net.parameterCount());
  CHECK(result.maxRelativeError < 1e-4);
}

TEST_CASE("zero TD error leaves parameters unchanged") {
  DqnAgent agent(smallDqn(), 3);
  agent.syncTarget();
  Rng rng(6);
  std::vector<ReplayEntry> batch;
  for (int i = 0; i < 64; ++i) {
    ReplayEntry e = randomEntry(rng);
    e.done = true;
    batch.push_back(e);
  }
  // Set rewards to the online estimate so every target equals the prediction.
  for (auto &e : batch) {
    Observation o;
    o.features = e.state;
    e.reward = agent.qValues(o)[e.action];
  }
  const std::vector<double> before = agent.online().flat();
  const double loss = agent.trainBatch(batch);
  CHECK(loss < 1e-30);
  const std::vector<double> after = agent.online().flat();
  double moved = 0.0;
  for (size_t i = 0; i < before.size(); ++i) moved = std::max(moved, std::abs(after[i] - before[i]));
  // Adam divides a vanishing moment by sqrt(v) + eps, so a step is at most lr.
  CHECK(moved < 1e-6);
  CHECK(agent.stepCounter() == 1);
}

TEST_CASE("target network syncs every 1000 steps") {
  DqnAgent agent(smallDqn(), 12);
  Rng rng(13);
  std::vector<ReplayEntry> batch;
  for (int i = 0; i < 64; ++i) batch.push_back(randomEntry(rng));
  const Mlp initialTarget = agent.target();
  for (int step = 1; step <= 999; ++step) agent.trainBatch(batch);
  CHECK(agent.target() == initialTarget);
  CHECK_FALSE(agent.online() == agent.target());
  agent.trainBatch(batch);
  CHECK(agent.stepCounter() == 1000);
  CHECK(agent.target() == agent.online());
  CHECK(agent.online().allFinite());
}

TEST_CASE("learning starts after warmup and keeps parameters finite") {
  DqnAgent agent(smallDqn(), 21);
  Rng rng(22);
  const Observation s = makeObs(12, 4, false, false, true, 0.5);
  for (int i = 0; i < 63; ++i) agent.learn({s, Action::Hit, -1.0, s, true});
  CHECK(agent.stepCounter() == 0);
  CHECK(agent.buffer().size() == 63);
  for (int i = 0; i < 500; ++i) {
    const Observation a = makeObs(4 + static_cast<int>(rng.below(18)), 2 + static_cast<int>(rng.below(10)),
                                  false, false, true, rng.uniform(-3, 3));
    agent.learn({a, static_cast<Action>(rng.below(2)), rng.uniform(-2, 2), a, rng.below(2) == 0});
  }
  CHECK(agent.stepCounter() == 500);
  CHECK(agent.buffer().size() == 512);
  CHECK(agent.online().allFinite());
}

TEST_CASE("epsilon decay per episode") {
  DqnAgent dqn;
  dqn.endEpisode();
  CHECK(dqn.epsilon() == doctest::Approx(0.99995));
  TabularAgent tab;
  tab.endEpisode();
  CHECK(tab.epsilon() == doctest::Approx(0.9999));
  tab.setEpsilon(0.05);
  tab.endEpisode();
  CHECK(tab.epsilon() == 0.05);

  TabularAgent closed;
  double previous = closed.epsilon();
  for (int n = 1; n <= 60'000; ++n) {
    closed.endEpisode();
    REQUIRE(closed.epsilon() <= previous);
    previous = closed.epsilon();
    if (n % 5000 == 0) CHECK(closed.epsilon() == doctest::Approx(std::max(0.05, std::pow(0.9999, n))).epsilon(1e-9));
  }
  CHECK(closed.epsilon() == 0.05);
}

TEST_CASE("stage learning-rate boost applies once") {
  DqnAgent agent(smallDqn());
  agent.onStageEntered(2);
  CHECK(agent.learningRate() == doctest::Approx(0.0005));
  agent.onStageEntered(3);
  CHECK(agent.learningRate() == doctest::Approx(0.0006));
  agent.onStageEntered(4);
  CHECK(agent.learningRate() == doctest::Approx(0.0006));
  CHECK(agent.stageBoostApplied());

  TabularAgent tab;
  tab.onStageEntered(3);
  CHECK(tab.params().alpha0 == 0.1);
}

TEST_CASE("state key examples") {
  const Observation o = makeObs(16, 10, false, false, true, 0.0);
  const StateKey k = stateKey(o);
  CHECK(k == StateKey{16, 10, 0, 0, 1, 0});
  CHECK(stateKey(makeObs(16, 10, false, false, true, 0.0)) == k);
  CHECK(stateKey(makeObs(13, 6, true, false, true, 1.4)).trueCount == 1);
  CHECK(stateKey(makeObs(13, 6, true, false, true, 1.6)).trueCount == 2);
  CHECK(stateKey(makeObs(13, 6, true, false, true, 9.0)).trueCount == 5);
  CHECK(stateKey(makeObs(13, 6, true, false, true, -7.2)).trueCount == -5);
}

TEST_CASE("replay buffer keeps the newest entries") {
  ReplayBuffer buf(100);
  for (int i = 0; i < 137; ++i) {
    ReplayEntry e;
    e.reward = i;
    buf.push(e);
  }
  REQUIRE(buf.size() == 100);
  for (size_t i = 0; i < 100; ++i) CHECK(buf.at(i).reward == static_cast<double>(37 + i));

  Rng rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    auto idx = buf.sampleIndices(64, rng);
    std::sort(idx.begin(), idx.end());
    REQUIRE(std::adjacent_find(idx.begin(), idx.end()) == idx.end());
    REQUIRE(idx.back() < 100);
  }
  CHECK_THROWS(buf.sampleIndices(101, rng));
}

TEST_CASE("replay sampling is uniform") {
  ReplayBuffer buf(10);
  for (int i = 0; i < 10; ++i) buf.push({});
  Rng rng(19);
  std::array<long, 10> counts{};
  const long trials = 200'000;
  for (long t = 0; t < trials; ++t)
    for (size_t i : buf.sampleIndices(3, rng)) ++counts[i];
  for (long c : counts) CHECK(static_cast<double>(c) / trials == doctest::Approx(0.3).epsilon(0.02));
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  SUBCASE("tabular") {
    TabularAgent agent({}, 1);
    Rng rng(2);
    for (int i = 0; i < 2000; ++i) {
      const Observation s = makeObs(4 + static_cast<int>(rng.below(18)), 2 + static_cast<int>(rng.below(10)),
                                    rng.below(2) == 1, false, true, rng.uniform(-6, 6));
      agent.learn({s, static_cast<Action>(rng.below(3)), rng.uniform(-1, 1), s, rng.below(2) == 0});
      agent.endEpisode();
    }
    const auto restored = agentFromCheckpoint(agent.checkpoint());
    CHECK(restored->kind() == AgentKind::Tabular);
    CHECK(restored->checkpoint() == agent.checkpoint());
    CHECK(restored->epsilon() == agent.epsilon());
    const auto &t = dynamic_cast<TabularAgent &>(*restored).table().entries();
    CHECK(t.size() == agent.table().entries().size());
    // Survives text serialization as well.
    const auto viaText = agentFromCheckpoint(nlohmann::json::parse(agent.checkpoint().dump()));
    CHECK(viaText->checkpoint() == agent.checkpoint());
  }
  SUBCASE("dqn") {
    DqnAgent agent(smallDqn(), 4);
    Rng rng(5);
    for (int i = 0; i < 300; ++i) {
      const Observation s = makeObs(4 + static_cast<int>(rng.below(18)), 2 + static_cast<int>(rng.below(10)),
                                    false, false, true, rng.uniform(-3, 3));
      agent.learn({s, static_cast<Action>(rng.below(2)), rng.uniform(-1, 1), s, rng.below(2) == 0});
    }
    agent.onStageEntered(3);
    const auto path = std::filesystem::temp_directory_path() / "bj_dqn_ckpt.json";
    saveCheckpoint(agent, path);
    const auto restored = loadCheckpoint(path);
    std::filesystem::remove(path);
    auto &dqn = dynamic_cast<DqnAgent &>(*restored);
    CHECK(dqn.online() == agent.online());
    CHECK(dqn.target() == agent.target());
    CHECK(dqn.learningRate() == agent.learningRate());
    CHECK(dqn.stepCounter() == agent.stepCounter());
    CHECK(dqn.checkpoint() == agent.checkpoint());
  }
  SUBCASE("malformed") {
    CHECK_THROWS_AS(agentFromCheckpoint(nlohmann::json{{"format", "other"}}), CheckpointError);
    DqnAgent agent(smallDqn());
    auto ckpt = agent.checkpoint();
    ckpt["online"] = std::vector<double>{1.0, 2.0};
    CHECK_THROWS_AS(agentFromCheckpoint(ckpt), CheckpointError);
    CHECK_THROWS_AS(loadCheckpoint("/nonexistent/ckpt.json"), CheckpointError);
  }
}

TEST_CASE("policy clone acts identically") {
  DqnAgent agent(smallDqn(), 8);
  const auto clone = agent.clonePolicy();
  const Observation s = makeObs(15, 10, false, false, true, 0.0, {true, true, true, false, true, false});
  CHECK(clone->qValues(s) == agent.qValues(s));
  CHECK(clone->greedyAction(s) == agent.greedyAction(s));
  CHECK(dynamic_cast<DqnAgent &>(*clone).buffer().size() == 0);
}
