#pragma once

// Drives QTable<int> on the oracle MDPs with a uniformly random behaviour
// policy. Shared by the unit and acceptance suites.

#include "mdp_oracle.hpp"

#include <blackjack/tabular_agent.hpp>

namespace oracle {

struct Step {
  int state;
  int action;
  double reward;
  int next;
};

inline std::vector<Step> randomEpisode(const DeterministicMdp &m, int start, blackjack::Rng &rng) {
  std::vector<Step> steps;
  int s = start;
  while (s != DeterministicMdp::kTerminal) {
    const int a = static_cast<int>(rng.below(static_cast<uint64_t>(m.actions)));
    const int nx = m.next[s][a];
    steps.push_back({s, a, m.reward[s][a], nx});
    s = nx;
  }
  return steps;
}

inline void applyStep(blackjack::QTable<int> &table, const DeterministicMdp &m, const Step &st, double gamma) {
  blackjack::ActionMask legal{};
  for (int a = 0; a < m.actions; ++a) legal[a] = true;
  const bool done = st.next == DeterministicMdp::kTerminal;
  table.update(st.state, static_cast<blackjack::Action>(st.action), st.reward, done ? 0 : st.next, legal, done, gamma);
}

inline double maxAbsError(const blackjack::QTable<int> &table, const std::vector<std::vector<double>> &qStar) {
  double err = 0.0;
  for (size_t s = 0; s < qStar.size(); ++s) {
    const auto q = table.values(static_cast<int>(s));
    for (size_t a = 0; a < qStar[s].size(); ++a) err = std::max(err, std::abs(q[a] - qStar[s][a]));
  }
  return err;
}

// Episodes from state 0, each replayed last transition first. Returns the
// number of updates applied.
inline long trainReverseReplay(blackjack::QTable<int> &table, const DeterministicMdp &m, double gamma,
                               long maxUpdates, blackjack::Rng &rng) {
  long updates = 0;
  while (updates < maxUpdates) {
    auto ep = randomEpisode(m, 0, rng);
    for (auto it = ep.rbegin(); it != ep.rend() && updates < maxUpdates; ++it, ++updates) {
      applyStep(table, m, *it, gamma);
    }
  }
  return updates;
}

// Episodes from uniformly random start states, updates in visit order.
inline void trainForward(blackjack::QTable<int> &table, const DeterministicMdp &m, double gamma, long episodes,
                         blackjack::Rng &rng) {
  for (long e = 0; e < episodes; ++e) {
    const int start = static_cast<int>(rng.below(static_cast<uint64_t>(m.states)));
    for (const Step &st : randomEpisode(m, start, rng)) applyStep(table, m, st, gamma);
  }
}

// One update per (state, action) pair per sweep, in a fresh random order.
inline void trainRandomSweeps(blackjack::QTable<int> &table, const DeterministicMdp &m, double gamma, long sweeps,
                              blackjack::Rng &rng) {
  std::vector<Step> pairs;
  for (int s = 0; s < m.states; ++s)
    for (int a = 0; a < m.actions; ++a) pairs.push_back({s, a, m.reward[s][a], m.next[s][a]});
  for (long k = 0; k < sweeps; ++k) {
    rng.shuffle(pairs.begin(), pairs.end());
    for (const Step &st : pairs) applyStep(table, m, st, gamma);
  }
}

// Sweeps from the last state to the first, the backward-induction order of
// an acyclic MDP.
inline void trainBackwardSweeps(blackjack::QTable<int> &table, const DeterministicMdp &m, double gamma,
                                long sweeps) {
  for (long k = 0; k < sweeps; ++k)
    for (int s = m.states - 1; s >= 0; --s)
      for (int a = 0; a < m.actions; ++a) applyStep(table, m, {s, a, m.reward[s][a], m.next[s][a]}, gamma);
}

} // namespace oracle
