#include "blackjack/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace blackjack {

Stats Stats::of(const std::vector<double> &values) {
  if (values.empty()) throw std::invalid_argument("no values to summarize");
  Stats s;
  s.count = static_cast<long>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

nlohmann::json Stats::toJson() const {
  return {{"count", count}, {"mean", mean}, {"std", std}, {"min", min}, {"max", max}};
}

namespace {

nlohmann::json histogramJson(const std::map<int, long> &h) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto &[k, v] : h) j[std::to_string(k)] = v;
  return j;
}

} // namespace

nlohmann::json ConditionReport::toJson() const {
  nlohmann::json j = {{"condition", condition},
                      {"agent", agent},
                      {"mode", mode},
                      {"deck", deck},
                      {"seeds", seeds},
                      {"best_win_rate", bestWinRate.toJson()},
                      {"final_win_rate", finalWinRate.toJson()},
                      {"held_out_best_win_rate", heldOutBestWinRate.toJson()},
                      {"held_out_best_bust_rate", heldOutBestBustRate.toJson()},
                      {"held_out_best_avg_reward", heldOutBestAvgReward.toJson()},
                      {"held_out_final_win_rate", heldOutFinalWinRate.toJson()},
                      {"held_out_final_bust_rate", heldOutFinalBustRate.toJson()},
                      {"held_out_final_avg_reward", heldOutFinalAvgReward.toJson()},
                      {"agreement_best", agreementBest.toJson()},
                      {"agreement_final", agreementFinal.toJson()},
                      {"stage_at_peak", histogramJson(stageAtPeak)},
                      {"stage_at_peak_mode", stageAtPeakMode},
                      {"completed_stages", histogramJson(completedStages)}};
  if (wallClockSeconds) j["wall_clock_seconds"] = wallClockSeconds->toJson();
  return j;
}

std::string conditionName(const RunSummary &run) {
  return std::string(agentKindName(run.agent)) + "-" + std::string(runModeName(run.mode)) + "-" + run.deck;
}

std::vector<ConditionReport> aggregateSeeds(const std::vector<RunSummary> &runs,
                                            const std::vector<std::optional<RunTiming>> &timings) {
  if (runs.empty()) throw std::invalid_argument("no runs to aggregate");
  std::map<std::string, std::vector<size_t>> groups;
  for (size_t i = 0; i < runs.size(); ++i) groups[conditionName(runs[i])].push_back(i);

  std::vector<ConditionReport> out;
  for (const auto &[name, idx] : groups) {
    ConditionReport r;
    r.condition = name;
    r.agent = agentKindName(runs[idx.front()].agent);
    r.mode = runModeName(runs[idx.front()].mode);
    r.deck = runs[idx.front()].deck;
    auto collect = [&](auto field) {
      std::vector<double> v;
      for (size_t i : idx) v.push_back(field(runs[i]));
      return Stats::of(v);
    };
    r.bestWinRate = collect([](const RunSummary &s) { return s.best.bestWinRate; });
    r.finalWinRate = collect([](const RunSummary &s) { return s.best.finalWinRate; });
    r.heldOutBestWinRate = collect([](const RunSummary &s) { return s.heldOutBest.winRate(); });
    r.heldOutBestBustRate = collect([](const RunSummary &s) { return s.heldOutBest.bustRate(); });
    r.heldOutBestAvgReward = collect([](const RunSummary &s) { return s.heldOutBest.avgReward(); });
    r.heldOutFinalWinRate = collect([](const RunSummary &s) { return s.heldOutFinal.winRate(); });
    r.heldOutFinalBustRate = collect([](const RunSummary &s) { return s.heldOutFinal.bustRate(); });
    r.heldOutFinalAvgReward = collect([](const RunSummary &s) { return s.heldOutFinal.avgReward(); });
    r.agreementBest = collect([](const RunSummary &s) { return s.agreementBest; });
    r.agreementFinal = collect([](const RunSummary &s) { return s.agreementFinal; });
    std::vector<double> wall;
    for (size_t i : idx) {
      r.seeds.push_back(runs[i].seed);
      ++r.stageAtPeak[runs[i].best.stageAtBest];
      ++r.completedStages[runs[i].completedStages];
      if (i < timings.size() && timings[i]) wall.push_back(timings[i]->total);
    }
    long top = 0;
    for (const auto &[stage, n] : r.stageAtPeak) {
      if (n > top) {
        top = n;
        r.stageAtPeakMode = stage;
      }
    }
    if (!wall.empty() && wall.size() == idx.size()) r.wallClockSeconds = Stats::of(wall);
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::json aggregateJson(const std::vector<ConditionReport> &reports) {
  nlohmann::json conditions = nlohmann::json::array();
  for (const auto &r : reports) conditions.push_back(r.toJson());
  return {{"conditions", conditions}};
}

} // namespace blackjack
