#pragma once

#include "blackjack/training.hpp"

#include <optional>

namespace blackjack {

struct Stats {
  long count = 0;
  double mean = 0.0;
  /** Sample standard deviation; 0 for a single value. */
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;

  static Stats of(const std::vector<double> &values);
  nlohmann::json toJson() const;
};

/** Cross-seed statistics for one (agent, mode, deck) condition. */
struct ConditionReport {
  std::string condition;
  std::string agent;
  std::string mode;
  std::string deck;
  std::vector<uint64_t> seeds;
  Stats bestWinRate;
  Stats finalWinRate;
  Stats heldOutBestWinRate;
  Stats heldOutBestBustRate;
  Stats heldOutBestAvgReward;
  Stats heldOutFinalWinRate;
  Stats heldOutFinalBustRate;
  Stats heldOutFinalAvgReward;
  Stats agreementBest;
  Stats agreementFinal;
  std::map<int, long> stageAtPeak;
  /** Most frequent stage at peak; the lowest id wins ties. */
  int stageAtPeakMode = 0;
  std::map<int, long> completedStages;
  std::optional<Stats> wallClockSeconds;

  nlohmann::json toJson() const;
};

std::string conditionName(const RunSummary &run);

/** Groups runs by condition; `timings` is parallel to `runs` and may be empty. */
std::vector<ConditionReport> aggregateSeeds(const std::vector<RunSummary> &runs,
                                            const std::vector<std::optional<RunTiming>> &timings = {});

nlohmann::json aggregateJson(const std::vector<ConditionReport> &reports);

} // namespace blackjack
