#pragma once

#include "blackjack/aggregate.hpp"

namespace blackjack {

/** Trains every seed of `cfg` under `outDir`, one run directory per seed,
 * then writes `outDir`/aggregate.json over all runs found there. */
std::vector<RunOutcome> runMatrix(const RunConfig &cfg, const std::filesystem::path &outDir,
                                  const ProgressFn &progress = {});

/** Reads every run below `dir` (any directory holding summary.json), in path order. */
struct LoadedRun {
  std::filesystem::path dir;
  RunSummary summary;
  std::optional<RunTiming> timing;
};
std::vector<LoadedRun> loadRuns(const std::filesystem::path &dir);

RunTiming timingFromJson(const nlohmann::json &j);

} // namespace blackjack
