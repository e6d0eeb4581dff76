#pragma once

#include "blackjack/run_matrix.hpp"

namespace blackjack {

class NoRunsFound : public std::runtime_error {
public:
  explicit NoRunsFound(const std::filesystem::path &dir) : std::runtime_error("no runs found in " + dir.string()) {}
};

/** Stage rows with the mean best window win rate per agent kind, plus a
 * baseline row when baseline runs are present. */
std::string table1Csv(const std::vector<LoadedRun> &runs);

/** episode,stage_id,win_rate,bust_rate,push_rate,avg_reward */
std::string progressionCsv(const RunSummary &run);

/** Writes table1.csv, aggregate.json, progression/ and heatmaps/ under
 * `outDir` from the runs below `logDir`. Returns the files written, relative
 * to `outDir`. Throws NoRunsFound. */
std::vector<std::string> writeReport(const std::filesystem::path &logDir, const std::filesystem::path &outDir);

} // namespace blackjack
