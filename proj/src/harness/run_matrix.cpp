#include "blackjack/run_matrix.hpp"

#include <algorithm>
#include <fstream>

namespace blackjack {

namespace {

nlohmann::json readJson(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

} // namespace

RunTiming timingFromJson(const nlohmann::json &j) {
  RunTiming t;
  t.training = j.at("training_seconds").get<double>();
  t.evaluationWindows = j.at("evaluation_window_seconds").get<double>();
  t.finalEvaluation = j.at("final_evaluation_seconds").get<double>();
  t.coach = j.at("coach_seconds").get<double>();
  t.total = j.at("total_seconds").get<double>();
  return t;
}

std::vector<LoadedRun> loadRuns(const std::filesystem::path &dir) {
  std::vector<std::filesystem::path> found;
  if (std::filesystem::is_directory(dir)) {
    for (const auto &entry : std::filesystem::recursive_directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().filename() == "summary.json") found.push_back(entry.path());
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<LoadedRun> runs;
  for (const auto &path : found) {
    LoadedRun r{path.parent_path(), RunSummary::fromJson(readJson(path)), std::nullopt};
    const auto timing = r.dir / "timing.json";
    if (std::filesystem::exists(timing)) r.timing = timingFromJson(readJson(timing));
    runs.push_back(std::move(r));
  }
  return runs;
}

std::vector<RunOutcome> runMatrix(const RunConfig &cfg, const std::filesystem::path &outDir,
                                  const ProgressFn &progress) {
  cfg.validate();
  std::vector<RunOutcome> outcomes;
  for (uint64_t seed : cfg.seeds) {
    const auto dir = outDir / runDirectory(cfg, seed);
    if (progress) progress("run " + dir.generic_string());
    outcomes.push_back(runTraining(cfg, seed, dir, progress));
  }
  std::vector<RunSummary> summaries;
  std::vector<std::optional<RunTiming>> timings;
  for (auto &r : loadRuns(outDir)) {
    summaries.push_back(std::move(r.summary));
    timings.push_back(r.timing);
  }
  std::ofstream out(outDir / "aggregate.json");
  if (!out) throw std::runtime_error("cannot write " + (outDir / "aggregate.json").string());
  out << aggregateJson(aggregateSeeds(summaries, timings)).dump(2) << '\n';
  return outcomes;
}

} // namespace blackjack
