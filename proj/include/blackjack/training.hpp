#pragma once

#include "blackjack/coach_client.hpp"
#include "blackjack/dqn_agent.hpp"
#include "blackjack/evaluation.hpp"
#include "blackjack/tabular_agent.hpp"

#include <filesystem>
#include <functional>

namespace blackjack {

enum class RunMode { Curriculum, Baseline };

std::string_view runModeName(RunMode mode);
RunMode parseRunMode(std::string_view text);

struct RunConfig {
  DeckConfig deck{8, 0.9};
  int seats = 2;
  AgentKind agent = AgentKind::Dqn;
  RunMode mode = RunMode::Curriculum;
  long trainEpisodes = 100'000;
  long evalEpisodes = 20'000;
  std::vector<uint64_t> seeds{1, 2, 3};
  LlmConfig llm;
  std::filesystem::path mockScript;
  std::filesystem::path fallbackFile;
  long stageBaseBudget = kDefaultStageBaseBudget;
  int retryCap = 2;
  long evalEvery = 5'000;
  long evalWindow = 2'000;
  /** Episodes logged one per line before switching to per-bucket aggregates. */
  long detailEpisodes = 10'000;
  long bucketSize = 1'000;
  TabularParams tabular;
  DqnParams dqn;

  void validate() const;
  /** Everything that affects results; output locations are left out. */
  nlohmann::json toJson() const;
  /** Inverse of toJson; fields that toJson leaves out keep their defaults. */
  static RunConfig fromJson(const nlohmann::json &j);
};

/** One greedy evaluation window taken during training. */
struct Snapshot {
  long episode = 0;
  int stageId = 0;
  Metrics metrics;

  nlohmann::json toJson() const;
  static Snapshot fromJson(const nlohmann::json &j);
};

struct BestTrack {
  double bestWinRate = 0.0;
  int stageAtBest = 0;
  long episodeAtBest = 0;
  double finalWinRate = 0.0;

  bool operator==(const BestTrack &) const = default;
};

/** Best over all snapshots (earliest on ties) and the last snapshot. Requires one. */
BestTrack trackBest(const std::vector<Snapshot> &snapshots);

/** Everything the report layer needs about one run; written as summary.json. */
struct RunSummary {
  uint64_t seed = 0;
  AgentKind agent = AgentKind::Dqn;
  RunMode mode = RunMode::Curriculum;
  std::string deck;
  nlohmann::json config;
  std::vector<Snapshot> snapshots;
  std::vector<CurriculumStage> stages;
  std::vector<nlohmann::json> transitions;
  BestTrack best;
  /** Best window win rate reached in each stage. */
  std::map<int, double> bestByStage;
  Metrics heldOutFinal;
  Metrics heldOutBest;
  ActionSet finalActions;
  ActionSet bestActions;
  double agreementFinal = 0.0;
  double agreementBest = 0.0;
  int completedStages = 0;
  bool curriculumComplete = false;
  long trainingEpisodes = 0;
  int llmAttempts = 0;
  int llmFallbacks = 0;
  std::string finalCheckpoint;
  std::string bestCheckpoint;

  nlohmann::json toJson() const;
  static RunSummary fromJson(const nlohmann::json &j);
};

/** Wall-clock seconds per phase; kept out of the run log so logs stay reproducible. */
struct RunTiming {
  double training = 0.0;
  double evaluationWindows = 0.0;
  double finalEvaluation = 0.0;
  double coach = 0.0;
  double total = 0.0;

  nlohmann::json toJson() const;
};

struct RunOutcome {
  RunSummary summary;
  RunTiming timing;
};

using ProgressFn = std::function<void(const std::string &)>;

std::unique_ptr<Agent> makeAgent(const RunConfig &cfg, uint64_t seed);

/** Trains one seed and writes run.jsonl, summary.json, timing.json,
 * transcript.jsonl (curriculum mode) and checkpoints/ under `runDir`. */
RunOutcome runTraining(const RunConfig &cfg, uint64_t seed, const std::filesystem::path &runDir,
                       const ProgressFn &progress = {});

/** Directory name for one condition and seed: "dqn-curriculum-8deck/seed-1". */
std::filesystem::path runDirectory(const RunConfig &cfg, uint64_t seed);

} // namespace blackjack
