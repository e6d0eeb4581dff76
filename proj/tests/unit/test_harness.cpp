#include "blackjack/report.hpp"

#include "dealer_oracle.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace blackjack;

namespace {

const std::filesystem::path kData = BLACKJACK_DATA_DIR;

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string &name) {
  const auto dir = std::filesystem::temp_directory_path() / ("bj_harness_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/** Small curriculum run that finishes in well under a second. */
RunConfig tinyConfig(RunMode mode) {
  RunConfig cfg;
  cfg.agent = AgentKind::Tabular;
  cfg.mode = mode;
  cfg.trainEpisodes = 6000;
  cfg.evalEpisodes = 2000;
  cfg.evalEvery = 1000;
  cfg.evalWindow = 400;
  cfg.detailEpisodes = 1000;
  cfg.bucketSize = 500;
  cfg.stageBaseBudget = 1000;
  cfg.seeds = {9};
  cfg.llm.provider = ProviderKind::Mock;
  cfg.mockScript = kData / "mock_curriculum_7stage.json";
  cfg.fallbackFile = kData / "fallback_curriculum.json";
  return cfg;
}

/** Mock script whose stages can never reach their threshold. */
std::filesystem::path unreachableScript(const std::filesystem::path &dir) {
  auto stages = loadCurriculumFile(kData / "fallback_curriculum.json");
  nlohmann::json script = nlohmann::json::array();
  for (auto &s : stages) s.successThreshold = kMaxSuccessThreshold;
  script.push_back(stages.front().toJson());
  for (size_t i = 1; i < stages.size(); ++i) script.push_back({{"advance", true}, {"next_stage", stages[i].toJson()}});
  script.push_back({{"advance", true}, {"next_stage", nullptr}});
  const auto path = dir / "unreachable.json";
  std::ofstream(path) << script.dump();
  return path;
}

Snapshot snap(long episode, int stage, long wins, long episodes = 100) {
  Metrics m;
  for (long i = 0; i < episodes; ++i) m.add(i < wins ? 1.0 : -1.0, false, false);
  return {episode, stage, m};
}

} // namespace

TEST_CASE("always-stand evaluation matches the exact win probability") {
  const PolicyAgent stand("stand", [](const Observation &) { return Action::Stand; });
  const Metrics m = runEvaluation(stand, {DeckConfig{0, 1.0}, 2, false}, ActionSet::all(), 1'000'000, 42);
  CHECK(m.episodes == 1'000'000);
  CHECK(std::abs(m.winRate() - 0.38417707472943846) < 0.005);
  CHECK(std::abs(oracle::standWinProbability() - 0.38417707472943846) < 1e-12);
  CHECK(m.busts == 0);
}

TEST_CASE("push-only table gives zero win rate and reward") {
  // Every card is a ten: both seats and the dealer hold 20 forever.
  Table table({DeckConfig{0, 1.0}, 2, false}, 1);
  table.shoe().rig({Card{Rank::Ten}});
  const PolicyAgent stand("stand", [](const Observation &) { return Action::Stand; });
  const Metrics m = evaluateOn(table, stand, ActionSet::all(), 1000);
  CHECK(m.winRate() == 0.0);
  CHECK(m.avgReward() == 0.0);
  CHECK(m.pushRate() == 1.0);
}

TEST_CASE("evaluation never changes the agent") {
  DqnParams p;
  p.layerSizes = {kFeatureCount, 16, kNumActions};
  p.warmup = 64;
  DqnAgent agent(p, 3);
  Table table({DeckConfig{8, 0.9}, 2, false}, 5);
  for (int r = 0; r < 300; ++r) {
    table.startRound();
    while (auto s = table.actingSeat()) {
      const Observation o = table.observe(*s, ActionSet::all());
      const Action a = agent.selectAction(o, false);
      table.step(*s, a, ActionSet::all());
      agent.learn({o, a, 0.0, o, true});
    }
  }
  const std::string before = agent.checkpoint().dump();
  CellVisits visits;
  runEvaluation(agent, {DeckConfig{8, 0.9}, 2, false}, ActionSet::all(), 5000, 17, &visits);
  CHECK(agent.checkpoint().dump() == before);
  CHECK(!visits.empty());
}

TEST_CASE("win, push and loss partition the episodes") {
  const PolicyAgent hit("hit17", [](const Observation &o) {
    return o.playerTotal < 17 && o.legal[code(Action::Hit)] ? Action::Hit : Action::Stand;
  });
  for (int decks : {0, 1, 8}) {
    const Metrics m = runEvaluation(hit, {DeckConfig{decks, 0.75}, 2, false}, ActionSet::all(), 20001, decks + 1);
    CHECK(m.episodes == 20001);
    CHECK(m.wins + m.pushes + m.losses == m.episodes);
    CHECK(std::abs(m.winRate() + m.pushRate() + m.lossRate() - 1.0) < 1e-12);
    CHECK(Metrics::fromJson(m.toJson()) == m);
  }
}

TEST_CASE("track best examples") {
  const auto t = trackBest({snap(5000, 1, 42), snap(10000, 4, 49), snap(15000, 7, 45)});
  CHECK(t.bestWinRate == doctest::Approx(0.49));
  CHECK(t.stageAtBest == 4);
  CHECK(t.episodeAtBest == 10000);
  CHECK(t.finalWinRate == doctest::Approx(0.45));

  const auto mono = trackBest({snap(1, 1, 40), snap(2, 2, 41), snap(3, 3, 43)});
  CHECK(mono.bestWinRate == mono.finalWinRate);

  const auto one = trackBest({snap(1, 2, 44)});
  CHECK(one.bestWinRate == one.finalWinRate);
  CHECK(one.stageAtBest == 2);

  const auto tie = trackBest({snap(1, 1, 44), snap(2, 2, 44)});
  CHECK(tie.stageAtBest == 1);
  CHECK_THROWS_AS(trackBest({}), std::invalid_argument);
}

TEST_CASE("aggregate examples") {
  RunSummary a, b;
  a.seed = 1;
  b.seed = 2;
  a.deck = b.deck = "8-deck";
  a.best.bestWinRate = 0.46;
  b.best.bestWinRate = 0.48;
  a.best.stageAtBest = 4;
  b.best.stageAtBest = 4;
  const auto two = aggregateSeeds({a, b});
  REQUIRE(two.size() == 1);
  CHECK(two[0].bestWinRate.mean == doctest::Approx(0.47));
  CHECK(two[0].bestWinRate.min == 0.46);
  CHECK(two[0].bestWinRate.max == 0.48);
  CHECK(two[0].bestWinRate.std == doctest::Approx(0.0141421356).epsilon(1e-8));
  CHECK(two[0].stageAtPeakMode == 4);

  const auto single = aggregateSeeds({a});
  CHECK(single[0].bestWinRate.std == 0.0);

  RunSummary c = a, d = a, e = a;
  c.best.stageAtBest = 3;
  d.best.stageAtBest = 4;
  e.best.stageAtBest = 4;
  const auto modeReport = aggregateSeeds({c, d, e});
  CHECK(modeReport[0].stageAtPeakMode == 4);
  CHECK(modeReport[0].stageAtPeak.at(3) == 1);
  CHECK(modeReport[0].stageAtPeak.at(4) == 2);

  RunSummary base = a;
  base.mode = RunMode::Baseline;
  CHECK(aggregateSeeds({a, base}).size() == 2);
}

TEST_CASE("identical seeds give identical run logs") {
  const auto dir = scratch("determinism");
  const RunConfig cfg = tinyConfig(RunMode::Curriculum);
  const auto r1 = runTraining(cfg, 9, dir / "a");
  const auto r2 = runTraining(cfg, 9, dir / "b");
  CHECK(slurp(dir / "a" / "run.jsonl") == slurp(dir / "b" / "run.jsonl"));
  CHECK(slurp(dir / "a" / "summary.json") == slurp(dir / "b" / "summary.json"));
  CHECK(slurp(dir / "a" / "checkpoints" / "final.json") == slurp(dir / "b" / "checkpoints" / "final.json"));
  const auto r3 = runTraining(cfg, 10, dir / "c");
  CHECK(slurp(dir / "a" / "run.jsonl") != slurp(dir / "c" / "run.jsonl"));
  CHECK(r1.summary.trainingEpisodes == cfg.trainEpisodes);
}

TEST_CASE("run log records and summary round trip") {
  const auto dir = scratch("records");
  const RunConfig cfg = tinyConfig(RunMode::Curriculum);
  const auto r = runTraining(cfg, 9, dir);
  std::ifstream in(dir / "run.jsonl");
  std::map<std::string, long> counts;
  std::string line;
  long lastEpisode = -1;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    const auto type = j.at("type").get<std::string>();
    ++counts[type];
    if (type == "episode") {
      CHECK(j.at("episode").get<long>() == lastEpisode + 1);
      lastEpisode = j.at("episode").get<long>();
    }
  }
  CHECK(counts["config"] == 1);
  CHECK(counts["episode"] == cfg.detailEpisodes);
  CHECK(counts["bucket"] == (cfg.trainEpisodes - cfg.detailEpisodes) / cfg.bucketSize);
  CHECK(counts["evaluation"] == cfg.trainEpisodes / cfg.evalEvery);
  CHECK(counts["window_episode"] == counts["evaluation"] * cfg.evalWindow);
  CHECK(counts["final"] == 1);
  CHECK(counts["stage"] == static_cast<long>(r.summary.stages.size()));

  const auto loaded = RunSummary::fromJson(nlohmann::json::parse(slurp(dir / "summary.json")));
  CHECK(loaded.toJson() == r.summary.toJson());
  CHECK(RunConfig::fromJson(cfg.toJson()).toJson() == cfg.toJson());
  CHECK(std::filesystem::exists(dir / "timing.json"));
  CHECK(std::filesystem::exists(dir / "transcript.jsonl"));
  CHECK(loadCheckpoint(dir / r.summary.bestCheckpoint)->kind() == AgentKind::Tabular);
}

TEST_CASE("baseline makes no coach calls and keeps every action") {
  const auto dir = scratch("baseline");
  RunConfig cfg = tinyConfig(RunMode::Baseline);
  cfg.llm.provider = ProviderKind::Live; // would throw without a key if it were used
  cfg.llm.apiKey.clear();
  const auto r = runTraining(cfg, 4, dir);
  CHECK(r.summary.llmAttempts == 0);
  CHECK(r.summary.transitions.empty());
  REQUIRE(r.summary.stages.size() == 1);
  CHECK(r.summary.stages[0].availableActions == ActionSet::all());
  CHECK(r.summary.finalActions == ActionSet::all());
  for (const auto &s : r.summary.snapshots) CHECK(s.stageId == 1);
  CHECK(!std::filesystem::exists(dir / "transcript.jsonl"));
}

TEST_CASE("unmet thresholds advance exactly at the budget boundaries") {
  const auto dir = scratch("budget");
  RunConfig cfg = tinyConfig(RunMode::Curriculum);
  cfg.mockScript = unreachableScript(dir);
  cfg.trainEpisodes = 16000;
  const auto r = runTraining(cfg, 2, dir / "run");
  // Budgets are 1000 x difficulty: 1, 2, 2, 3, 4, 4, 5 thousand episodes.
  const std::vector<long> boundaries{1000, 3000, 5000, 8000, 12000, 16000};
  std::vector<long> seen;
  for (const auto &t : r.summary.transitions) {
    CHECK(t.at("decision").get<std::string>() == "advance");
    seen.push_back(t.at("episode").get<long>());
  }
  CHECK(seen == boundaries);
  CHECK(r.summary.stages.size() == 7);
  CHECK(r.summary.completedStages == 6);
  CHECK(r.summary.trainingEpisodes <= cfg.trainEpisodes);
}

TEST_CASE("report is a pure function of the logs") {
  const auto dir = scratch("report");
  RunConfig cfg = tinyConfig(RunMode::Curriculum);
  cfg.seeds = {1, 2};
  runMatrix(cfg, dir / "logs");
  cfg.mode = RunMode::Baseline;
  runMatrix(cfg, dir / "logs");
  const auto files = writeReport(dir / "logs", dir / "r1");
  writeReport(dir / "logs", dir / "r2");
  CHECK(std::find(files.begin(), files.end(), "table1.csv") != files.end());
  for (const auto &f : files) {
    INFO(f);
    CHECK(slurp(dir / "r1" / f) == slurp(dir / "r2" / f));
  }
  const std::string table = slurp(dir / "r1" / "table1.csv");
  CHECK(table.rfind("stage,name,actions,tabular_best_win_rate,tabular_runs\n", 0) == 0);
  CHECK(table.find("\nbaseline,") != std::string::npos);
  const auto agg = nlohmann::json::parse(slurp(dir / "r1" / "aggregate.json"));
  CHECK(agg.at("conditions").size() == 2);

  std::filesystem::create_directories(dir / "empty");
  CHECK_THROWS_AS(writeReport(dir / "empty", dir / "r3"), NoRunsFound);
}

TEST_CASE("table one lists every curriculum stage") {
  std::vector<LoadedRun> runs(1);
  runs[0].summary.stages = loadCurriculumFile(kData / "fallback_curriculum.json");
  for (const auto &s : runs[0].summary.stages) runs[0].summary.bestByStage[s.stageId] = 0.4 + s.stageId / 100.0;
  const std::string csv = table1Csv(runs);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);
  CHECK(csv.find("\n4,Full Basic") != std::string::npos);
}

TEST_CASE("config validation") {
  RunConfig cfg = tinyConfig(RunMode::Curriculum);
  cfg.trainEpisodes = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = tinyConfig(RunMode::Curriculum);
  cfg.deck.penetration = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(parseRunMode("staged"), ConfigError);
}
