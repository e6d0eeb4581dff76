#include "blackjack/heatmap.hpp"
#include "blackjack/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace blackjack;

namespace {

const std::filesystem::path kDataDir = BLACKJACK_DATA_DIR;

struct RunFlags {
  std::string decks = "8";
  double penetration = 0.9;
  std::string agent = "dqn";
  std::string mode = "curriculum";
  long trainEpisodes = 100'000;
  long evalEpisodes = 20'000;
  int seedCount = 3;
  std::string seedList;
  std::string llm = "mock";
  std::string mockScript;
  std::string fallback;
  long stageBaseBudget = kDefaultStageBaseBudget;
  std::string out = "runs";
  bool quiet = false;

  void attach(CLI::App &cmd) {
    cmd.add_option("--decks", decks, "Deck count: 1, 4, 8 or inf")->check(CLI::IsMember({"1", "4", "8", "inf"}));
    cmd.add_option("--penetration", penetration, "Fraction of the shoe dealt before reshuffling");
    cmd.add_option("--agent", agent, "Learner")->check(CLI::IsMember({"tabular", "dqn"}));
    cmd.add_option("--mode", mode, "Training condition")->check(CLI::IsMember({"curriculum", "baseline"}));
    cmd.add_option("--train-episodes", trainEpisodes, "Training episodes per run");
    cmd.add_option("--eval-episodes", evalEpisodes, "Held-out evaluation episodes per run");
    auto *count = cmd.add_option("--seeds", seedCount, "Number of seeds (1..N)");
    cmd.add_option("--seed-list", seedList, "Comma-separated seeds")->excludes(count);
    cmd.add_option("--llm", llm, "Coach provider")->check(CLI::IsMember({"live", "mock", "fallback-only"}));
    cmd.add_option("--mock-script", mockScript, "Scripted coach responses (JSON array)");
    cmd.add_option("--fallback", fallback, "Fallback curriculum file");
    cmd.add_option("--stage-base-budget", stageBaseBudget, "Episodes per unit of stage difficulty");
    cmd.add_option("--out", out, "Output directory");
    cmd.add_flag("--quiet", quiet, "Only print the final summary");
  }

  RunConfig build() const {
    RunConfig cfg;
    cfg.deck = {parseDeckCount(decks), penetration};
    cfg.agent = parseAgentKind(agent);
    cfg.mode = parseRunMode(mode);
    cfg.trainEpisodes = trainEpisodes;
    cfg.evalEpisodes = evalEpisodes;
    cfg.seeds.clear();
    if (!seedList.empty()) {
      std::stringstream ss(seedList);
      std::string item;
      while (std::getline(ss, item, ',')) cfg.seeds.push_back(std::stoull(item));
    } else {
      if (seedCount < 1) throw ConfigError("--seeds must be positive");
      for (int s = 1; s <= seedCount; ++s) cfg.seeds.push_back(static_cast<uint64_t>(s));
    }
    cfg.llm.provider = parseProviderKind(llm);
    cfg.mockScript = mockScript.empty() ? kDataDir / "mock_curriculum_7stage.json" : std::filesystem::path(mockScript);
    cfg.fallbackFile = fallback.empty() ? kDataDir / "fallback_curriculum.json" : std::filesystem::path(fallback);
    cfg.stageBaseBudget = stageBaseBudget;
    return cfg;
  }
};

void printRun(const RunOutcome &r) {
  const auto &s = r.summary;
  std::printf("%s seed %llu: best %.4f at stage %d, held-out win %.4f bust %.4f, agreement %.3f, %.1fs\n",
              conditionName(s).c_str(), static_cast<unsigned long long>(s.seed), s.best.bestWinRate,
              s.best.stageAtBest, s.heldOutBest.winRate(), s.heldOutBest.bustRate(), s.agreementBest,
              r.timing.total);
}

int cmdRun(const RunFlags &flags) {
  RunConfig cfg = flags.build();
  if (cfg.mode == RunMode::Baseline && cfg.llm.provider == ProviderKind::Live)
    std::cerr << "warning: the coach is not used in baseline mode; --llm live is ignored\n";
  if (cfg.mode == RunMode::Curriculum && cfg.llm.provider == ProviderKind::Live)
    cfg.llm = withEnvironment(cfg.llm);
  ProgressFn progress;
  if (!flags.quiet) progress = [](const std::string &line) { std::cerr << line << '\n'; };
  for (const auto &r : runMatrix(cfg, flags.out, progress)) printRun(r);
  std::printf("wrote %s\n", (std::filesystem::path(flags.out) / "aggregate.json").string().c_str());
  return 0;
}

int cmdReport(const std::string &logDir, std::string out) {
  if (out.empty()) out = (std::filesystem::path(logDir) / "report").string();
  const auto files = writeReport(logDir, out);
  for (const auto &f : files) std::printf("%s\n", (std::filesystem::path(out) / f).string().c_str());
  return 0;
}

int cmdHeatmap(const std::string &checkpoint, const std::string &actions, std::optional<double> tc, bool sweep,
               const std::string &out, const std::string &title) {
  const auto agent = loadCheckpoint(checkpoint);
  std::vector<int> codes;
  std::stringstream ss(actions);
  std::string item;
  while (std::getline(ss, item, ',')) codes.push_back(std::stoi(item));
  const ActionSet set = ActionSet::fromCodes(codes);
  std::vector<double> counts;
  if (sweep) {
    for (int c = -5; c <= 5; ++c) counts.push_back(c);
  } else {
    counts.push_back(tc.value_or(0.0));
  }
  std::filesystem::create_directories(out);
  for (double c : counts) {
    const PolicyHeatmap hm = extractHeatmap(*agent, set, c);
    char suffix[32];
    std::snprintf(suffix, sizeof suffix, "tc%+g", c);
    const auto base = std::filesystem::path(out) / ("heatmap-" + std::string(suffix));
    std::ofstream(base.string() + ".csv") << heatmapCsv(hm);
    std::ofstream(base.string() + ".svg") << heatmapSvg(hm, title + " (" + suffix + ")");
    std::printf("%s.csv agreement %.4f\n", base.string().c_str(),
                strategyAgreement(hm, BasicStrategyChart::standard(), set));
  }
  return 0;
}

int cmdValidate(const std::string &file) {
  const auto stages = loadCurriculumFile(file);
  for (const auto &s : stages) {
    std::printf("stage %d  %-28s actions [%s]  difficulty %d  threshold %.3f  budget %ld\n", s.stageId,
                s.name.c_str(), s.availableActions.toString().c_str(), s.difficulty, s.successThreshold,
                episodeBudget(s, kDefaultStageBaseBudget));
  }
  std::printf("%zu stages OK\n", stages.size());
  return 0;
}

int cmdReplay(const std::string &runDir, const std::string &out) {
  std::ifstream in(std::filesystem::path(runDir) / "summary.json");
  if (!in) throw std::runtime_error("no summary.json in " + runDir);
  const auto summary = RunSummary::fromJson(nlohmann::json::parse(in));
  RunConfig cfg = RunConfig::fromJson(summary.config);
  std::filesystem::create_directories(out);
  if (cfg.mode == RunMode::Curriculum) {
    const auto script = std::filesystem::path(out) / "replay_script.json";
    std::ofstream(script) << Transcript::replayScript(std::filesystem::path(runDir) / "transcript.jsonl").dump(2)
                          << '\n';
    cfg.llm.provider = ProviderKind::Mock;
    cfg.mockScript = script;
  }
  const auto r = runTraining(cfg, summary.seed, std::filesystem::path(out) / "run");
  printRun(r);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Blackjack reinforcement learning with an action curriculum"};
  app.require_subcommand(1);

  RunFlags runFlags;
  auto *run = app.add_subcommand("run", "Train every seed of one condition and aggregate");
  runFlags.attach(*run);

  std::string logDir, reportOut;
  auto *report = app.add_subcommand("report", "Emit tables, progression series and heatmaps from run logs");
  report->add_option("logs", logDir, "Directory holding run logs")->required();
  report->add_option("--out", reportOut, "Output directory (default <logs>/report)");

  std::string checkpoint, actions = "0,1,2,3,4,5", heatOut = "heatmap", title = "policy";
  std::optional<double> tc;
  bool sweep = false;
  auto *heatmap = app.add_subcommand("heatmap", "Greedy-action heatmap of a checkpoint");
  heatmap->add_option("checkpoint", checkpoint, "Agent checkpoint file")->required();
  heatmap->add_option("--actions", actions, "Comma-separated action codes the policy may use");
  auto *tcOpt = heatmap->add_option("--tc", tc, "True count to synthesize (default 0)");
  heatmap->add_flag("--tc-sweep", sweep, "One heatmap per true count -5..5")->excludes(tcOpt);
  heatmap->add_option("--out", heatOut, "Output directory");
  heatmap->add_option("--title", title, "Figure title");

  std::string curriculumFile;
  auto *validate = app.add_subcommand("curriculum-validate", "Check a curriculum file against the stage schema");
  validate->add_option("file", curriculumFile, "Curriculum JSON file")->required();

  std::string replayDir, replayOut = "replay";
  auto *replay = app.add_subcommand("replay", "Re-run a logged run, answering the coach from its transcript");
  replay->add_option("run_dir", replayDir, "Run directory with summary.json and transcript.jsonl")->required();
  replay->add_option("--out", replayOut, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    if (code != 0) std::cerr << app.help();
    return code;
  }

  try {
    if (*run) return cmdRun(runFlags);
    if (*report) return cmdReport(logDir, reportOut);
    if (*heatmap) return cmdHeatmap(checkpoint, actions, tc, sweep, heatOut, title);
    if (*validate) return cmdValidate(curriculumFile);
    if (*replay) return cmdReplay(replayDir, replayOut);
  } catch (const SchemaError &e) {
    std::cerr << "error: invalid curriculum: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
