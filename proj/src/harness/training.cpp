#include "blackjack/training.hpp"
#include "blackjack/heatmap.hpp"

#include <chrono>
#include <deque>
#include <fstream>

namespace blackjack {

namespace {

constexpr uint64_t kTableStream = 0x7A;
constexpr uint64_t kAgentStream = 0xA6;
constexpr uint64_t kWindowStream = 0xE1;
constexpr uint64_t kHeldOutStream = 0xE2;

using SteadyClock = std::chrono::steady_clock;

double secondsSince(SteadyClock::time_point start) {
  return std::chrono::duration<double>(SteadyClock::now() - start).count();
}

/** JSON-lines writer for run.jsonl. */
class RunLog {
public:
  explicit RunLog(const std::filesystem::path &path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
  }
  void write(const nlohmann::json &record) { out_ << record.dump() << '\n'; }

private:
  std::ofstream out_;
};

void writeJsonFile(const std::filesystem::path &path, const nlohmann::json &j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

struct PendingStep {
  Observation state;
  Action action = Action::Stand;
};

nlohmann::json episodeRecord(const char *type, long index, const Table &table, int seat) {
  const SeatState &s = table.seat(seat);
  std::vector<int> actions;
  for (Action a : s.actions) actions.push_back(code(a));
  const double r = table.seatReward(seat);
  return {{"type", type},          {"episode", index},
          {"round", table.roundId()}, {"seat", seat},
          {"reward", r},           {"won", r > 0},
          {"pushed", r == 0},      {"busted", s.anyBust()},
          {"surrendered", s.surrendered()}, {"actions", actions}};
}

/** Per-bucket aggregate of training episodes past the detailed prefix. */
struct Bucket {
  long first = 0;
  Metrics metrics;
  std::map<int, long> stageEpisodes;
};

} // namespace

std::string_view runModeName(RunMode mode) { return mode == RunMode::Curriculum ? "curriculum" : "baseline"; }

RunMode parseRunMode(std::string_view text) {
  if (text == "curriculum") return RunMode::Curriculum;
  if (text == "baseline") return RunMode::Baseline;
  throw ConfigError("mode must be curriculum or baseline");
}

void RunConfig::validate() const {
  try {
    deck.validate();
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  if (seats < 1) throw ConfigError("at least one seat is required");
  if (agent == AgentKind::Fixed) throw ConfigError("agent must be tabular or dqn");
  if (trainEpisodes < 1) throw ConfigError("train episodes must be positive");
  if (evalEpisodes < 1) throw ConfigError("eval episodes must be positive");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (stageBaseBudget < 1) throw ConfigError("stage base budget must be positive");
  if (retryCap < 0) throw ConfigError("retry cap must be non-negative");
  if (evalEvery < 1 || evalWindow < 1) throw ConfigError("evaluation windows must be positive");
  if (bucketSize < 1 || detailEpisodes < 0) throw ConfigError("log thinning sizes must be positive");
  if (mode == RunMode::Curriculum && llm.provider == ProviderKind::Mock && mockScript.empty())
    throw ConfigError("mock provider needs a mock script");
}

nlohmann::json RunConfig::toJson() const {
  nlohmann::json j = {{"decks", deck.decks},
                      {"deck", deck.label()},
                      {"penetration", deck.penetration},
                      {"seats", seats},
                      {"agent", agentKindName(agent)},
                      {"mode", runModeName(mode)},
                      {"train_episodes", trainEpisodes},
                      {"eval_episodes", evalEpisodes},
                      {"seeds", seeds},
                      {"stage_base_budget", stageBaseBudget},
                      {"retry_cap", retryCap},
                      {"eval_every", evalEvery},
                      {"eval_window", evalWindow},
                      {"detail_episodes", detailEpisodes},
                      {"bucket_size", bucketSize}};
  if (mode == RunMode::Curriculum) {
    j["llm"] = {{"provider", providerKindName(llm.provider)},
                {"model", llm.modelName},
                {"temperature", llm.temperature},
                {"top_p", llm.topP},
                {"max_retries", llm.maxRetries}};
    j["mock_script"] = mockScript.generic_string();
    j["fallback"] = fallbackFile.generic_string();
  }
  if (agent == AgentKind::Tabular) {
    j["tabular"] = {{"alpha0", tabular.alpha0},
                    {"gamma", tabular.gamma},
                    {"epsilon", tabular.epsilon},
                    {"epsilon_decay", tabular.epsilonDecay},
                    {"epsilon_min", tabular.epsilonMin}};
  } else {
    j["dqn"] = {{"layer_sizes", dqn.layerSizes},
                {"learning_rate", dqn.learningRate},
                {"gamma", dqn.gamma},
                {"batch_size", dqn.batchSize},
                {"warmup", dqn.warmup},
                {"replay_capacity", dqn.replayCapacity},
                {"target_sync_every", dqn.targetSyncEvery},
                {"epsilon", dqn.epsilon},
                {"epsilon_decay", dqn.epsilonDecay},
                {"epsilon_min", dqn.epsilonMin},
                {"stage_lr_factor", dqn.stageLrFactor},
                {"stage_lr_from_stage", dqn.stageLrFromStage},
                {"huber_delta", dqn.huberDelta}};
  }
  return j;
}

RunConfig RunConfig::fromJson(const nlohmann::json &j) {
  RunConfig c;
  try {
    c.deck = {j.at("decks").get<int>(), j.at("penetration").get<double>()};
    c.seats = j.at("seats").get<int>();
    c.agent = parseAgentKind(j.at("agent").get<std::string>());
    c.mode = parseRunMode(j.at("mode").get<std::string>());
    c.trainEpisodes = j.at("train_episodes").get<long>();
    c.evalEpisodes = j.at("eval_episodes").get<long>();
    c.seeds = j.at("seeds").get<std::vector<uint64_t>>();
    c.stageBaseBudget = j.at("stage_base_budget").get<long>();
    c.retryCap = j.at("retry_cap").get<int>();
    c.evalEvery = j.at("eval_every").get<long>();
    c.evalWindow = j.at("eval_window").get<long>();
    c.detailEpisodes = j.at("detail_episodes").get<long>();
    c.bucketSize = j.at("bucket_size").get<long>();
    if (j.contains("llm")) {
      const auto &l = j.at("llm");
      c.llm.provider = parseProviderKind(l.at("provider").get<std::string>());
      c.llm.modelName = l.at("model").get<std::string>();
      c.llm.temperature = l.at("temperature").get<double>();
      c.llm.topP = l.at("top_p").get<double>();
      c.llm.maxRetries = l.at("max_retries").get<int>();
      c.mockScript = j.at("mock_script").get<std::string>();
      c.fallbackFile = j.at("fallback").get<std::string>();
    }
    if (j.contains("tabular")) {
      const auto &t = j.at("tabular");
      c.tabular = {t.at("alpha0").get<double>(), t.at("gamma").get<double>(), t.at("epsilon").get<double>(),
                   t.at("epsilon_decay").get<double>(), t.at("epsilon_min").get<double>()};
    }
    if (j.contains("dqn")) {
      const auto &d = j.at("dqn");
      c.dqn.layerSizes = d.at("layer_sizes").get<std::vector<int>>();
      c.dqn.learningRate = d.at("learning_rate").get<double>();
      c.dqn.gamma = d.at("gamma").get<double>();
      c.dqn.batchSize = d.at("batch_size").get<size_t>();
      c.dqn.warmup = d.at("warmup").get<size_t>();
      c.dqn.replayCapacity = d.at("replay_capacity").get<size_t>();
      c.dqn.targetSyncEvery = d.at("target_sync_every").get<int64_t>();
      c.dqn.epsilon = d.at("epsilon").get<double>();
      c.dqn.epsilonDecay = d.at("epsilon_decay").get<double>();
      c.dqn.epsilonMin = d.at("epsilon_min").get<double>();
      c.dqn.stageLrFactor = d.at("stage_lr_factor").get<double>();
      c.dqn.stageLrFromStage = d.at("stage_lr_from_stage").get<int>();
      c.dqn.huberDelta = d.at("huber_delta").get<double>();
    }
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("malformed run config: ") + e.what());
  } catch (const std::invalid_argument &e) {
    throw ConfigError(std::string("malformed run config: ") + e.what());
  }
  return c;
}

nlohmann::json Snapshot::toJson() const {
  return {{"episode", episode}, {"stage_id", stageId}, {"metrics", metrics.toJson()}};
}

Snapshot Snapshot::fromJson(const nlohmann::json &j) {
  return {j.at("episode").get<long>(), j.at("stage_id").get<int>(), Metrics::fromJson(j.at("metrics"))};
}

BestTrack trackBest(const std::vector<Snapshot> &snapshots) {
  if (snapshots.empty()) throw std::invalid_argument("no evaluation snapshots");
  BestTrack t;
  const Snapshot *best = &snapshots.front();
  for (const Snapshot &s : snapshots) {
    if (s.metrics.winRate() > best->metrics.winRate()) best = &s;
  }
  t.bestWinRate = best->metrics.winRate();
  t.stageAtBest = best->stageId;
  t.episodeAtBest = best->episode;
  t.finalWinRate = snapshots.back().metrics.winRate();
  return t;
}

nlohmann::json RunSummary::toJson() const {
  nlohmann::json snaps = nlohmann::json::array();
  for (const auto &s : snapshots) snaps.push_back(s.toJson());
  nlohmann::json byStage = nlohmann::json::object();
  for (const auto &[id, w] : bestByStage) byStage[std::to_string(id)] = w;
  return {{"seed", seed},
          {"agent", agentKindName(agent)},
          {"mode", runModeName(mode)},
          {"deck", deck},
          {"config", config},
          {"snapshots", snaps},
          {"stages", curriculumToJson(stages)},
          {"transitions", transitions},
          {"best", {{"best_win_rate", best.bestWinRate},
                    {"stage_at_best", best.stageAtBest},
                    {"episode_at_best", best.episodeAtBest},
                    {"final_win_rate", best.finalWinRate}}},
          {"best_by_stage", byStage},
          {"held_out_final", heldOutFinal.toJson()},
          {"held_out_best", heldOutBest.toJson()},
          {"final_actions", finalActions.codes()},
          {"best_actions", bestActions.codes()},
          {"agreement_final", agreementFinal},
          {"agreement_best", agreementBest},
          {"completed_stages", completedStages},
          {"curriculum_complete", curriculumComplete},
          {"training_episodes", trainingEpisodes},
          {"llm_attempts", llmAttempts},
          {"llm_fallbacks", llmFallbacks},
          {"final_checkpoint", finalCheckpoint},
          {"best_checkpoint", bestCheckpoint}};
}

RunSummary RunSummary::fromJson(const nlohmann::json &j) {
  RunSummary r;
  r.seed = j.at("seed").get<uint64_t>();
  r.agent = j.at("agent").get<std::string>() == "tabular" ? AgentKind::Tabular : AgentKind::Dqn;
  r.mode = parseRunMode(j.at("mode").get<std::string>());
  r.deck = j.at("deck").get<std::string>();
  r.config = j.at("config");
  for (const auto &s : j.at("snapshots")) r.snapshots.push_back(Snapshot::fromJson(s));
  for (const auto &s : j.at("stages")) r.stages.push_back(stageFromJson(s));
  for (const auto &t : j.at("transitions")) r.transitions.push_back(t);
  const auto &b = j.at("best");
  r.best = {b.at("best_win_rate").get<double>(), b.at("stage_at_best").get<int>(),
            b.at("episode_at_best").get<long>(), b.at("final_win_rate").get<double>()};
  for (const auto &[id, w] : j.at("best_by_stage").items()) r.bestByStage[std::stoi(id)] = w.get<double>();
  r.heldOutFinal = Metrics::fromJson(j.at("held_out_final"));
  r.heldOutBest = Metrics::fromJson(j.at("held_out_best"));
  r.finalActions = ActionSet::fromCodes(j.at("final_actions").get<std::vector<int>>());
  r.bestActions = ActionSet::fromCodes(j.at("best_actions").get<std::vector<int>>());
  r.agreementFinal = j.at("agreement_final").get<double>();
  r.agreementBest = j.at("agreement_best").get<double>();
  r.completedStages = j.at("completed_stages").get<int>();
  r.curriculumComplete = j.at("curriculum_complete").get<bool>();
  r.trainingEpisodes = j.at("training_episodes").get<long>();
  r.llmAttempts = j.at("llm_attempts").get<int>();
  r.llmFallbacks = j.at("llm_fallbacks").get<int>();
  r.finalCheckpoint = j.at("final_checkpoint").get<std::string>();
  r.bestCheckpoint = j.at("best_checkpoint").get<std::string>();
  return r;
}

nlohmann::json RunTiming::toJson() const {
  return {{"training_seconds", training},
          {"evaluation_window_seconds", evaluationWindows},
          {"final_evaluation_seconds", finalEvaluation},
          {"coach_seconds", coach},
          {"total_seconds", total}};
}

std::unique_ptr<Agent> makeAgent(const RunConfig &cfg, uint64_t seed) {
  if (cfg.agent == AgentKind::Tabular) return std::make_unique<TabularAgent>(cfg.tabular, seed);
  return std::make_unique<DqnAgent>(cfg.dqn, seed);
}

std::filesystem::path runDirectory(const RunConfig &cfg, uint64_t seed) {
  const std::string condition =
      std::string(agentKindName(cfg.agent)) + "-" + std::string(runModeName(cfg.mode)) + "-" + cfg.deck.label();
  return std::filesystem::path(condition) / ("seed-" + std::to_string(seed));
}

RunOutcome runTraining(const RunConfig &cfg, uint64_t seed, const std::filesystem::path &runDir,
                       const ProgressFn &progress) {
  cfg.validate();
  const auto started = SteadyClock::now();
  RunTiming timing;
  std::filesystem::create_directories(runDir / "checkpoints");
  RunLog log(runDir / "run.jsonl");

  const TableConfig tableCfg{cfg.deck, cfg.seats, false};
  const BasicStrategyChart &chart = BasicStrategyChart::standard();
  auto agent = makeAgent(cfg, Rng::derive(seed, kAgentStream));

  nlohmann::json configEcho = cfg.toJson();
  configEcho["seed"] = seed;
  log.write({{"type", "config"}, {"config", configEcho}});

  // Both conditions share this path; only the stage source differs.
  std::unique_ptr<Transcript> transcript;
  std::unique_ptr<CoachClient> coach;
  std::deque<CurriculumStage> queued;
  std::optional<Curriculum> curriculum;
  if (cfg.mode == RunMode::Curriculum) {
    const auto coachStart = SteadyClock::now();
    transcript = std::make_unique<Transcript>(runDir / "transcript.jsonl");
    const LlmConfig llm = withEnvironment(cfg.llm);
    std::shared_ptr<Transport> transport;
    if (llm.provider == ProviderKind::Live) transport = std::make_shared<HttpTransport>();
    const Sleeper sleeper = llm.provider == ProviderKind::Live ? Sleeper(sleepFor) : Sleeper([](auto) {});
    coach = std::make_unique<CoachClient>(llm, makeProvider(llm, transport, cfg.mockScript),
                                          loadCurriculumFile(cfg.fallbackFile), transcript.get(), sleeper);
    const auto first = coach->requestStages(buildGenerationPrompt(cfg.deck), 0);
    queued.assign(first.begin() + 1, first.end());
    curriculum.emplace(first.front(), cfg.stageBaseBudget, cfg.retryCap);
    timing.coach += secondsSince(coachStart);
  } else {
    curriculum.emplace(Curriculum::baseline());
  }
  agent->onStageEntered(curriculum->stage().stageId);
  log.write({{"type", "stage"}, {"episode", 0}, {"stage", curriculum->stage().toJson()}});

  RunSummary summary;
  summary.seed = seed;
  summary.agent = cfg.agent;
  summary.mode = cfg.mode;
  summary.deck = cfg.deck.label();
  summary.config = configEcho;
  summary.stages.push_back(curriculum->stage());

  Table table(tableCfg, Rng::derive(seed, kTableStream));
  std::unique_ptr<Agent> bestAgent;
  ActionSet bestActions;
  CellVisits lastVisits;
  long episode = 0;
  long nextEval = cfg.evalEvery;
  int window = 0;
  std::optional<Bucket> bucket;

  auto flushBucket = [&]() {
    if (!bucket || bucket->metrics.episodes == 0) return;
    nlohmann::json stages = nlohmann::json::object();
    for (const auto &[id, n] : bucket->stageEpisodes) stages[std::to_string(id)] = n;
    log.write({{"type", "bucket"},
               {"first_episode", bucket->first},
               {"last_episode", bucket->first + bucket->metrics.episodes - 1},
               {"stage_episodes", stages},
               {"metrics", bucket->metrics.toJson()}});
    bucket.reset();
  };

  auto evaluateWindow = [&]() {
    const auto evalStart = SteadyClock::now();
    ++window;
    const ActionSet actions = curriculum->stage().availableActions;
    lastVisits.clear();
    long i = 0;
    Table evalTable(tableCfg, Rng::derive(seed, kWindowStream));
    const Metrics m = evaluateOn(evalTable, *agent, actions, cfg.evalWindow, &lastVisits,
                                 [&](const Table &t, int s) {
                                   auto rec = episodeRecord("window_episode", i++, t, s);
                                   rec["window"] = window;
                                   log.write(rec);
                                 });
    const Snapshot snap{episode, curriculum->stage().stageId, m};
    log.write({{"type", "evaluation"}, {"window", window}, {"snapshot", snap.toJson()}});
    curriculum->recordEvaluation(episode, m.winRate(), m.bustRate());
    if (summary.snapshots.empty() || m.winRate() > trackBest(summary.snapshots).bestWinRate) {
      bestAgent = agent->clonePolicy();
      bestActions = actions;
    }
    summary.snapshots.push_back(snap);
    auto [it, inserted] = summary.bestByStage.try_emplace(snap.stageId, m.winRate());
    if (!inserted) it->second = std::max(it->second, m.winRate());
    timing.evaluationWindows += secondsSince(evalStart);
    if (progress) {
      char line[160];
      std::snprintf(line, sizeof line, "episode %ld stage %d win %.4f bust %.4f eps %.4f", episode,
                    snap.stageId, m.winRate(), m.bustRate(), agent->epsilon());
      progress(line);
    }
  };

  auto giveFeedback = [&]() {
    const auto coachStart = SteadyClock::now();
    if (curriculum->progress().evalHistory.empty()) evaluateWindow();
    const CurriculumStage current = curriculum->stage();
    const GreedyPolicy policy = [&](const Observation &o) { return agent->greedyAction(o); };
    const PerformanceSummary perf = buildSummary(curriculum->progress(), policy, chart, lastVisits);
    AdaptationDecision d = coach->requestDecision(
        buildAdaptationPrompt(cfg.deck, kComplexityMap, perf, current), current.stageId, AdaptationDecision{});
    if (d.nextStage && d.nextStage->stageId <= current.stageId) d.nextStage.reset();
    const Curriculum::StageSource next = [&]() {
      if (!queued.empty()) {
        CurriculumStage s = queued.front();
        queued.pop_front();
        if (s.stageId > current.stageId) return s;
      }
      CurriculumStage s = coach->requestStage(buildGenerationPrompt(cfg.deck, kComplexityMap, perf),
                                              coach->fallbackCursorAfter(current.stageId));
      return s.stageId > current.stageId ? s : coach->fallbackAfter(current.stageId);
    };
    const StageTransition t = curriculum->apply(d, episode, perf, next);
    const nlohmann::json tj = t.toJson();
    log.write({{"type", "transition"}, {"transition", tj}});
    summary.transitions.push_back(tj);
    if (t.decision != "continue") ++summary.completedStages;
    if (t.newStage != t.oldStage) {
      agent->onStageEntered(curriculum->stage().stageId);
      summary.stages.push_back(curriculum->stage());
      log.write({{"type", "stage"}, {"episode", episode}, {"stage", curriculum->stage().toJson()}});
    }
    timing.coach += secondsSince(coachStart);
  };

  const auto trainStart = SteadyClock::now();
  std::vector<std::optional<PendingStep>> pending(static_cast<size_t>(cfg.seats));
  while (episode < cfg.trainEpisodes) {
    const ActionSet actions = curriculum->stage().availableActions;
    table.startRound();
    while (auto seat = table.actingSeat()) {
      const Observation obs = table.observe(*seat, actions);
      auto &p = pending[static_cast<size_t>(*seat)];
      if (p) agent->learn({p->state, p->action, 0.0, obs, false});
      const Action a = agent->selectAction(obs, false);
      table.step(*seat, a, actions);
      p = PendingStep{obs, a};
    }
    for (int s = 0; s < table.seatCount() && episode < cfg.trainEpisodes; ++s) {
      auto &p = pending[static_cast<size_t>(s)];
      const double reward = table.seatReward(s);
      if (p) {
        Observation terminal = p->state;
        terminal.legal = ActionMask{};
        agent->learn({p->state, p->action, reward, terminal, true});
        p.reset();
      }
      agent->endEpisode();
      if (episode < cfg.detailEpisodes) {
        auto rec = episodeRecord("episode", episode, table, s);
        rec["stage_id"] = curriculum->stage().stageId;
        log.write(rec);
      } else {
        if (!bucket) bucket = Bucket{episode, {}, {}};
        const SeatState &st = table.seat(s);
        bucket->metrics.add(reward, st.anyBust(), st.surrendered());
        ++bucket->stageEpisodes[curriculum->stage().stageId];
        if (bucket->metrics.episodes == cfg.bucketSize) flushBucket();
      }
      ++episode;
      curriculum->recordEpisode();
    }
    for (auto &p : pending) p.reset();
    if (episode >= nextEval) {
      nextEval += cfg.evalEvery;
      evaluateWindow();
    }
    if (curriculum->feedbackDue()) giveFeedback();
  }
  flushBucket();
  timing.training = secondsSince(trainStart) - timing.evaluationWindows - timing.coach;
  if (summary.snapshots.empty() || summary.snapshots.back().episode != episode) evaluateWindow();

  const auto finalStart = SteadyClock::now();
  summary.trainingEpisodes = episode;
  summary.best = trackBest(summary.snapshots);
  summary.finalActions = curriculum->stage().availableActions;
  summary.bestActions = bestActions;
  summary.curriculumComplete = curriculum->complete();
  const uint64_t heldOut = Rng::derive(seed, kHeldOutStream);
  summary.heldOutFinal = runEvaluation(*agent, tableCfg, summary.finalActions, cfg.evalEpisodes, heldOut);
  summary.heldOutBest = runEvaluation(*bestAgent, tableCfg, bestActions, cfg.evalEpisodes, heldOut);
  summary.agreementFinal =
      strategyAgreement(extractHeatmap(*agent, summary.finalActions), chart, summary.finalActions);
  summary.agreementBest = strategyAgreement(extractHeatmap(*bestAgent, bestActions), chart, bestActions);
  if (coach) {
    summary.llmAttempts = coach->attempts();
    summary.llmFallbacks = coach->fallbacksUsed();
  }
  saveCheckpoint(*agent, runDir / "checkpoints" / "final.json");
  saveCheckpoint(*bestAgent, runDir / "checkpoints" / "best.json");
  summary.finalCheckpoint = "checkpoints/final.json";
  summary.bestCheckpoint = "checkpoints/best.json";
  timing.finalEvaluation = secondsSince(finalStart);

  log.write({{"type", "final"},
             {"training_episodes", episode},
             {"best", summary.toJson().at("best")},
             {"held_out_final", summary.heldOutFinal.toJson()},
             {"held_out_best", summary.heldOutBest.toJson()},
             {"agreement_final", summary.agreementFinal},
             {"agreement_best", summary.agreementBest},
             {"final_checkpoint", summary.finalCheckpoint},
             {"best_checkpoint", summary.bestCheckpoint}});
  writeJsonFile(runDir / "summary.json", summary.toJson());
  timing.total = secondsSince(started);
  writeJsonFile(runDir / "timing.json", timing.toJson());
  return {summary, timing};
}

} // namespace blackjack
