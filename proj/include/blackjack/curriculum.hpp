#pragma once

#include "blackjack/stage.hpp"
#include "blackjack/strategy_chart.hpp"

#include <functional>
#include <map>
#include <optional>

namespace blackjack {

struct EvalPoint {
  long episode = 0;
  double winRate = 0.0;
  double bustRate = 0.0;

  bool operator==(const EvalPoint &) const = default;
};

struct StageProgress {
  CurriculumStage stage;
  long episodesUsed = 0;
  long budget = 0;
  double rollingWinRate = 0.0;
  double rollingBustRate = 0.0;
  std::vector<EvalPoint> evalHistory;
};

/** True once the latest evaluation meets the threshold or the budget is spent. */
bool shouldTriggerFeedback(const StageProgress &p);

struct PerformanceSummary {
  int id = 0;
  double winRate = 0.0;
  double bustRate = 0.0;
  std::vector<std::string> errors;

  nlohmann::json toJson() const;
  bool operator==(const PerformanceSummary &) const = default;
};

using GreedyPolicy = std::function<Action(const Observation &)>;
/** How often each chart cell was a decision point during an evaluation window. */
using CellVisits = std::map<ChartCell, long>;

/** Error label for taking `chosen` where the restricted chart says `recommended`. */
std::string errorVerb(Action recommended, Action chosen);

/** Cells where the policy's greedy action differs from the chart restricted to
 * `stageActions`, as "<verb> <hand> vs <upcard>", most visited first. */
std::vector<std::string> detectErrors(const GreedyPolicy &policy, const BasicStrategyChart &chart,
                                      ActionSet stageActions, const CellVisits &visits, size_t limit = 5);

/** Metrics from the latest evaluation window plus mined errors. Requires one window. */
PerformanceSummary buildSummary(const StageProgress &p, const GreedyPolicy &policy, const BasicStrategyChart &chart,
                                const CellVisits &visits);

struct AdaptationDecision {
  bool advance = true;
  std::optional<CurriculumStage> nextStage;

  bool operator==(const AdaptationDecision &) const = default;
};

struct StageTransition {
  long episode = 0;
  int oldStage = 0;
  std::string decision; // advance, forced_advance, continue, complete
  int newStage = 0;
  PerformanceSummary summary;

  nlohmann::json toJson() const;
};

/** Active stage, its progress, and monotone advancement. */
class Curriculum {
public:
  using StageSource = std::function<CurriculumStage()>;

  explicit Curriculum(CurriculumStage first, long baseBudget = kDefaultStageBaseBudget, int retryCap = 2);
  /** One permanent all-action stage that never asks for feedback. */
  static Curriculum baseline();

  const CurriculumStage &stage() const { return progress_.stage; }
  const StageProgress &progress() const { return progress_; }
  const std::vector<CurriculumStage> &installed() const { return installed_; }
  bool complete() const { return complete_; }
  bool feedbackEnabled() const { return feedbackEnabled_; }
  /** The stage with every action is the last one; there is nothing left to add. */
  bool atFinalStage() const { return stage().availableActions == ActionSet::all(); }
  int retries() const { return retries_; }
  long baseBudget() const { return baseBudget_; }

  void recordEpisode() { ++progress_.episodesUsed; }
  void recordEvaluation(long episode, double winRate, double bustRate);
  bool feedbackDue() const { return feedbackEnabled_ && !complete_ && shouldTriggerFeedback(progress_); }

  /** Applies the coach's decision. A refused advance beyond the retry cap is
   * forced; `next` supplies a stage when the decision carries none. Throws
   * SchemaError if the new stage id does not increase. */
  StageTransition apply(const AdaptationDecision &d, long episode, const PerformanceSummary &summary,
                        const StageSource &next);

private:
  void install(const CurriculumStage &s);

  StageProgress progress_;
  std::vector<CurriculumStage> installed_;
  long baseBudget_;
  int retryCap_;
  int retries_ = 0;
  bool complete_ = false;
  bool feedbackEnabled_ = true;
};

} // namespace blackjack
