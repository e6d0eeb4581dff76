#include "blackjack/curriculum.hpp"

#include <algorithm>

namespace blackjack {

bool shouldTriggerFeedback(const StageProgress &p) {
  if (p.episodesUsed >= p.budget) return true;
  return !p.evalHistory.empty() && p.rollingWinRate >= p.stage.successThreshold;
}

nlohmann::json PerformanceSummary::toJson() const {
  return {{"id", id}, {"win_rate", winRate}, {"bust_rate", bustRate}, {"errors", errors}};
}

std::string errorVerb(Action recommended, Action chosen) {
  if (chosen == Action::Insurance) return "wrong-insurance";
  switch (recommended) {
  case Action::Double: return "missed-double";
  case Action::Split: return "missed-split";
  case Action::Surrender: return "missed-surrender";
  case Action::Stand: return "over-hitting";
  default: break;
  }
  // Recommended hit: standing or giving up is too passive, doubling or splitting too aggressive.
  return chosen == Action::Stand || chosen == Action::Surrender ? "over-standing" : "over-hitting";
}

std::vector<std::string> detectErrors(const GreedyPolicy &policy, const BasicStrategyChart &chart,
                                      ActionSet stageActions, const CellVisits &visits, size_t limit) {
  struct Found {
    long visits;
    size_t order;
    std::string text;
  };
  std::vector<Found> found;
  const auto &cells = BasicStrategyChart::cells();
  for (size_t i = 0; i < cells.size(); ++i) {
    const ChartCell &cell = cells[i];
    const Action want = chart.recommended(cell, stageActions);
    const Action got = policy(synthesizeObservation(cell, stageActions));
    if (got == want) continue;
    auto it = visits.find(cell);
    found.push_back({it == visits.end() ? 0 : it->second, i, errorVerb(want, got) + " " + describeCell(cell)});
  }
  std::sort(found.begin(), found.end(), [](const Found &a, const Found &b) {
    return a.visits != b.visits ? a.visits > b.visits : a.order < b.order;
  });
  std::vector<std::string> out;
  for (size_t i = 0; i < found.size() && i < limit; ++i) out.push_back(found[i].text);
  return out;
}

PerformanceSummary buildSummary(const StageProgress &p, const GreedyPolicy &policy, const BasicStrategyChart &chart,
                                const CellVisits &visits) {
  if (p.evalHistory.empty()) throw std::logic_error("summary needs at least one evaluation window");
  return {p.stage.stageId, p.evalHistory.back().winRate, p.evalHistory.back().bustRate,
          detectErrors(policy, chart, p.stage.availableActions, visits)};
}

nlohmann::json StageTransition::toJson() const {
  return {{"episode", episode},
          {"old_stage", oldStage},
          {"decision", decision},
          {"new_stage", newStage},
          {"summary", summary.toJson()}};
}

Curriculum::Curriculum(CurriculumStage first, long baseBudget, int retryCap)
    : baseBudget_(baseBudget), retryCap_(retryCap) {
  if (baseBudget_ <= 0) throw std::invalid_argument("stage base budget must be positive");
  install(first);
}

Curriculum Curriculum::baseline() {
  Curriculum c(baselineStage(), kMaxStageBudget);
  c.feedbackEnabled_ = false;
  return c;
}

void Curriculum::install(const CurriculumStage &s) {
  progress_ = StageProgress{};
  progress_.stage = s;
  progress_.budget = episodeBudget(s, baseBudget_);
  installed_.push_back(s);
  retries_ = 0;
}

void Curriculum::recordEvaluation(long episode, double winRate, double bustRate) {
  progress_.evalHistory.push_back({episode, winRate, bustRate});
  progress_.rollingWinRate = winRate;
  progress_.rollingBustRate = bustRate;
}

StageTransition Curriculum::apply(const AdaptationDecision &d, long episode, const PerformanceSummary &summary,
                                  const StageSource &next) {
  StageTransition t{episode, stage().stageId, "", stage().stageId, summary};
  if (atFinalStage()) {
    complete_ = true;
    t.decision = "complete";
    return t;
  }
  if (!d.advance && retries_ < retryCap_) {
    const int used = retries_ + 1;
    const CurriculumStage same = stage();
    progress_ = StageProgress{};
    progress_.stage = same;
    progress_.budget = episodeBudget(same, baseBudget_);
    retries_ = used;
    t.decision = "continue";
    return t;
  }
  const CurriculumStage s = d.advance && d.nextStage ? *d.nextStage : next();
  if (s.stageId <= stage().stageId) throw SchemaError("stage_id", "not_increasing");
  install(s);
  t.decision = d.advance ? "advance" : "forced_advance";
  t.newStage = s.stageId;
  return t;
}

} // namespace blackjack
