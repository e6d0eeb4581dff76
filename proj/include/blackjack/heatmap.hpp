#pragma once

#include "blackjack/agent.hpp"
#include "blackjack/strategy_chart.hpp"

#include <string>
#include <vector>

namespace blackjack {

struct HeatmapCell {
  ChartCell cell;
  Action action = Action::Stand;
  /** Best minus second-best legal Q-value; 0 when only one action is legal. */
  double qGap = 0.0;
};

/** Greedy action per chart cell for one policy snapshot. */
struct PolicyHeatmap {
  ActionSet actions;
  double trueCount = 0.0;
  std::vector<HeatmapCell> cells; // BasicStrategyChart::cells() order

  Action at(const ChartCell &c) const;
};

/** Queries the agent on every chart cell without modifying it. */
PolicyHeatmap extractHeatmap(const Agent &agent, ActionSet actions, double trueCount = 0.0);
/** Same grid built directly from a chart; the reference for round-trip checks. */
PolicyHeatmap chartHeatmap(const BasicStrategyChart &chart, ActionSet actions);

/** Fraction of cells whose action equals the chart restricted to `actions`. */
double strategyAgreement(const PolicyHeatmap &hm, const BasicStrategyChart &chart, ActionSet actions);

/** hand_class,row,upcard,action,action_code,q_gap */
std::string heatmapCsv(const PolicyHeatmap &hm);
/** Standalone SVG with the hard, soft and pair grids side by side. */
std::string heatmapSvg(const PolicyHeatmap &hm, const std::string &title);

/** Agent that follows the chart; used for analysis baselines and tests. */
PolicyAgent chartAgent(const BasicStrategyChart &chart, ActionSet actions);

} // namespace blackjack
