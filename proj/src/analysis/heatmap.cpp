#include "blackjack/heatmap.hpp"
#include "blackjack/svg.hpp"

#include <cstdio>
#include <limits>

namespace blackjack {

namespace {

const char *actionColor(Action a) {
  switch (a) {
  case Action::Stand: return "#d9534f";
  case Action::Hit: return "#5cb85c";
  case Action::Double: return "#337ab7";
  case Action::Split: return "#f0ad4e";
  case Action::Surrender: return "#777777";
  case Action::Insurance: return "#9b59b6";
  }
  return "#ffffff";
}

std::string_view className(HandClass c) {
  switch (c) {
  case HandClass::Hard: return "hard";
  case HandClass::Soft: return "soft";
  case HandClass::Pair: return "pair";
  }
  return "?";
}

} // namespace

Action PolicyHeatmap::at(const ChartCell &c) const {
  for (const auto &hc : cells) {
    if (hc.cell == c) return hc.action;
  }
  throw std::out_of_range("cell not in heatmap");
}

PolicyHeatmap extractHeatmap(const Agent &agent, ActionSet actions, double trueCount) {
  PolicyHeatmap hm{actions, trueCount, {}};
  for (const ChartCell &c : BasicStrategyChart::cells()) {
    const Observation obs = synthesizeObservation(c, actions, trueCount);
    const QValues q = agent.qValues(obs);
    const Action best = maskedArgmax(q, obs.legal);
    double second = std::numeric_limits<double>::lowest();
    for (int a = 0; a < kNumActions; ++a) {
      if (obs.legal[a] && a != code(best)) second = std::max(second, q[a]);
    }
    const double gap = second == std::numeric_limits<double>::lowest() ? 0.0 : q[code(best)] - second;
    hm.cells.push_back({c, best, gap});
  }
  return hm;
}

PolicyHeatmap chartHeatmap(const BasicStrategyChart &chart, ActionSet actions) {
  PolicyHeatmap hm{actions, 0.0, {}};
  for (const ChartCell &c : BasicStrategyChart::cells()) hm.cells.push_back({c, chart.recommended(c, actions), 0.0});
  return hm;
}

double strategyAgreement(const PolicyHeatmap &hm, const BasicStrategyChart &chart, ActionSet actions) {
  if (hm.cells.empty()) return 0.0;
  long agree = 0;
  for (const auto &hc : hm.cells) {
    if (hc.action == chart.recommended(hc.cell, actions)) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(hm.cells.size());
}

std::string heatmapCsv(const PolicyHeatmap &hm) {
  std::string out = "hand_class,row,upcard,action,action_code,q_gap\n";
  char gap[32];
  for (const auto &hc : hm.cells) {
    std::snprintf(gap, sizeof gap, "%.6f", hc.qGap);
    out += std::string(className(hc.cell.handClass)) + "," +
           (hc.cell.handClass == HandClass::Pair ? upcardLabel(hc.cell.row) : std::to_string(hc.cell.row)) + "," +
           upcardLabel(hc.cell.upcard) + "," + std::string(actionName(hc.action)) + "," +
           std::to_string(code(hc.action)) + "," + gap + "\n";
  }
  return out;
}

std::string heatmapSvg(const PolicyHeatmap &hm, const std::string &title) {
  const double cell = 26, gap = 60, top = 70, left = 40;
  const double gridW = cell * 10;
  svg::Document doc(left + 3 * gridW + 2 * gap + 40, top + cell * 18 + 80);
  doc.text(left, 28, title, 16);
  struct Panel {
    HandClass cls;
    int first;
    int last;
    const char *label;
  };
  const Panel panels[] = {{HandClass::Hard, 5, 21, "Hard totals"},
                          {HandClass::Soft, 13, 21, "Soft totals"},
                          {HandClass::Pair, 2, 11, "Pairs"}};
  for (int p = 0; p < 3; ++p) {
    const Panel &panel = panels[p];
    const double x0 = left + p * (gridW + gap);
    doc.text(x0 + gridW / 2, top - 26, panel.label, 13, "middle");
    for (int u = 2; u <= 11; ++u) doc.text(x0 + (u - 2) * cell + cell / 2, top - 8, upcardLabel(u), 10, "middle");
    for (int r = panel.first; r <= panel.last; ++r) {
      const double y = top + (r - panel.first) * cell;
      const std::string rowLabel = panel.cls == HandClass::Pair ? upcardLabel(r) + "," + upcardLabel(r)
                                                                : std::to_string(r);
      doc.text(x0 - 4, y + cell * 0.65, rowLabel, 10, "end");
      for (int u = 2; u <= 11; ++u) {
        const Action a = hm.at({panel.cls, r, u});
        const double x = x0 + (u - 2) * cell;
        doc.rect(x, y, cell, cell, actionColor(a), "#ffffff");
        doc.text(x + cell / 2, y + cell * 0.65, std::string(1, actionLetter(a)), 11, "middle", "#ffffff");
      }
    }
  }
  double lx = left;
  const double ly = top + cell * 17 + 40;
  for (int a = 0; a < kNumActions; ++a) {
    const Action act = static_cast<Action>(a);
    doc.rect(lx, ly, 14, 14, actionColor(act));
    doc.text(lx + 18, ly + 11, std::string(actionName(act)), 11);
    lx += 110;
  }
  return doc.str();
}

PolicyAgent chartAgent(const BasicStrategyChart &chart, ActionSet actions) {
  return PolicyAgent("basic-strategy", [&chart, actions](const Observation &obs) {
    const auto cell = cellOf(obs);
    if (!cell) return obs.playerTotal >= 17 ? Action::Stand : Action::Hit;
    const Action a = chart.recommended(*cell, actions);
    if (obs.legal[code(a)]) return a;
    // Later in a hand doubling or surrender is gone: fall back to the hit/stand play.
    return chart.recommended(*cell, ActionSet{Action::Stand, Action::Hit});
  });
}

} // namespace blackjack
