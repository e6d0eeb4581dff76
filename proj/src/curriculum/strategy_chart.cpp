#include "blackjack/strategy_chart.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace blackjack {

namespace {

constexpr std::string_view kStandardChart =
#include "basic_strategy_s17.inc"
    ;

ChartEntry parseEntry(std::string_view code, int line) {
  if (code == "H") return ChartEntry::Hit;
  if (code == "S") return ChartEntry::Stand;
  if (code == "D") return ChartEntry::DoubleElseHit;
  if (code == "Ds") return ChartEntry::DoubleElseStand;
  if (code == "P") return ChartEntry::Split;
  if (code == "R") return ChartEntry::SurrenderElseHit;
  throw std::invalid_argument("chart line " + std::to_string(line) + ": unknown entry '" + std::string(code) + "'");
}

int parseRow(const std::string &label, int line) {
  if (label == "A") return 11;
  try {
    size_t used = 0;
    const int v = std::stoi(label, &used);
    if (used == label.size()) return v;
  } catch (const std::logic_error &) {
  }
  throw std::invalid_argument("chart line " + std::to_string(line) + ": bad row label '" + label + "'");
}

} // namespace

std::string_view entryCode(ChartEntry e) {
  switch (e) {
  case ChartEntry::Hit: return "H";
  case ChartEntry::Stand: return "S";
  case ChartEntry::DoubleElseHit: return "D";
  case ChartEntry::DoubleElseStand: return "Ds";
  case ChartEntry::Split: return "P";
  case ChartEntry::SurrenderElseHit: return "R";
  }
  return "?";
}

const std::vector<ChartCell> &BasicStrategyChart::cells() {
  static const std::vector<ChartCell> all = [] {
    std::vector<ChartCell> out;
    for (int t = 5; t <= 21; ++t)
      for (int u = 2; u <= 11; ++u) out.push_back({HandClass::Hard, t, u});
    for (int t = 13; t <= 21; ++t)
      for (int u = 2; u <= 11; ++u) out.push_back({HandClass::Soft, t, u});
    for (int v = 2; v <= 11; ++v)
      for (int u = 2; u <= 11; ++u) out.push_back({HandClass::Pair, v, u});
    return out;
  }();
  return all;
}

BasicStrategyChart BasicStrategyChart::parse(std::string_view text) {
  BasicStrategyChart chart;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::optional<HandClass> section;
  int lineNo = 0;
  while (std::getline(in, raw)) {
    ++lineNo;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream line(raw);
    std::string first;
    if (!(line >> first)) continue;
    if (first == "[hard]") {
      section = HandClass::Hard;
      continue;
    }
    if (first == "[soft]") {
      section = HandClass::Soft;
      continue;
    }
    if (first == "[pairs]") {
      section = HandClass::Pair;
      continue;
    }
    if (!section) throw std::invalid_argument("chart line " + std::to_string(lineNo) + ": row before any section");
    const int row = parseRow(first, lineNo);
    std::string code;
    int upcard = 2;
    while (line >> code) {
      if (upcard > 11) throw std::invalid_argument("chart line " + std::to_string(lineNo) + ": too many columns");
      const ChartCell cell{*section, row, upcard++};
      if (!chart.entries_.emplace(cell, parseEntry(code, lineNo)).second)
        throw std::invalid_argument("chart line " + std::to_string(lineNo) + ": duplicate row");
    }
    if (upcard != 12) throw std::invalid_argument("chart line " + std::to_string(lineNo) + ": expected 10 columns");
  }
  for (const ChartCell &c : cells()) {
    if (!chart.entries_.contains(c)) throw std::invalid_argument("chart is missing " + describeCell(c));
  }
  if (chart.entries_.size() != cells().size()) throw std::invalid_argument("chart has rows outside the standard grid");
  return chart;
}

BasicStrategyChart BasicStrategyChart::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read chart " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const BasicStrategyChart &BasicStrategyChart::standard() {
  static const BasicStrategyChart chart = parse(kStandardChart);
  return chart;
}

Action BasicStrategyChart::recommended(const ChartCell &cell, ActionSet available) const {
  switch (entry(cell)) {
  case ChartEntry::Hit: return Action::Hit;
  case ChartEntry::Stand: return Action::Stand;
  case ChartEntry::DoubleElseHit: return available.contains(Action::Double) ? Action::Double : Action::Hit;
  case ChartEntry::DoubleElseStand: return available.contains(Action::Double) ? Action::Double : Action::Stand;
  case ChartEntry::SurrenderElseHit: return available.contains(Action::Surrender) ? Action::Surrender : Action::Hit;
  case ChartEntry::Split:
    if (available.contains(Action::Split)) return Action::Split;
    if (cell.row == 11) return Action::Hit; // unsplit aces are a soft 12
    return recommended({HandClass::Hard, std::max(5, 2 * cell.row), cell.upcard}, available);
  }
  return Action::Stand;
}

std::string upcardLabel(int upcard) { return upcard == 11 ? "A" : std::to_string(upcard); }

std::string describeCell(const ChartCell &cell) {
  std::string out;
  switch (cell.handClass) {
  case HandClass::Hard: out = "hard " + std::to_string(cell.row); break;
  case HandClass::Soft: out = "soft " + std::to_string(cell.row); break;
  case HandClass::Pair: out = "pair " + upcardLabel(cell.row) + "s"; break;
  }
  return out + " vs " + upcardLabel(cell.upcard);
}

Observation synthesizeObservation(const ChartCell &cell, ActionSet available, double trueCount) {
  Observation o;
  o.dealerUpcard = cell.upcard;
  o.trueCount = trueCount;
  o.canDouble = true;
  switch (cell.handClass) {
  case HandClass::Hard:
    o.playerTotal = cell.row;
    break;
  case HandClass::Soft:
    o.playerTotal = cell.row;
    o.soft = true;
    break;
  case HandClass::Pair:
    o.canSplit = true;
    o.soft = cell.row == 11;
    o.playerTotal = cell.row == 11 ? 12 : 2 * cell.row;
    break;
  }
  ActionSet legal{Action::Stand, Action::Hit, Action::Double, Action::Surrender};
  if (o.canSplit) legal.insert(Action::Split);
  if (cell.upcard == 11) legal.insert(Action::Insurance);
  o.legal = ActionSet::fromBits(legal.bits() & available.bits()).mask();
  o.features = makeFeatures(o.playerTotal, o.dealerUpcard, o.soft, o.canSplit, o.canDouble, o.trueCount);
  return o;
}

std::optional<ChartCell> cellOf(const Observation &obs) {
  if (obs.canSplit) {
    const int value = obs.soft && obs.playerTotal == 12 ? 11 : obs.playerTotal / 2;
    return ChartCell{HandClass::Pair, value, obs.dealerUpcard};
  }
  if (obs.soft && obs.playerTotal >= 13 && obs.playerTotal <= 21)
    return ChartCell{HandClass::Soft, obs.playerTotal, obs.dealerUpcard};
  if (!obs.soft && obs.playerTotal >= 5 && obs.playerTotal <= 21)
    return ChartCell{HandClass::Hard, obs.playerTotal, obs.dealerUpcard};
  return std::nullopt;
}

} // namespace blackjack
