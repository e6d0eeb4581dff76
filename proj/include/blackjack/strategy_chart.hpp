#pragma once

#include "blackjack/action.hpp"
#include "blackjack/table.hpp"

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace blackjack {

enum class HandClass { Hard, Soft, Pair };

/** One chart position. `row` is the player total for hard and soft hands and
 * the card value (2..11, ace = 11) for pairs; `upcard` is 2..11. */
struct ChartCell {
  HandClass handClass = HandClass::Hard;
  int row = 0;
  int upcard = 0;

  auto operator<=>(const ChartCell &) const = default;
};

enum class ChartEntry { Hit, Stand, DoubleElseHit, DoubleElseStand, Split, SurrenderElseHit };

std::string_view entryCode(ChartEntry e);

class BasicStrategyChart {
public:
  /** The shipped multi-deck S17 chart. */
  static const BasicStrategyChart &standard();
  /** Throws std::invalid_argument naming the offending line. */
  static BasicStrategyChart parse(std::string_view text);
  static BasicStrategyChart load(const std::filesystem::path &path);

  /** Every cell: hard 5-21, soft 13-21, pairs 2-A, each against up-cards 2-A. */
  static const std::vector<ChartCell> &cells();

  ChartEntry entry(const ChartCell &cell) const { return entries_.at(cell); }

  /** Chart action restricted to `available`: doubles fall back to hit or
   * stand, surrender to hit, and a split to the play for the pair's total. */
  Action recommended(const ChartCell &cell, ActionSet available) const;

private:
  std::map<ChartCell, ChartEntry> entries_;
};

/** "hard 15 vs 10", "soft 18 vs A", "pair 8s vs 6". */
std::string describeCell(const ChartCell &cell);
std::string upcardLabel(int upcard);

/** First-decision observation for a cell with the stage mask applied. */
Observation synthesizeObservation(const ChartCell &cell, ActionSet available, double trueCount = 0.0);

/** Chart cell describing a decision point, if it has one. */
std::optional<ChartCell> cellOf(const Observation &obs);

} // namespace blackjack
