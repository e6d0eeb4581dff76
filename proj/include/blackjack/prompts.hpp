#pragma once

#include "blackjack/curriculum.hpp"
#include "blackjack/shoe.hpp"

#include <optional>
#include <string>

namespace blackjack {

enum class ExpectedSchema { Stage, Decision };

struct PromptBundle {
  std::string system;
  std::string user;
  ExpectedSchema expected = ExpectedSchema::Stage;

  bool operator==(const PromptBundle &) const = default;
};

/** "Environment: deck=8-deck, penetration=0.9" */
std::string environmentLine(const DeckConfig &deck);

/** {id:3, win_rate:0.455, bust_rate:0.31, errors:["over-hitting hard 15 vs 10"]} */
std::string formatSummary(const PerformanceSummary &summary);

/** Stage request. With a summary the "Last stage summary:" line is included. */
PromptBundle buildGenerationPrompt(const DeckConfig &deck, std::string_view complexity = kComplexityMap,
                                   const std::optional<PerformanceSummary> &summary = std::nullopt);

/** Coach decision: the stage template with the summary, then a block asking
 * whether to advance and, if so, for the next stage. */
PromptBundle buildAdaptationPrompt(const DeckConfig &deck, std::string_view complexity,
                                   const PerformanceSummary &summary, const CurriculumStage &current);

} // namespace blackjack
