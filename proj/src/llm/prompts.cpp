#include "blackjack/prompts.hpp"

#include <cstdio>

namespace blackjack {

namespace {

constexpr const char *kSystem = "You are designing a Blackjack learning curriculum.";

constexpr const char *kStageSchema = "Return ONLY JSON with fields:\n"
                                     "{\"stage_id\": int, \"name\": str, \"available_actions\": [ints],\n"
                                     " \"description\": str, \"difficulty\": int [1..5],\n"
                                     " \"success_threshold\": float in [0.35, 0.50]}";

std::string shortest(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/** Three decimals with trailing zeros trimmed down to `minDecimals`. */
std::string decimals(double v, int minDecimals) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  const size_t dot = s.find('.');
  while (s.size() > dot + 1 + static_cast<size_t>(minDecimals) && s.back() == '0') s.pop_back();
  return s;
}

std::string header(const DeckConfig &deck, std::string_view complexity) {
  return environmentLine(deck) +
         "\nActions: 0=Stand,1=Hit,2=Double,3=Split,4=Surrender,5=Insurance\n"
         "Complexity: " +
         std::string(complexity) + "\n";
}

} // namespace

std::string environmentLine(const DeckConfig &deck) {
  return "Environment: deck=" + deck.label() + ", penetration=" + shortest(deck.penetration);
}

std::string formatSummary(const PerformanceSummary &summary) {
  std::string errors;
  for (const auto &e : summary.errors) {
    if (!errors.empty()) errors += ",";
    errors += nlohmann::json(e).dump();
  }
  return "{id:" + std::to_string(summary.id) + ", win_rate:" + decimals(summary.winRate, 3) +
         ", bust_rate:" + decimals(summary.bustRate, 2) + ", errors:[" + errors + "]}";
}

PromptBundle buildGenerationPrompt(const DeckConfig &deck, std::string_view complexity,
                                   const std::optional<PerformanceSummary> &summary) {
  std::string user = header(deck, complexity);
  if (summary) user += "Last stage summary: " + formatSummary(*summary) + "\n";
  user += "\n";
  user += kStageSchema;
  return {kSystem, user, ExpectedSchema::Stage};
}

PromptBundle buildAdaptationPrompt(const DeckConfig &deck, std::string_view complexity,
                                   const PerformanceSummary &summary, const CurriculumStage &current) {
  std::string user = header(deck, complexity);
  user += "Last stage summary: " + formatSummary(summary) + "\n";
  user += "Current stage: " + current.toJson().dump() + "\n\n";
  user += "Act as the coach: decide whether the agent is ready to advance or should keep training on the "
          "current stage.\n"
          "Return ONLY JSON with fields:\n"
          "{\"advance\": bool, \"next_stage\": stage object or null}\n"
          "where a stage object has fields:\n"
          "{\"stage_id\": int, \"name\": str, \"available_actions\": [ints],\n"
          " \"description\": str, \"difficulty\": int [1..5],\n"
          " \"success_threshold\": float in [0.35, 0.50]}";
  return {kSystem, user, ExpectedSchema::Decision};
}

} // namespace blackjack
