#pragma once

#include "blackjack/action.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace blackjack {

inline constexpr double kMinSuccessThreshold = 0.35;
inline constexpr double kMaxSuccessThreshold = 0.50;
inline constexpr long kMaxStageBudget = 100'000;
inline constexpr long kDefaultStageBaseBudget = 20'000;

/** Complexity levels exactly as shown to the coach. */
inline constexpr std::string_view kComplexityMap = "{1:[0,1], 2:[2,3], 3:[4,5]}";

/** One curriculum step: the actions the agent may use and the win rate that gates advancing. */
struct CurriculumStage {
  int stageId = 1;
  std::string name;
  ActionSet availableActions;
  std::string description;
  int difficulty = 1;
  double successThreshold = 0.4;

  nlohmann::json toJson() const;
  bool operator==(const CurriculumStage &) const = default;
};

/** Rejected stage text. `field` names the offending key ("$" for the document itself). */
class SchemaError : public std::runtime_error {
public:
  SchemaError(std::string field, std::string reason);

  const std::string &field() const { return field_; }
  const std::string &reason() const { return reason_; }

private:
  std::string field_;
  std::string reason_;
};

/** Checks one parsed stage object. Unknown keys are ignored. */
CurriculumStage stageFromJson(const nlohmann::json &j);

/** Parses text that must be exactly one stage object, optionally surrounded by whitespace. */
CurriculumStage validateStage(std::string_view raw);

/** A stage array, or a single stage object; ids must strictly increase. */
std::vector<CurriculumStage> parseCurriculum(std::string_view raw);
std::vector<CurriculumStage> loadCurriculumFile(const std::filesystem::path &path);
nlohmann::json curriculumToJson(const std::vector<CurriculumStage> &stages);

/** Baseline condition: every action available for the whole run. */
CurriculumStage baselineStage();

/** min(base * difficulty, 100000). */
long episodeBudget(const CurriculumStage &stage, long base = kDefaultStageBaseBudget);

} // namespace blackjack
