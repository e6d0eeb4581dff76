#include "blackjack/stage.hpp"

#include <fstream>
#include <sstream>

namespace blackjack {

SchemaError::SchemaError(std::string field, std::string reason)
    : std::runtime_error(field + ": " + reason), field_(std::move(field)), reason_(std::move(reason)) {}

nlohmann::json CurriculumStage::toJson() const {
  return {{"stage_id", stageId},
          {"name", name},
          {"available_actions", availableActions.codes()},
          {"description", description},
          {"difficulty", difficulty},
          {"success_threshold", successThreshold}};
}

namespace {

const nlohmann::json &require(const nlohmann::json &j, const char *key) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(key, "missing");
  return *it;
}

int requireInt(const nlohmann::json &j, const char *key) {
  const auto &v = require(j, key);
  if (!v.is_number_integer()) throw SchemaError(key, "wrong_type");
  return v.get<int>();
}

std::string requireString(const nlohmann::json &j, const char *key) {
  const auto &v = require(j, key);
  if (!v.is_string()) throw SchemaError(key, "wrong_type");
  return v.get<std::string>();
}

nlohmann::json parseDocument(std::string_view raw) {
  try {
    return nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error &) {
    throw SchemaError("$", "not_json");
  }
}

} // namespace

CurriculumStage stageFromJson(const nlohmann::json &j) {
  if (!j.is_object()) throw SchemaError("$", "not_object");
  CurriculumStage s;
  s.stageId = requireInt(j, "stage_id");
  if (s.stageId < 1) throw SchemaError("stage_id", "out_of_range");

  s.name = requireString(j, "name");
  if (s.name.empty()) throw SchemaError("name", "empty");

  const auto &actions = require(j, "available_actions");
  if (!actions.is_array()) throw SchemaError("available_actions", "wrong_type");
  for (const auto &a : actions) {
    if (!a.is_number_integer()) throw SchemaError("available_actions", "wrong_type");
    const int c = a.get<int>();
    if (c < 0 || c >= kNumActions) throw SchemaError("available_actions", "unknown_action");
    if (s.availableActions.contains(static_cast<Action>(c))) throw SchemaError("available_actions", "duplicate_action");
    s.availableActions.insert(static_cast<Action>(c));
  }
  if (!s.availableActions.contains(Action::Stand) || !s.availableActions.contains(Action::Hit))
    throw SchemaError("available_actions", "missing_stand_or_hit");

  s.description = requireString(j, "description");

  s.difficulty = requireInt(j, "difficulty");
  if (s.difficulty < 1 || s.difficulty > 5) throw SchemaError("difficulty", "out_of_range");

  const auto &t = require(j, "success_threshold");
  if (!t.is_number()) throw SchemaError("success_threshold", "wrong_type");
  s.successThreshold = t.get<double>();
  if (!(s.successThreshold >= kMinSuccessThreshold && s.successThreshold <= kMaxSuccessThreshold))
    throw SchemaError("success_threshold", "out_of_range");
  return s;
}

CurriculumStage validateStage(std::string_view raw) {
  const nlohmann::json j = parseDocument(raw);
  return stageFromJson(j);
}

std::vector<CurriculumStage> parseCurriculum(std::string_view raw) {
  const nlohmann::json j = parseDocument(raw);
  std::vector<CurriculumStage> stages;
  if (j.is_object()) {
    stages.push_back(stageFromJson(j));
  } else if (j.is_array()) {
    if (j.empty()) throw SchemaError("$", "empty_curriculum");
    for (const auto &item : j) {
      stages.push_back(stageFromJson(item));
      if (stages.size() > 1 && stages.back().stageId <= stages[stages.size() - 2].stageId)
        throw SchemaError("stage_id", "not_increasing");
    }
  } else {
    throw SchemaError("$", "not_object");
  }
  return stages;
}

std::vector<CurriculumStage> loadCurriculumFile(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read curriculum file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parseCurriculum(buf.str());
}

nlohmann::json curriculumToJson(const std::vector<CurriculumStage> &stages) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto &s : stages) out.push_back(s.toJson());
  return out;
}

CurriculumStage baselineStage() {
  return {1, "All Actions (no curriculum)", ActionSet::all(), "Every action is available from the first episode.", 5,
          kMaxSuccessThreshold};
}

long episodeBudget(const CurriculumStage &stage, long base) {
  if (base <= 0) throw std::invalid_argument("stage base budget must be positive");
  return std::min(base * stage.difficulty, kMaxStageBudget);
}

} // namespace blackjack
