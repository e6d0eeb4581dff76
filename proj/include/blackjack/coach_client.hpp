#pragma once

#include "blackjack/curriculum.hpp"
#include "blackjack/prompts.hpp"
#include "blackjack/provider.hpp"

#include <fstream>
#include <functional>

namespace blackjack {

/** Append-only JSON-lines log of every coach attempt; optionally mirrored to a file. */
class Transcript {
public:
  Transcript() = default;
  explicit Transcript(const std::filesystem::path &path);

  void append(const nlohmann::json &record);
  const std::vector<nlohmann::json> &records() const { return records_; }

  /** Raw responses in order, null where the transport failed; a mock script that replays the log. */
  static nlohmann::json replayScript(const std::filesystem::path &path);

private:
  std::vector<nlohmann::json> records_;
  std::unique_ptr<std::ofstream> file_;
};

/** Removes Markdown code fences and returns the first balanced JSON object or
 * array in the text, or the trimmed text when there is none. */
std::string extractJson(std::string_view raw);

/** {"advance": bool, "next_stage": stage|null}, or a bare stage object (same id
 * as the current stage means continue). Throws SchemaError. */
AdaptationDecision parseDecision(std::string_view text, int currentStageId);

using Sleeper = std::function<void(std::chrono::milliseconds)>;
using Clock = std::function<std::string()>;

void sleepFor(std::chrono::milliseconds delay);
/** ISO-8601 UTC wall clock. */
std::string utcTimestamp();

/** Asks the provider for stages and decisions, validating each reply,
 * retrying with exponential backoff, and falling back to a stage file. */
class CoachClient {
public:
  /** `provider` may be null (fallback only). `fallback` must be non-empty with increasing ids. */
  CoachClient(LlmConfig cfg, std::unique_ptr<Provider> provider, std::vector<CurriculumStage> fallback,
              Transcript *transcript = nullptr, Sleeper sleeper = sleepFor, Clock clock = utcTimestamp);

  /** One or more stages; the fallback entry at `fallbackCursor` if every attempt fails. */
  std::vector<CurriculumStage> requestStages(const PromptBundle &prompt, size_t fallbackCursor);
  CurriculumStage requestStage(const PromptBundle &prompt, size_t fallbackCursor) {
    return requestStages(prompt, fallbackCursor).front();
  }
  /** Coach decision; `dflt` if every attempt fails. */
  AdaptationDecision requestDecision(const PromptBundle &prompt, int currentStageId, const AdaptationDecision &dflt);

  /** First fallback stage with an id above `stageId`; past the end, the last
   * fallback stage renumbered to stageId + 1. */
  CurriculumStage fallbackAfter(int stageId) const;
  size_t fallbackCursorAfter(int stageId) const;

  const std::vector<CurriculumStage> &fallback() const { return fallback_; }
  const LlmConfig &config() const { return cfg_; }
  bool offline() const { return provider_ == nullptr; }
  int attempts() const { return attempts_; }
  int fallbacksUsed() const { return fallbacks_; }

private:
  template <class T, class Parse> std::optional<T> ask(const char *kind, const PromptBundle &prompt, Parse parse);
  void record(nlohmann::json rec);

  LlmConfig cfg_;
  std::unique_ptr<Provider> provider_;
  std::vector<CurriculumStage> fallback_;
  Transcript *transcript_;
  Sleeper sleeper_;
  Clock clock_;
  int calls_ = 0;
  int attempts_ = 0;
  int fallbacks_ = 0;
};

} // namespace blackjack
