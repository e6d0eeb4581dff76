#include "blackjack/coach_client.hpp"

#include <ctime>
#include <sstream>
#include <thread>

namespace blackjack {

Transcript::Transcript(const std::filesystem::path &path)
    : file_(std::make_unique<std::ofstream>(path, std::ios::app)) {
  if (!*file_) throw std::runtime_error("cannot open transcript " + path.string());
}

void Transcript::append(const nlohmann::json &record) {
  records_.push_back(record);
  if (file_) *file_ << record.dump() << '\n' << std::flush;
}

nlohmann::json Transcript::replayScript(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read transcript " + path.string());
  nlohmann::json script = nlohmann::json::array();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto rec = nlohmann::json::parse(line);
    if (rec.value("attempt", 0) == 0) continue; // offline fallback entries made no request
    script.push_back(rec.at("raw_response"));
  }
  return script;
}

std::string extractJson(std::string_view raw) {
  std::string text(raw);
  // Drop fence lines such as ```json and ```.
  std::string unfenced;
  std::istringstream lines(text);
  std::string line;
  bool fenced = false;
  while (std::getline(lines, line)) {
    const size_t first = line.find_first_not_of(" \t\r");
    if (first != std::string::npos && line.compare(first, 3, "```") == 0) {
      fenced = true;
      continue;
    }
    unfenced += line;
    unfenced += '\n';
  }
  if (fenced) text = unfenced;

  const size_t start = text.find_first_of("{[");
  if (start != std::string::npos) {
    int depth = 0;
    bool inString = false;
    bool escaped = false;
    for (size_t i = start; i < text.size(); ++i) {
      const char c = text[i];
      if (inString) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          inString = false;
        }
        continue;
      }
      if (c == '"') {
        inString = true;
      } else if (c == '{' || c == '[') {
        ++depth;
      } else if (c == '}' || c == ']') {
        if (--depth == 0) return text.substr(start, i - start + 1);
      }
    }
  }
  const size_t b = text.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const size_t e = text.find_last_not_of(" \t\r\n");
  return text.substr(b, e - b + 1);
}

AdaptationDecision parseDecision(std::string_view text, int currentStageId) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &) {
    throw SchemaError("$", "not_json");
  }
  if (!j.is_object()) throw SchemaError("$", "not_object");
  AdaptationDecision d;
  if (!j.contains("advance")) {
    const CurriculumStage s = stageFromJson(j);
    if (s.stageId < currentStageId) throw SchemaError("stage_id", "not_increasing");
    d.advance = s.stageId > currentStageId;
    if (d.advance) d.nextStage = s;
    return d;
  }
  if (!j["advance"].is_boolean()) throw SchemaError("advance", "wrong_type");
  d.advance = j["advance"].get<bool>();
  if (auto it = j.find("next_stage"); it != j.end() && !it->is_null()) {
    try {
      d.nextStage = stageFromJson(*it);
    } catch (const SchemaError &e) {
      throw SchemaError("next_stage." + e.field(), e.reason());
    }
    if (d.nextStage->stageId <= currentStageId) throw SchemaError("next_stage.stage_id", "not_increasing");
  }
  if (!d.advance) d.nextStage.reset();
  return d;
}

void sleepFor(std::chrono::milliseconds delay) { std::this_thread::sleep_for(delay); }

std::string utcTimestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

CoachClient::CoachClient(LlmConfig cfg, std::unique_ptr<Provider> provider, std::vector<CurriculumStage> fallback,
                         Transcript *transcript, Sleeper sleeper, Clock clock)
    : cfg_(std::move(cfg)), provider_(std::move(provider)), fallback_(std::move(fallback)), transcript_(transcript),
      sleeper_(std::move(sleeper)), clock_(std::move(clock)) {
  if (fallback_.empty()) throw ConfigError("fallback curriculum is empty");
  for (size_t i = 1; i < fallback_.size(); ++i) {
    if (fallback_[i].stageId <= fallback_[i - 1].stageId) throw ConfigError("fallback stage ids must increase");
  }
  if (cfg_.maxRetries < 0) throw ConfigError("max_retries must be non-negative");
}

void CoachClient::record(nlohmann::json rec) {
  if (transcript_) transcript_->append(rec);
}

template <class T, class Parse>
std::optional<T> CoachClient::ask(const char *kind, const PromptBundle &prompt, Parse parse) {
  ++calls_;
  const ChatRequest req{cfg_.modelName, prompt.system, prompt.user, cfg_.temperature, cfg_.topP};
  if (!provider_) {
    record({{"timestamp", clock_()},
            {"call", calls_},
            {"kind", kind},
            {"attempt", 0},
            {"request", req.toJson()},
            {"raw_response", nullptr},
            {"outcome", "offline"},
            {"resolved", "fallback"}});
    return std::nullopt;
  }
  const int total = cfg_.maxRetries + 1;
  for (int attempt = 1; attempt <= total; ++attempt) {
    ++attempts_;
    nlohmann::json rec = {{"timestamp", clock_()}, {"call", calls_},         {"kind", kind},
                          {"attempt", attempt},    {"request", req.toJson()}, {"raw_response", nullptr}};
    std::optional<T> value;
    try {
      const std::string raw = provider_->complete(req);
      rec["raw_response"] = raw;
      value = parse(extractJson(raw));
      rec["outcome"] = "ok";
    } catch (const SchemaError &e) {
      rec["outcome"] = std::string("schema_error: ") + e.what();
    } catch (const TransportError &e) {
      rec["outcome"] = std::string("transport_error: ") + e.what();
    } catch (const ScriptExhausted &) {
      rec["outcome"] = "script_exhausted";
    }
    if (value) {
      rec["resolved"] = "parsed";
      record(rec);
      return value;
    }
    if (attempt < total) {
      const std::chrono::milliseconds delay(1000LL << (attempt - 1));
      rec["backoff_ms"] = delay.count();
      record(rec);
      sleeper_(delay);
    } else {
      rec["resolved"] = "fallback";
      record(rec);
    }
  }
  return std::nullopt;
}

std::vector<CurriculumStage> CoachClient::requestStages(const PromptBundle &prompt, size_t fallbackCursor) {
  auto parsed = ask<std::vector<CurriculumStage>>("stage", prompt,
                                                  [](const std::string &text) { return parseCurriculum(text); });
  if (parsed) return *parsed;
  ++fallbacks_;
  return {fallback_.at(std::min(fallbackCursor, fallback_.size() - 1))};
}

AdaptationDecision CoachClient::requestDecision(const PromptBundle &prompt, int currentStageId,
                                                const AdaptationDecision &dflt) {
  auto parsed = ask<AdaptationDecision>(
      "decision", prompt, [currentStageId](const std::string &text) { return parseDecision(text, currentStageId); });
  if (parsed) return *parsed;
  ++fallbacks_;
  return dflt;
}

size_t CoachClient::fallbackCursorAfter(int stageId) const {
  for (size_t i = 0; i < fallback_.size(); ++i) {
    if (fallback_[i].stageId > stageId) return i;
  }
  return fallback_.size();
}

CurriculumStage CoachClient::fallbackAfter(int stageId) const {
  const size_t i = fallbackCursorAfter(stageId);
  if (i < fallback_.size()) return fallback_[i];
  CurriculumStage last = fallback_.back();
  last.stageId = stageId + 1;
  return last;
}

} // namespace blackjack
