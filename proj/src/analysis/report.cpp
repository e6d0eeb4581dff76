#include "blackjack/report.hpp"
#include "blackjack/heatmap.hpp"
#include "blackjack/svg.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace blackjack {

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string csvField(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string runLabel(const LoadedRun &r) { return conditionName(r.summary) + "-seed-" + std::to_string(r.summary.seed); }

double mean(const std::vector<double> &v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

class ReportWriter {
public:
  explicit ReportWriter(std::filesystem::path root) : root_(std::move(root)) {}

  void write(const std::string &relative, const std::string &content) {
    const auto path = root_ / relative;
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    written_.push_back(relative);
  }
  std::vector<std::string> written() const { return written_; }

private:
  std::filesystem::path root_;
  std::vector<std::string> written_;
};

} // namespace

std::string table1Csv(const std::vector<LoadedRun> &runs) {
  std::map<int, CurriculumStage> stages;
  std::set<std::string> kinds;
  std::map<std::pair<int, std::string>, std::vector<double>> best;
  std::map<std::string, std::vector<double>> baseline;
  for (const auto &r : runs) {
    const std::string kind(agentKindName(r.summary.agent));
    kinds.insert(kind);
    if (r.summary.mode == RunMode::Baseline) {
      baseline[kind].push_back(r.summary.best.bestWinRate);
      continue;
    }
    for (const auto &s : r.summary.stages) stages.try_emplace(s.stageId, s);
    for (const auto &[id, w] : r.summary.bestByStage) best[{id, kind}].push_back(w);
  }
  std::string out = "stage,name,actions";
  for (const auto &k : kinds) out += "," + k + "_best_win_rate," + k + "_runs";
  out += "\n";
  auto cells = [&](auto lookup) {
    std::string row;
    for (const auto &k : kinds) {
      const std::vector<double> *v = lookup(k);
      if (v && !v->empty()) {
        row += "," + fixed(mean(*v)) + "," + std::to_string(v->size());
      } else {
        row += ",,0";
      }
    }
    return row;
  };
  for (const auto &[id, s] : stages) {
    out += std::to_string(id) + "," + csvField(s.name) + "," + csvField(s.availableActions.toString());
    out += cells([&](const std::string &k) -> const std::vector<double> * {
      auto it = best.find({id, k});
      return it == best.end() ? nullptr : &it->second;
    });
    out += "\n";
  }
  if (!baseline.empty()) {
    out += "baseline," + csvField(baselineStage().name) + "," + csvField(ActionSet::all().toString());
    out += cells([&](const std::string &k) -> const std::vector<double> * {
      auto it = baseline.find(k);
      return it == baseline.end() ? nullptr : &it->second;
    });
    out += "\n";
  }
  return out;
}

std::string progressionCsv(const RunSummary &run) {
  std::string out = "episode,stage_id,win_rate,bust_rate,push_rate,avg_reward\n";
  for (const auto &s : run.snapshots) {
    out += std::to_string(s.episode) + "," + std::to_string(s.stageId) + "," + fixed(s.metrics.winRate()) + "," +
           fixed(s.metrics.bustRate()) + "," + fixed(s.metrics.pushRate()) + "," + fixed(s.metrics.avgReward()) +
           "\n";
  }
  return out;
}

std::vector<std::string> writeReport(const std::filesystem::path &logDir, const std::filesystem::path &outDir) {
  const auto runs = loadRuns(logDir);
  if (runs.empty()) throw NoRunsFound(logDir);
  ReportWriter w(outDir);

  w.write("table1.csv", table1Csv(runs));

  std::vector<RunSummary> summaries;
  std::vector<std::optional<RunTiming>> timings;
  for (const auto &r : runs) {
    summaries.push_back(r.summary);
    timings.push_back(r.timing);
  }
  w.write("aggregate.json", aggregateJson(aggregateSeeds(summaries, timings)).dump(2) + "\n");

  std::map<std::string, std::vector<svg::Series>> byCondition;
  for (const auto &r : runs) {
    const std::string label = runLabel(r);
    w.write("progression/" + label + ".csv", progressionCsv(r.summary));
    svg::Series win{"seed " + std::to_string(r.summary.seed), {}};
    for (const auto &s : r.summary.snapshots)
      win.points.emplace_back(static_cast<double>(s.episode), s.metrics.winRate());
    w.write("progression/" + label + ".svg",
            svg::lineChart(label + " win rate", "training episode", "win rate", {win}));
    byCondition[conditionName(r.summary)].push_back(win);

    const auto ckpt = r.dir / r.summary.finalCheckpoint;
    if (!r.summary.finalCheckpoint.empty() && std::filesystem::exists(ckpt)) {
      const auto agent = loadCheckpoint(ckpt);
      const PolicyHeatmap hm = extractHeatmap(*agent, r.summary.finalActions);
      w.write("heatmaps/" + label + "-final.csv", heatmapCsv(hm));
      w.write("heatmaps/" + label + "-final.svg", heatmapSvg(hm, label + " final policy"));
    }
  }
  for (const auto &[condition, series] : byCondition) {
    w.write("progression/" + condition + ".svg",
            svg::lineChart(condition + " win rate by seed", "training episode", "win rate", series));
  }
  return w.written();
}

} // namespace blackjack
