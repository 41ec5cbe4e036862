// Copyright 2026 The castbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "castbench/commands.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "castbench/assets.hpp"
#include "castbench/error.hpp"
#include "castbench/persistence.hpp"
#include "castbench/text.hpp"

namespace castbench {
namespace {

// Judge that only answers from the cache; used when rescoring without providers.
class CachedOnlyJudge final : public Judge {
 public:
  explicit CachedOnlyJudge(std::string id) : id_(std::move(id)) {}
  std::string id() const override { return id_; }
  double score(const BulletItem&, const BulletItem&) const override {
    throw Error(ErrorCode::kJudgeUnavailable, fmt::format("judge '{}' has no cached score and no provider", id_));
  }

 private:
  std::string id_;
};

std::shared_ptr<const MockFixtures> fixtures_for(const ExperimentConfig& cfg) {
  if (!cfg.mock || (!cfg.mock->answer_bank && !cfg.mock->synonyms)) return MockFixtures::builtin();
  const auto builtin = MockFixtures::builtin();
  auto load = [](const std::filesystem::path& p) {
    Json j = Json::parse(read_text_file(p), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::kConfig, fmt::format("{} is not valid JSON", p.string()));
    return j;
  };
  return MockFixtures::from_json(cfg.mock->answer_bank ? load(*cfg.mock->answer_bank) : builtin->answer_bank,
                                 cfg.mock->synonyms ? load(*cfg.mock->synonyms) : builtin->synonyms);
}

std::unique_ptr<Clusterer> make_clusterer(const ExperimentConfig* cfg, const std::string& name) {
  if (cfg == nullptr || name == "lexical") return std::make_unique<LexicalClusterer>();
  return std::make_unique<LlmClusterer>(make_provider(*cfg, name, ""), cfg->decode);
}

std::vector<Json> load_fewshot(const ExperimentConfig& cfg, Task task) {
  if (!cfg.fewshot_examples) return {};
  const Json all = Json::parse(read_text_file(*cfg.fewshot_examples), nullptr, false);
  const char* key = is_tagging(task) ? "tag" : "summarize";
  if (all.is_discarded() || !all.contains(key) || !all[key].is_array()) {
    throw Error(ErrorCode::kConfig, fmt::format("{}: expected a '{}' array", cfg.fewshot_examples->string(), key));
  }
  return std::vector<Json>(all[key].begin(), all[key].end());
}

std::string status_line(const ExperimentReport& r) {
  if (r.degenerate) return fmt::format("DEGENERATE ({})", r.degenerate_reason);
  return fmt::format("stability {} | time {} s | {}/{} runs parsed | path entropy {:.2f} bits",
                     format_mean_std(*r.stability), format_mean_std(r.timing), r.successful_runs, r.n_runs,
                     r.path_entropy_bits);
}

// Runs, scores and persists one experiment.
ScoredExperiment execute_experiment(const ExperimentSpec& spec, Provider& provider, const JudgeSet& judges,
                                    const std::shared_ptr<JudgeCache>& cache, const Clusterer& clusterer,
                                    const std::filesystem::path& root) {
  const ExperimentFiles files(root / spec.meta.experiment_id);
  std::filesystem::create_directories(files.dir);
  write_text_file(files.meta(), to_json(spec.meta).dump(2, ' ', false, Json::error_handler_t::replace) + "\n");
  std::vector<RunRecord> records;
  {
    JsonlWriter writer(files.runs(), true);
    records = run_experiment(spec, provider, &writer);
  }
  ScoredExperiment scored = score_experiment(spec.meta, records, judges, clusterer);
  write_scored(files, scored, *cache);
  return scored;
}

std::string read_column(const std::vector<std::string>& header, const std::string& name) {
  return std::find(header.begin(), header.end(), name) != header.end() ? name : std::string();
}

}  // namespace

std::shared_ptr<Provider> make_provider(const ExperimentConfig& cfg, const std::string& id, const std::string& method) {
  if (id == "mock") {
    MockConfig mc = cfg.mock ? cfg.mock->config : MockConfig{};
    if (cfg.mock) {
      if (auto it = cfg.mock->scenario_by_method.find(method); it != cfg.mock->scenario_by_method.end()) {
        mc.scenario = it->second;
      }
    }
    return std::make_shared<MockProvider>(mc, fixtures_for(cfg));
  }
  for (const auto& p : cfg.providers) {
    if (p.id == id) return std::make_shared<HttpProvider>(p);
  }
  throw Error(ErrorCode::kConfig, fmt::format("provider '{}' is not configured", id));
}

JudgeSet make_judges(const ExperimentConfig* cfg, const std::vector<std::string>& names,
                     const std::shared_ptr<JudgeCache>& cache) {
  std::vector<std::shared_ptr<const Judge>> judges;
  for (const auto& name : names) {
    std::shared_ptr<const Judge> inner;
    if (name == "lexical") {
      inner = std::make_shared<LexicalJudge>();
    } else if (cfg != nullptr) {
      inner = std::make_shared<LlmJudge>(name, make_provider(*cfg, name, ""), cfg->decode);
    } else {
      inner = std::make_shared<CachedOnlyJudge>(name);
    }
    judges.push_back(std::make_shared<CachingJudge>(inner, cache));
  }
  return JudgeSet(std::move(judges));
}

int cmd_run(const std::filesystem::path& config_path, const RunOverrides& overrides, std::ostream& log) {
  ExperimentConfig cfg = load_config(config_path);
  if (overrides.out) cfg.output_root = *overrides.out;
  if (overrides.alpha) cfg.alpha = *overrides.alpha;
  if (overrides.n_runs) cfg.n_runs = *overrides.n_runs;
  if (!overrides.methods.empty()) cfg.methods = overrides.methods;
  if (overrides.provider) cfg.provider = *overrides.provider;
  if (overrides.parallelism) cfg.parallelism = *overrides.parallelism;
  cfg.validate();

  // Every dataset must load before anything is written.
  std::vector<Dataset> datasets;
  for (const auto& d : cfg.datasets) datasets.push_back(load_dataset(d));
  std::map<Task, std::vector<Json>> fewshot;
  for (Task t : {Task::kSummarize, Task::kTag}) fewshot[t] = load_fewshot(cfg, t);
  auto clusterer = make_clusterer(&cfg, cfg.clusterer);

  const std::size_t total = datasets.size() * cfg.queries.size() * cfg.methods.size();
  std::size_t done = 0;
  bool degenerate = false;
  for (const auto& ds : datasets) {
    for (const auto& q : cfg.queries) {
      for (const auto& method : cfg.methods) {
        ExperimentSpec spec;
        ExperimentMeta& m = spec.meta;
        m.experiment_id = make_experiment_id(ds.id, q.text, method);
        m.dataset_id = ds.id;
        m.query = q.text;
        m.method = method;
        m.column_name = ds.column_name;
        m.language = q.language.value_or(ds.language);
        m.provider = cfg.provider;
        m.task = q.task;
        m.mode = q.mode;
        m.n_runs = cfg.n_runs;
        m.alpha = cfg.alpha;
        m.match = cfg.match;
        m.match.parallelism = cfg.parallelism;
        m.judges = cfg.judges;
        m.item_ids = ds.item_ids;
        m.gold = ds.gold;
        auto provider = make_provider(cfg, cfg.provider, method);
        if (const auto* mock = dynamic_cast<const MockProvider*>(provider.get())) {
          m.scenario = std::string(to_string(mock->config().scenario));
        }
        spec.items = ds.items;
        spec.decode = cfg.decode;
        spec.self_consistency_k = cfg.self_consistency_k;
        spec.few_shot = fewshot[is_tagging(q.task) ? Task::kTag : Task::kSummarize];
        spec.parallelism = cfg.parallelism;
        spec.llm_refine = cfg.llm_refine;

        auto cache = std::make_shared<JudgeCache>();
        const JudgeSet judges = make_judges(&cfg, cfg.judges, cache);
        const ScoredExperiment scored =
            execute_experiment(spec, *provider, judges, cache, *clusterer, cfg.output_root);
        degenerate = degenerate || scored.report.degenerate;
        log << fmt::format("[{}/{}] {}: {}\n", ++done, total, m.experiment_id, status_line(scored.report));
      }
    }
  }
  return degenerate ? kExitDegenerate : kExitOk;
}

int cmd_score(const std::filesystem::path& experiment_dir, std::optional<double> alpha,
              std::optional<std::size_t> parallelism, std::ostream& log,
              const std::optional<std::filesystem::path>& config_path) {
  const ExperimentFiles files(experiment_dir);
  if (!std::filesystem::is_regular_file(files.runs())) {
    throw Error(ErrorCode::kIo, fmt::format("{} not found", files.runs().string()));
  }
  ExperimentMeta meta = experiment_meta_from_json(Json::parse(read_text_file(files.meta())));
  if (alpha) {
    if (!(*alpha >= 0.0 && *alpha <= 1.0)) throw Error(ErrorCode::kConfig, "alpha must lie in [0, 1]");
    meta.alpha = *alpha;
  }
  if (parallelism) meta.match.parallelism = std::max<std::size_t>(1, *parallelism);
  std::vector<RunRecord> records;
  for (const auto& j : read_jsonl(files.runs())) records.push_back(run_record_from_json(j));
  std::sort(records.begin(), records.end(),
            [](const RunRecord& a, const RunRecord& b) { return a.run_index < b.run_index; });

  auto cache = std::make_shared<JudgeCache>();
  if (std::filesystem::is_regular_file(files.judge_cache())) {
    try {
      cache->load_jsonl(read_text_file(files.judge_cache()));
    } catch (const std::exception& e) {
      log << fmt::format("warning: ignoring unreadable judge cache ({})\n", e.what());
      cache = std::make_shared<JudgeCache>();
    }
  }
  std::optional<ExperimentConfig> cfg;
  if (config_path) cfg = load_config(*config_path);
  const JudgeSet judges = make_judges(cfg ? &*cfg : nullptr, meta.judges, cache);
  auto clusterer = make_clusterer(cfg ? &*cfg : nullptr, cfg ? cfg->clusterer : "lexical");
  const ScoredExperiment scored = score_experiment(meta, records, judges, *clusterer);
  write_scored(files, scored, *cache);
  log << fmt::format("{}: {}\n", meta.experiment_id, status_line(scored.report));
  return scored.report.degenerate ? kExitDegenerate : kExitOk;
}

std::vector<MetricCorrelation> validate_metric(const std::filesystem::path& scores,
                                               const std::filesystem::path& human) {
  auto load = [](const std::filesystem::path& p) {
    auto rows = parse_csv(read_text_file(p));
    if (rows.empty()) throw Error(ErrorCode::kConfig, fmt::format("{}: empty file", p.string()));
    if (read_column(rows.front(), "pair_id").empty()) {
      throw Error(ErrorCode::kConfig, fmt::format("{}: missing 'pair_id' column", p.string()));
    }
    return rows;
  };
  auto number = [](const std::string& s, const std::filesystem::path& p) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != text::trim(s).size() && used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfig, fmt::format("{}: '{}' is not a number", p.string(), s));
    }
  };
  const auto score_rows = load(scores);
  const auto human_rows = load(human);
  const auto& sh = score_rows.front();
  const auto& hh = human_rows.front();
  const auto human_id = static_cast<std::size_t>(std::find(hh.begin(), hh.end(), "pair_id") - hh.begin());
  const auto rating_it = std::find(hh.begin(), hh.end(), "rating");
  if (rating_it == hh.end()) throw Error(ErrorCode::kConfig, fmt::format("{}: missing 'rating' column", human.string()));
  const auto rating_col = static_cast<std::size_t>(rating_it - hh.begin());

  std::map<std::string, double> ratings;
  for (std::size_t r = 1; r < human_rows.size(); ++r) {
    const auto& row = human_rows[r];
    if (row.size() <= std::max(human_id, rating_col)) {
      throw Error(ErrorCode::kConfig, fmt::format("{}: row {} is short", human.string(), r + 1));
    }
    const double rating = number(row[rating_col], human);
    if (rating < 1.0 || rating > 5.0) {
      throw Error(ErrorCode::kConfig, fmt::format("{}: rating {} outside 1-5", human.string(), rating));
    }
    if (!ratings.emplace(text::trim(row[human_id]), 2.0 * rating).second) {
      throw Error(ErrorCode::kConfig, fmt::format("{}: duplicate pair_id '{}'", human.string(), row[human_id]));
    }
  }

  const auto score_id = static_cast<std::size_t>(std::find(sh.begin(), sh.end(), "pair_id") - sh.begin());
  std::set<std::string> seen;
  std::vector<std::string> orphans;
  std::vector<std::vector<double>> metric_values(sh.size());
  std::vector<double> human_values;
  for (std::size_t r = 1; r < score_rows.size(); ++r) {
    const auto& row = score_rows[r];
    if (row.size() < sh.size()) throw Error(ErrorCode::kConfig, fmt::format("{}: row {} is short", scores.string(), r + 1));
    const std::string id = text::trim(row[score_id]);
    seen.insert(id);
    const auto it = ratings.find(id);
    if (it == ratings.end()) {
      orphans.push_back(id + " (scores only)");
      continue;
    }
    human_values.push_back(it->second);
    for (std::size_t c = 0; c < sh.size(); ++c) {
      if (c != score_id) metric_values[c].push_back(number(row[c], scores));
    }
  }
  for (const auto& [id, rating] : ratings) {
    if (!seen.count(id)) orphans.push_back(id + " (ratings only)");
  }
  if (!orphans.empty()) {
    throw Error(ErrorCode::kConfig, "pair ids do not align: " + text::join(orphans, ", "));
  }
  if (human_values.size() < 3) throw Error(ErrorCode::kInsufficientPairs, "at least 3 aligned pairs are needed");

  std::vector<MetricCorrelation> out;
  for (std::size_t c = 0; c < sh.size(); ++c) {
    if (c == score_id) continue;
    const stats::Correlation corr = stats::pearson(metric_values[c], human_values);
    out.push_back({sh[c], human_values.size(), corr.r, corr.p});
  }
  return out;
}

int cmd_validate_metric(const std::filesystem::path& scores, const std::filesystem::path& human,
                        const std::optional<std::filesystem::path>& out, std::ostream& log) {
  const auto results = validate_metric(scores, human);
  Json j = Json::array();
  log << "metric,n,r,p\n";
  for (const auto& m : results) {
    log << fmt::format("{},{},{:.6f},{:.6f}\n", m.metric, m.n, m.r, m.p);
    j.push_back(Json{{"metric", m.metric}, {"n", m.n}, {"r", m.r}, {"p", m.p}});
  }
  if (out) write_text_file(*out, j.dump(2) + "\n");
  return kExitOk;
}

int cmd_report(const std::filesystem::path& root, ReportFormat format, std::ostream& log) {
  if (!std::filesystem::is_directory(root)) {
    throw Error(ErrorCode::kIo, fmt::format("{} is not a directory", root.string()));
  }
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (entry.is_directory() && std::filesystem::is_regular_file(entry.path() / "report.json")) {
      dirs.push_back(entry.path());
    }
  }
  if (dirs.empty()) throw Error(ErrorCode::kIo, fmt::format("no scored experiments under {}", root.string()));
  std::sort(dirs.begin(), dirs.end());
  std::vector<ExperimentReport> reports;
  for (const auto& d : dirs) {
    reports.push_back(experiment_report_from_json(Json::parse(read_text_file(d / "report.json"))));
  }
  const auto table = root / (format == ReportFormat::kCsv ? "report.csv" : "report.md");
  write_text_file(table, render_report(reports, format));
  write_text_file(root / "word_counts.csv", render_word_counts(reports));
  log << fmt::format("wrote {} and {} ({} experiments)\n", table.string(), (root / "word_counts.csv").string(),
                     reports.size());
  return std::any_of(reports.begin(), reports.end(), [](const ExperimentReport& r) { return r.degenerate; })
             ? kExitDegenerate
             : kExitOk;
}

const std::vector<MockStudyCell>& mock_study_cells() {
  static const std::vector<MockStudyCell> cells = {
      {MockScenario::kUnconstrained, Variant::kZeroshotCot},
      {MockScenario::kIrrelevantIntermediate, Variant::kZeroshotCot},
      {MockScenario::kRelevantIntermediate, Variant::kTbsOnly},
      {MockScenario::kCastLike, Variant::kCast},
  };
  return cells;
}

int cmd_mock_demo(const MockStudyOptions& options, std::ostream& log) {
  if (options.n_runs < 2) throw Error(ErrorCode::kConfig, "mock-demo: n_runs must be at least 2");
  const auto rows = parse_csv(assets::get("demo_corpus.csv"));
  const auto& header = rows.front();
  const auto col = static_cast<std::size_t>(std::find(header.begin(), header.end(), "Feedback") - header.begin());
  std::vector<std::string> items, ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    items.push_back(rows[r].at(col));
    ids.push_back(std::to_string(r - 1));
  }
  const std::string query = "Summarize the customer feedback";

  std::vector<ExperimentReport> reports;
  bool degenerate = false;
  for (const auto& cell : mock_study_cells()) {
    MockConfig mc;
    mc.seed = options.seed;
    mc.p_reorder = options.p_reorder;
    mc.scenario = cell.scenario;
    MockProvider provider(mc);
    ExperimentSpec spec;
    ExperimentMeta& m = spec.meta;
    const std::string scenario(to_string(cell.scenario));
    m.method = std::string(to_string(cell.variant));
    m.scenario = scenario;
    m.experiment_id = make_experiment_id("customer_feedback", query, scenario);
    m.dataset_id = "customer_feedback";
    m.query = query;
    m.column_name = "Feedback";
    m.provider = provider.id();
    m.n_runs = options.n_runs;
    m.match.parallelism = options.parallelism;
    m.item_ids = ids;
    m.gold.assign(items.size(), std::nullopt);
    spec.items = items;
    spec.parallelism = options.parallelism;
    auto cache = std::make_shared<JudgeCache>();
    const JudgeSet judges = make_judges(nullptr, {"lexical"}, cache);
    const ScoredExperiment scored =
        execute_experiment(spec, provider, judges, cache, LexicalClusterer(), options.out);
    degenerate = degenerate || scored.report.degenerate;
    log << fmt::format("{:<24} {:<13} {}\n", scenario, m.method, status_line(scored.report));
    reports.push_back(scored.report);
  }
  write_text_file(options.out / "report.md", render_report(reports, ReportFormat::kMarkdown));
  write_text_file(options.out / "word_counts.csv", render_word_counts(reports));
  log << fmt::format("wrote {}\n", (options.out / "report.md").string());
  return degenerate ? kExitDegenerate : kExitOk;
}

}  // namespace castbench
