#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "elite/consolidation.hpp"
#include "elite/embed.hpp"
#include "elite/gridhouse.hpp"
#include "elite/model_backend.hpp"
#include "elite/planning.hpp"
#include "elite/prompts.hpp"
#include "elite/reflection.hpp"
#include "elite/retrieval.hpp"
#include "elite/strategy_pool.hpp"
#include "elite/task_suite.hpp"

namespace elite {

enum class RunMode { online, supervised, eval_frozen };

std::string_view to_string(RunMode mode);
std::optional<RunMode> parse_run_mode(std::string_view name);

struct SuiteSelection {
  // "builtin" or a directory of task files.
  std::string source = "builtin";
  std::uint64_t suite_seed = 0;
  TaskFilter filter;
};

struct BackendConfig {
  // "simulated", "scripted" (script_path) or "remote".
  std::string kind = "simulated";
  std::string script_path;
  RemoteChatConfig remote;
};

struct EmbedderConfig {
  std::string kind = "local";  // "local" or "remote"
  LocalHashEmbedderConfig local;
  RemoteEmbedderConfig remote;
};

struct RunConfig {
  RunMode mode = RunMode::online;
  RetrievalMode retrieval_mode = RetrievalMode::cot;
  std::size_t k = 4;
  std::uint64_t seed = 0;
  std::string pool_path;  // initial pool (resume / eval_frozen)
  std::string run_dir;    // empty: no artifacts written
  SuiteSelection suite;
  BackendConfig planner;
  BackendConfig distiller;
  BackendConfig consolidator;
  EmbedderConfig embedder;
  std::optional<int> t_max;
  bool disable_consolidation = false;
  bool disable_retrieval = false;
  bool shuffle = true;
  bool dump_prompts = false;
  std::size_t max_pool_size = 0;
  std::string prompts_dir;
  std::size_t workers = 1;  // eval_frozen only

  // Throws ConfigError.
  void validate() const;
};

struct ModelSet {
  std::shared_ptr<ChatBackend> planner;
  std::shared_ptr<ChatBackend> distiller;
  std::shared_ptr<ChatBackend> consolidator;
  std::shared_ptr<const Embedder> embedder;
};

// Models for one run; ablations build a fresh set per arm.
using ModelFactory = std::function<ModelSet()>;

struct RetrievedRef {
  EntryId id = 0;
  double score = 0.0;
  InsightKind kind = InsightKind::raw;
};

enum class ReflectionStatus { ok, fallback, failed, skipped };

std::string_view to_string(ReflectionStatus status);

struct EpisodeRecord {
  int episode = 0;  // 1-based position in the processed sequence
  std::string task_id;
  TaskCategory category = TaskCategory::base;
  Split split = Split::seen;
  std::string instruction;
  CoarsePlan plan;
  std::vector<RetrievedRef> retrieved;
  Trajectory trajectory;
  Outcome outcome = Outcome::failure;
  double progress = 0.0;
  bool aborted = false;
  std::string abort_reason;
  ReflectionStatus reflection_status = ReflectionStatus::skipped;
  std::optional<Reflection> reflection;
  std::string reflection_error;
  std::optional<ConsolidationReport> delta;
  std::size_t pool_size = 0;  // after this episode
  int pool_version = 0;
  std::vector<ChatExchange> exchanges;  // filled when dumping prompts
};

nlohmann::ordered_json to_json(const EpisodeRecord& record);

struct GroupMetrics {
  std::size_t episodes = 0;
  double success_rate = 0.0;
  double task_progress = 0.0;
};

struct CurvePoint {
  int episode = 0;
  double success_rate = 0.0;  // prefix mean over episodes 1..episode
  double task_progress = 0.0;
};

struct Metrics {
  bool defined = false;  // false for an empty run
  std::size_t episodes = 0;
  double success_rate = 0.0;
  double task_progress = 0.0;
  std::map<std::string, GroupMetrics> per_category;
  std::vector<CurvePoint> curve;
};

Metrics compute_metrics(const std::vector<EpisodeRecord>& records);
nlohmann::ordered_json to_json(const Metrics& metrics);
std::string curve_csv(const Metrics& metrics);

struct RunResult {
  StrategyPool pool{1};  // replaced by the run
  Metrics metrics;
  std::vector<EpisodeRecord> records;
  std::vector<std::string> skipped;  // task ids with warnings
};

// Seeded Fisher–Yates over the task list; identical for every arm sharing a
// seed.
std::vector<TaskSpec> shuffle_tasks(std::vector<TaskSpec> tasks, std::uint64_t seed);

// The learning loop: one visit per task, pool updated after every episode.
// In supervised mode tasks with an oracle get comparative reflection and
// tasks without one are skipped.
RunResult run_online(const RunConfig& config, const std::vector<TaskSpec>& tasks,
                     const ModelSet& models, StrategyPool initial);

// Episodes against an immutable pool, no reflection; ordered by task id and
// optionally spread over config.workers threads.
RunResult run_eval_frozen(const RunConfig& config, const std::vector<TaskSpec>& tasks,
                          const ModelSet& models, const StrategyPool& pool);

struct SupervisedResult {
  RunResult train;
  RunResult eval;
};

// Trains on the seen split with comparative reflection, then evaluates the
// frozen pool on the unseen split.
SupervisedResult run_supervised(const RunConfig& config, const std::vector<TaskSpec>& tasks,
                                const ModelSet& models, StrategyPool initial);

// Avg followed by one column per category, one row per metric.
std::string category_table_csv(const Metrics& metrics);

enum class AblationKind { retrieval, components };

struct AblationArm {
  std::string name;
  RunResult result;
};

struct AblationResult {
  AblationKind kind = AblationKind::retrieval;
  std::vector<AblationArm> arms;
};

// retrieval: cot, tfidf_content, tfidf_instruction, all, random.
// components: full, wo_iar (retrieve everything), wo_cc (insights added
// without consolidation), base (no retrieval).
AblationResult run_ablation(const RunConfig& config, AblationKind kind,
                            const std::vector<TaskSpec>& tasks, const ModelFactory& factory);

// "metric,<arm>,..." with success_rate and task_progress rows.
std::string ablation_table_csv(const AblationResult& result);
// episode,<arm>_success,<arm>_progress,...
std::string ablation_curves_csv(const AblationResult& result);

}  // namespace elite
