#include "elite/harness.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "elite/error.hpp"
#include "elite/random.hpp"
#include "elite/run_config.hpp"

namespace elite {

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::online:
      return "online";
    case RunMode::supervised:
      return "supervised";
    case RunMode::eval_frozen:
      return "eval_frozen";
  }
  return "online";
}

std::optional<RunMode> parse_run_mode(std::string_view name) {
  for (auto m : {RunMode::online, RunMode::supervised, RunMode::eval_frozen}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view to_string(ReflectionStatus status) {
  switch (status) {
    case ReflectionStatus::ok:
      return "ok";
    case ReflectionStatus::fallback:
      return "fallback";
    case ReflectionStatus::failed:
      return "failed";
    case ReflectionStatus::skipped:
      return "skipped";
  }
  return "skipped";
}

void RunConfig::validate() const {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (t_max && *t_max < 1) throw ConfigError("t_max must be at least 1");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (mode == RunMode::eval_frozen) {
    if (pool_path.empty()) throw ConfigError("eval_frozen requires pool_path");
    if (!std::filesystem::exists(pool_path)) {
      throw ConfigError("pool file does not exist: " + pool_path);
    }
  }
  if (!pool_path.empty() && mode != RunMode::eval_frozen &&
      !std::filesystem::exists(pool_path)) {
    throw ConfigError("pool file does not exist: " + pool_path);
  }
}

namespace {

nlohmann::ordered_json plan_json(const CoarsePlan& plan) {
  nlohmann::ordered_json j;
  j["bullets"] = plan.bullets;
  j["raw_text"] = plan.raw_text;
  j["truncated"] = plan.truncated;
  j["padded"] = plan.padded;
  j["degraded"] = plan.degraded;
  return j;
}

nlohmann::ordered_json exchange_json(const ChatExchange& e) {
  nlohmann::ordered_json j;
  j["role"] = e.role_tag;
  nlohmann::ordered_json messages = nlohmann::ordered_json::array();
  for (const auto& m : e.request.messages) {
    messages.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
  }
  j["messages"] = messages;
  j["reply"] = e.reply;
  if (!e.error.empty()) j["error"] = e.error;
  return j;
}

}  // namespace

nlohmann::ordered_json to_json(const EpisodeRecord& r) {
  nlohmann::ordered_json j;
  j["episode"] = r.episode;
  j["task_id"] = r.task_id;
  j["category"] = std::string(to_string(r.category));
  j["split"] = std::string(to_string(r.split));
  j["instruction"] = r.instruction;
  j["plan"] = plan_json(r.plan);
  nlohmann::ordered_json retrieved = nlohmann::ordered_json::array();
  for (const auto& ref : r.retrieved) {
    retrieved.push_back(
        {{"id", ref.id}, {"score", ref.score}, {"kind", std::string(to_string(ref.kind))}});
  }
  j["retrieved"] = retrieved;
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
    const auto& s = r.trajectory[i];
    steps.push_back({{"t", i + 1},
                     {"observation", s.observation},
                     {"action", s.action.to_string()},
                     {"feedback", s.feedback}});
  }
  j["trajectory"] = steps;
  j["outcome"] = std::string(to_string(r.outcome));
  j["progress"] = r.progress;
  j["aborted"] = r.aborted;
  if (r.aborted) j["abort_reason"] = r.abort_reason;

  nlohmann::ordered_json refl;
  refl["status"] = std::string(to_string(r.reflection_status));
  if (r.reflection) {
    refl["mode"] = std::string(to_string(r.reflection->mode));
    refl["attempts"] = r.reflection->attempts;
    nlohmann::ordered_json insights = nlohmann::ordered_json::array();
    for (const auto& i : r.reflection->insights) {
      insights.push_back({{"kind", std::string(to_string(i.kind))}, {"text", i.text}});
    }
    refl["insights"] = insights;
    refl["warnings"] = r.reflection->warnings;
  }
  if (!r.reflection_error.empty()) refl["error"] = r.reflection_error;
  j["reflection"] = refl;

  if (r.delta) {
    const auto& d = *r.delta;
    nlohmann::ordered_json delta;
    delta["skipped"] = d.skipped;
    nlohmann::ordered_json proposed = nlohmann::ordered_json::array();
    for (const auto& op : d.proposal.proposed) proposed.push_back(to_json(op));
    delta["proposed"] = proposed;
    nlohmann::ordered_json rejected = nlohmann::ordered_json::array();
    for (const auto& rej : d.proposal.rejected) {
      rejected.push_back({{"op", rej.op_text}, {"reason", rej.reason}});
    }
    for (const auto& rej : d.apply_rejected) {
      rejected.push_back({{"op", describe(rej.op)}, {"reason", rej.reason}});
    }
    delta["rejected"] = rejected;
    if (d.proposal.rationale) delta["rationale"] = *d.proposal.rationale;
    delta["fallback"] = d.proposal.fallback;
    if (d.proposal.fallback) delta["fallback_reason"] = d.proposal.fallback_reason;
    delta["added_ids"] = d.added_ids;
    delta["evicted_ids"] = d.evicted_ids;
    j["delta"] = delta;
  } else {
    j["delta"] = nullptr;
  }
  j["pool_size"] = r.pool_size;
  j["pool_version"] = r.pool_version;
  return j;
}

Metrics compute_metrics(const std::vector<EpisodeRecord>& records) {
  Metrics m;
  m.episodes = records.size();
  if (records.empty()) return m;
  m.defined = true;
  double successes = 0.0;
  double progress = 0.0;
  std::map<std::string, std::pair<double, double>> sums;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const double s = r.outcome == Outcome::success ? 1.0 : 0.0;
    successes += s;
    progress += r.progress;
    auto& g = m.per_category[std::string(to_string(r.category))];
    ++g.episodes;
    auto& sum = sums[std::string(to_string(r.category))];
    sum.first += s;
    sum.second += r.progress;
    const double n = static_cast<double>(i + 1);
    m.curve.push_back({static_cast<int>(i + 1), successes / n, progress / n});
  }
  const double n = static_cast<double>(records.size());
  m.success_rate = successes / n;
  m.task_progress = progress / n;
  for (auto& [name, g] : m.per_category) {
    const double c = static_cast<double>(g.episodes);
    g.success_rate = sums[name].first / c;
    g.task_progress = sums[name].second / c;
  }
  return m;
}

nlohmann::ordered_json to_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["defined"] = m.defined;
  j["episodes"] = m.episodes;
  if (m.defined) {
    j["success_rate"] = m.success_rate;
    j["task_progress"] = m.task_progress;
  } else {
    j["success_rate"] = nullptr;
    j["task_progress"] = nullptr;
  }
  nlohmann::ordered_json cats = nlohmann::ordered_json::object();
  for (const auto& [name, g] : m.per_category) {
    cats[name] = {{"episodes", g.episodes},
                  {"success_rate", g.success_rate},
                  {"task_progress", g.task_progress}};
  }
  j["per_category"] = cats;
  return j;
}

namespace {

std::string fixed(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

std::string curve_csv(const Metrics& m) {
  std::string out = "episode,success_rate,task_progress\n";
  for (const auto& p : m.curve) {
    out += std::to_string(p.episode) + "," + fixed(p.success_rate) + "," +
           fixed(p.task_progress) + "\n";
  }
  return out;
}

std::vector<TaskSpec> shuffle_tasks(std::vector<TaskSpec> tasks, std::uint64_t seed) {
  std::mt19937_64 rng(random::mix(seed, 0x5368756666ULL));
  random::shuffle(tasks, rng);
  return tasks;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << contents;
}

std::string numbered(std::string_view prefix, int n, std::string_view ext) {
  std::ostringstream os;
  os << prefix << std::setw(4) << std::setfill('0') << n << ext;
  return os.str();
}

// Writes run artifacts when the config names a run directory.
class Artifacts {
 public:
  explicit Artifacts(const RunConfig& config) : dir_(config.run_dir) {
    if (dir_.empty()) return;
    std::filesystem::create_directories(dir_);
    write_file(dir_ / "config.json", to_json(config).dump(2) + "\n");
    log_.open(dir_ / "run.log", std::ios::binary | std::ios::trunc);
  }

  bool enabled() const { return !dir_.empty(); }

  void episode(const EpisodeRecord& r) {
    if (!enabled()) return;
    write_file(dir_ / "episodes" / numbered("episode_", r.episode, ".json"),
               to_json(r).dump(2) + "\n");
    if (!r.exchanges.empty()) {
      nlohmann::ordered_json all = nlohmann::ordered_json::array();
      for (const auto& e : r.exchanges) all.push_back(exchange_json(e));
      write_file(dir_ / "prompts" / numbered("episode_", r.episode, ".json"),
                 all.dump(2) + "\n");
    }
    log_ << "episode " << r.episode << " " << r.task_id << " " << to_string(r.outcome)
         << " progress=" << fixed(r.progress) << " retrieved=" << r.retrieved.size()
         << " reflection=" << to_string(r.reflection_status) << " pool=" << r.pool_size
         << "\n";
    log_.flush();
  }

  void checkpoint(const StrategyPool& pool, int episode) {
    if (!enabled()) return;
    std::filesystem::create_directories(dir_ / "pool");
    save_pool(pool, dir_ / "pool" / numbered("checkpoint_", episode, ".jsonl"));
  }

  void note(const std::string& line) {
    if (enabled()) log_ << line << "\n";
  }

  void finish(const RunResult& result, bool write_pool) {
    if (!enabled()) return;
    if (write_pool) save_pool(result.pool, dir_ / "pool" / "final.jsonl");
    auto metrics = to_json(result.metrics);
    metrics["skipped"] = result.skipped;
    write_file(dir_ / "metrics.json", metrics.dump(2) + "\n");
    write_file(dir_ / "curve.csv", curve_csv(result.metrics));
  }

 private:
  std::filesystem::path dir_;
  std::ofstream log_;
};

struct EpisodeModels {
  ChatBackend* planner;
  ChatBackend* distiller;
  ChatBackend* consolidator;
  std::unique_ptr<RecordingBackend> rec_planner;
  std::unique_ptr<RecordingBackend> rec_distiller;
  std::unique_ptr<RecordingBackend> rec_consolidator;

  EpisodeModels(const ModelSet& models, bool record)
      : planner(models.planner.get()),
        distiller(models.distiller.get()),
        consolidator(models.consolidator.get()) {
    if (!record) return;
    rec_planner = std::make_unique<RecordingBackend>(*models.planner, "planner");
    rec_distiller = std::make_unique<RecordingBackend>(*models.distiller, "distiller");
    rec_consolidator =
        std::make_unique<RecordingBackend>(*models.consolidator, "consolidator");
    planner = rec_planner.get();
    distiller = rec_distiller.get();
    consolidator = rec_consolidator.get();
  }

  std::vector<ChatExchange> take() {
    std::vector<ChatExchange> all;
    for (auto* r : {rec_planner.get(), rec_distiller.get(), rec_consolidator.get()}) {
      if (r == nullptr) continue;
      auto part = r->take();
      all.insert(all.end(), std::make_move_iterator(part.begin()),
                 std::make_move_iterator(part.end()));
    }
    return all;
  }
};

void check_models(const ModelSet& models) {
  if (!models.planner || !models.distiller || !models.consolidator || !models.embedder) {
    throw ConfigError("model set is incomplete");
  }
}

RetrievalMode effective_mode(const RunConfig& config) {
  return config.disable_retrieval ? RetrievalMode::none : config.retrieval_mode;
}

RetrievedSet retrieve(const RunConfig& config, const StrategyPool& pool,
                      const CoarsePlan& plan, const std::string& instruction,
                      const Embedder& embedder, int episode) {
  if (pool.empty()) return {};
  switch (effective_mode(config)) {
    case RetrievalMode::cot: {
      const Vector query = embedder.embed(plan.raw_text);
      return retrieve_topk(pool, query, config.k);
    }
    case RetrievalMode::tfidf_content:
      return retrieve_tfidf(pool, instruction, config.k, TfidfField::content);
    case RetrievalMode::tfidf_instruction:
      return retrieve_tfidf(pool, instruction, config.k, TfidfField::instruction);
    case RetrievalMode::all:
      return retrieve_all(pool);
    case RetrievalMode::random:
      return retrieve_random(pool, config.k,
                             random::mix(config.seed, static_cast<std::uint64_t>(episode)));
    case RetrievalMode::none:
      return {};
  }
  return {};
}

struct EpisodeInput {
  const RunConfig* config;
  const TaskSpec* task;
  int episode;
  bool learn;        // reflect and consolidate
  bool comparative;  // supervised reflection
};

// Runs one episode. When learning, `pool` is replaced by the updated pool.
EpisodeRecord run_episode(const EpisodeInput& in, const ModelSet& models,
                          const PromptSet& prompts, StrategyPool& pool) {
  const RunConfig& config = *in.config;
  TaskSpec task = *in.task;
  if (config.t_max) task.t_max = *config.t_max;

  EpisodeModels m(models, config.dump_prompts);
  EpisodeRecord r;
  r.episode = in.episode;
  r.task_id = task.id;
  r.category = task.category;
  r.split = task.split;
  r.instruction = task.instruction;

  auto [env, observation] = reset(task);
  r.plan = coarse_plan(task.instruction, observation, *m.planner, prompts);
  const RetrievedSet strategies =
      retrieve(config, pool, r.plan, task.instruction, *models.embedder, in.episode);
  for (const auto& s : strategies) r.retrieved.push_back({s.entry.id, s.score, s.entry.kind});

  while (!env.done()) {
    ActionChoice choice;
    try {
      choice = next_action(task.instruction, r.trajectory, observation, env.steps_taken() + 1,
                           task.t_max, strategies, *m.planner, prompts);
    } catch (const TransportError& e) {
      r.aborted = true;
      r.abort_reason = e.what();
      break;
    }
    StepResult result = env.step(choice.action);
    r.trajectory.push_back({observation.text, choice.action,
                            choice.unparseable ? std::string(kUnparseableFeedback)
                                               : result.feedback});
    observation = std::move(result.observation);
  }
  r.outcome = env.goal_satisfied() ? Outcome::success : Outcome::failure;
  r.progress = env.goal_progress();

  if (in.learn) {
    std::optional<Reflection> reflection;
    if (r.trajectory.empty()) {
      r.reflection_status = ReflectionStatus::failed;
      r.reflection_error = "no steps to reflect on";
    } else {
      const ReflectInput input{task.id, task.instruction, r.trajectory, r.outcome};
      try {
        reflection = in.comparative
                         ? reflect_comparative(input, task.oracle, *m.distiller, prompts)
                         : reflect(input, *m.distiller, prompts);
        r.reflection_status =
            reflection->fallback ? ReflectionStatus::fallback : ReflectionStatus::ok;
      } catch (const TransportError& e) {
        r.reflection_status = ReflectionStatus::failed;
        r.reflection_error = e.what();
      }
    }
    r.reflection = reflection;

    StrategyPool marked = pool;
    const auto ids = ids_of(strategies);
    marked.mark_retrieved(ids, in.episode);
    const EpisodeContext context{r.plan.raw_text, task.instruction};
    const ApplyOptions options{config.max_pool_size};
    if (!reflection) {
      pool = std::move(marked);
      ConsolidationReport report;
      report.skipped = true;
      r.delta = std::move(report);
    } else if (config.disable_consolidation) {
      ConsolidationReport report;
      report.proposal.proposed = adds_for(*reflection, context);
      auto applied =
          apply_delta(marked, report.proposal.proposed, in.episode, *models.embedder, options);
      report.apply_rejected = std::move(applied.rejected);
      report.added_ids = std::move(applied.added_ids);
      report.evicted_ids = std::move(applied.evicted_ids);
      pool = std::move(applied.pool);
      r.delta = std::move(report);
    } else {
      auto [next, report] = consolidate(reflection, marked, in.episode, context,
                                        *m.consolidator, *models.embedder, prompts, options);
      pool = std::move(next);
      r.delta = std::move(report);
    }
  }
  r.pool_size = pool.size();
  r.pool_version = pool.version();
  r.exchanges = m.take();
  return r;
}

PromptSet prompts_for(const RunConfig& config) {
  return config.prompts_dir.empty() ? PromptSet::defaults()
                                    : PromptSet::with_overrides(config.prompts_dir);
}

}  // namespace

RunResult run_online(const RunConfig& config, const std::vector<TaskSpec>& tasks,
                     const ModelSet& models, StrategyPool initial) {
  check_models(models);
  if (initial.dim() != models.embedder->dim()) {
    throw ConfigError("pool dimension " + std::to_string(initial.dim()) +
                      " does not match embedder dimension " +
                      std::to_string(models.embedder->dim()));
  }
  const PromptSet prompts = prompts_for(config);
  Artifacts artifacts(config);
  const bool supervised = config.mode == RunMode::supervised;

  RunResult result;
  result.pool = std::move(initial);
  const std::vector<TaskSpec> order = config.shuffle ? shuffle_tasks(tasks, config.seed) : tasks;
  int episode = 0;
  for (const auto& task : order) {
    if (supervised && task.oracle.empty()) {
      result.skipped.push_back(task.id);
      artifacts.note("skipped " + task.id + ": no ground-truth trajectory");
      continue;
    }
    ++episode;
    EpisodeRecord r =
        run_episode({&config, &task, episode, true, supervised}, models, prompts, result.pool);
    artifacts.episode(r);
    if (episode % 10 == 0) artifacts.checkpoint(result.pool, episode);
    result.records.push_back(std::move(r));
  }
  result.metrics = compute_metrics(result.records);
  artifacts.finish(result, true);
  return result;
}

RunResult run_eval_frozen(const RunConfig& config, const std::vector<TaskSpec>& tasks,
                          const ModelSet& models, const StrategyPool& pool) {
  check_models(models);
  if (pool.dim() != models.embedder->dim()) {
    throw ConfigError("pool dimension does not match embedder dimension");
  }
  const PromptSet prompts = prompts_for(config);
  Artifacts artifacts(config);

  std::vector<const TaskSpec*> order;
  for (const auto& t : tasks) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(),
                   [](const TaskSpec* a, const TaskSpec* b) { return a->id < b->id; });

  std::vector<EpisodeRecord> records(order.size());
  auto run_one = [&](std::size_t i) {
    StrategyPool frozen = pool;
    records[i] = run_episode({&config, order[i], static_cast<int>(i + 1), false, false},
                             models, prompts, frozen);
  };
  const std::size_t workers = std::min(config.workers, std::max<std::size_t>(order.size(), 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < order.size(); ++i) run_one(i);
  } else {
    std::mutex mutex;
    std::size_t next = 0;
    std::exception_ptr failure;
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard lock(mutex);
            if (next >= order.size() || failure) return;
            i = next++;
          }
          try {
            run_one(i);
          } catch (...) {
            std::lock_guard lock(mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  RunResult result;
  result.pool = pool;
  for (auto& r : records) {
    r.pool_size = pool.size();
    r.pool_version = pool.version();
    artifacts.episode(r);
  }
  result.records = std::move(records);
  result.metrics = compute_metrics(result.records);
  artifacts.finish(result, false);
  return result;
}

namespace {

RunConfig sub_config(const RunConfig& config, const std::string& name) {
  RunConfig sub = config;
  if (!config.run_dir.empty()) sub.run_dir = (std::filesystem::path(config.run_dir) / name).string();
  return sub;
}

}  // namespace

SupervisedResult run_supervised(const RunConfig& config, const std::vector<TaskSpec>& tasks,
                                const ModelSet& models, StrategyPool initial) {
  std::vector<TaskSpec> seen;
  std::vector<TaskSpec> unseen;
  for (const auto& t : tasks) (t.split == Split::seen ? seen : unseen).push_back(t);

  RunConfig train_config = sub_config(config, "train");
  train_config.mode = RunMode::supervised;
  SupervisedResult out;
  out.train = run_online(train_config, seen, models, std::move(initial));

  RunConfig eval_config = sub_config(config, "eval");
  eval_config.mode = RunMode::eval_frozen;
  out.eval = run_eval_frozen(eval_config, unseen, models, out.train.pool);
  if (!config.run_dir.empty()) {
    write_file(std::filesystem::path(config.run_dir) / "table.csv",
               category_table_csv(out.eval.metrics));
  }
  return out;
}

std::string category_table_csv(const Metrics& metrics) {
  std::string header = "metric,avg";
  std::vector<std::string> names;
  for (auto c : all_categories()) {
    const std::string name(to_string(c));
    if (metrics.per_category.count(name) > 0) {
      names.push_back(name);
      header += "," + name;
    }
  }
  auto row = [&](const std::string& label, double avg, auto field) {
    std::string line = label + "," + fixed(avg);
    for (const auto& n : names) line += "," + fixed(field(metrics.per_category.at(n)));
    return line + "\n";
  };
  return header + "\n" +
         row("success_rate", metrics.success_rate,
             [](const GroupMetrics& g) { return g.success_rate; }) +
         row("task_progress", metrics.task_progress,
             [](const GroupMetrics& g) { return g.task_progress; });
}

AblationResult run_ablation(const RunConfig& config, AblationKind kind,
                            const std::vector<TaskSpec>& tasks, const ModelFactory& factory) {
  struct ArmSpec {
    std::string name;
    RunConfig config;
  };
  std::vector<ArmSpec> arms;
  if (kind == AblationKind::retrieval) {
    for (auto mode : {RetrievalMode::cot, RetrievalMode::tfidf_content,
                      RetrievalMode::tfidf_instruction, RetrievalMode::all,
                      RetrievalMode::random}) {
      RunConfig c = sub_config(config, std::string(to_string(mode)));
      c.retrieval_mode = mode;
      c.disable_retrieval = false;
      arms.push_back({std::string(to_string(mode)), c});
    }
  } else {
    RunConfig full = sub_config(config, "full");
    full.retrieval_mode = RetrievalMode::cot;
    full.disable_retrieval = false;
    full.disable_consolidation = false;
    RunConfig wo_iar = sub_config(config, "wo_iar");
    wo_iar.retrieval_mode = RetrievalMode::all;
    wo_iar.disable_retrieval = false;
    wo_iar.disable_consolidation = false;
    RunConfig wo_cc = sub_config(config, "wo_cc");
    wo_cc.retrieval_mode = RetrievalMode::cot;
    wo_cc.disable_retrieval = false;
    wo_cc.disable_consolidation = true;
    RunConfig base = sub_config(config, "base");
    base.disable_retrieval = true;
    arms = {{"full", full}, {"wo_iar", wo_iar}, {"wo_cc", wo_cc}, {"base", base}};
  }

  AblationResult result;
  result.kind = kind;
  for (auto& arm : arms) {
    arm.config.mode = RunMode::online;
    ModelSet models = factory();
    check_models(models);
    StrategyPool initial = config.pool_path.empty() ? new_pool(models.embedder->dim())
                                                    : load_pool(config.pool_path);
    result.arms.push_back(
        {arm.name, run_online(arm.config, tasks, models, std::move(initial))});
  }
  if (!config.run_dir.empty()) {
    const std::filesystem::path dir(config.run_dir);
    write_file(dir / "ablation.csv", ablation_table_csv(result));
    write_file(dir / "curves.csv", ablation_curves_csv(result));
  }
  return result;
}

std::string ablation_table_csv(const AblationResult& result) {
  std::string header = "metric";
  std::string success = "success_rate";
  std::string progress = "task_progress";
  for (const auto& arm : result.arms) {
    header += "," + arm.name;
    success += "," + fixed(arm.result.metrics.success_rate);
    progress += "," + fixed(arm.result.metrics.task_progress);
  }
  return header + "\n" + success + "\n" + progress + "\n";
}

std::string ablation_curves_csv(const AblationResult& result) {
  std::string out = "episode";
  std::size_t rows = 0;
  for (const auto& arm : result.arms) {
    out += "," + arm.name + "_success," + arm.name + "_progress";
    rows = std::max(rows, arm.result.metrics.curve.size());
  }
  out += "\n";
  for (std::size_t i = 0; i < rows; ++i) {
    out += std::to_string(i + 1);
    for (const auto& arm : result.arms) {
      const auto& curve = arm.result.metrics.curve;
      if (i < curve.size()) {
        out += "," + fixed(curve[i].success_rate) + "," + fixed(curve[i].task_progress);
      } else {
        out += ",,";
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace elite
