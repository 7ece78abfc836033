#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "elite/error.hpp"
#include "elite/run_config.hpp"
#include "elite/text.hpp"

using namespace elite;

namespace {

constexpr int kExitConfig = 2;

struct Overrides {
  std::string config_path;
  std::optional<std::string> run_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  std::optional<std::string> retrieval;
  std::optional<std::string> pool;
  std::optional<std::string> suite;
  std::optional<std::uint64_t> suite_seed;
  std::optional<std::string> categories;
  std::optional<std::string> split;
  std::optional<std::size_t> limit;
  std::optional<std::string> backend;
  std::optional<std::string> script;
  std::optional<std::string> chat_url;
  std::optional<std::string> chat_model;
  std::optional<std::string> embedder;
  std::optional<std::string> embed_url;
  std::optional<std::string> embed_model;
  std::optional<std::size_t> embed_dim;
  std::optional<int> t_max;
  bool no_consolidation = false;
  bool no_retrieval = false;
  bool no_shuffle = false;
  bool dump_prompts = false;
  std::optional<std::size_t> max_pool_size;
  std::optional<std::string> prompts_dir;
  std::optional<std::size_t> workers;
};

void add_run_options(CLI::App& app, Overrides& o) {
  app.add_option("-c,--config", o.config_path, "JSON run config");
  app.add_option("--run-dir", o.run_dir, "Directory for run artifacts");
  app.add_option("--seed", o.seed, "Run seed (task order, random retrieval)");
  app.add_option("-k,--k", o.k, "Strategies retrieved per episode");
  app.add_option("--retrieval", o.retrieval,
                 "cot | tfidf_content | tfidf_instruction | all | random | none");
  app.add_option("--pool", o.pool, "Initial pool file");
  app.add_option("--suite", o.suite, "\"builtin\" or a directory of task files");
  app.add_option("--suite-seed", o.suite_seed, "Seed of the builtin suite");
  app.add_option("--categories", o.categories, "Comma-separated task categories");
  app.add_option("--split", o.split, "seen | unseen");
  app.add_option("--limit", o.limit, "Number of tasks, taken round-robin by category");
  app.add_option("--backend", o.backend, "simulated | scripted | remote, for every role");
  app.add_option("--script", o.script, "Script file for the scripted backend");
  app.add_option("--chat-url", o.chat_url, "Chat-completions base URL");
  app.add_option("--chat-model", o.chat_model, "Chat model name");
  app.add_option("--embedder", o.embedder, "local | remote");
  app.add_option("--embed-url", o.embed_url, "Embeddings endpoint URL");
  app.add_option("--embed-model", o.embed_model, "Embedding model name");
  app.add_option("--embed-dim", o.embed_dim, "Embedding dimension");
  app.add_option("--t-max", o.t_max, "Step budget override");
  app.add_flag("--no-consolidation", o.no_consolidation, "Add insights without consolidation");
  app.add_flag("--no-retrieval", o.no_retrieval, "Never inject strategies");
  app.add_flag("--no-shuffle", o.no_shuffle, "Keep the suite order");
  app.add_flag("--dump-prompts", o.dump_prompts, "Write every prompt/reply pair");
  app.add_option("--max-pool-size", o.max_pool_size, "Evict beyond this many entries");
  app.add_option("--prompts-dir", o.prompts_dir, "Directory of prompt template overrides");
  app.add_option("--workers", o.workers, "Parallel episodes in frozen evaluation");
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, ',');) {
    part = text::trim(part);
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

RunConfig resolve(const Overrides& o, RunMode mode) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  c.mode = mode;
  if (o.run_dir) c.run_dir = *o.run_dir;
  if (o.seed) c.seed = *o.seed;
  if (o.k) c.k = *o.k;
  if (o.retrieval) {
    auto m = parse_retrieval_mode(*o.retrieval);
    if (!m) throw ConfigError("unknown retrieval mode \"" + *o.retrieval + "\"");
    c.retrieval_mode = *m;
  }
  if (o.pool) c.pool_path = *o.pool;
  if (o.suite) c.suite.source = *o.suite;
  if (o.suite_seed) c.suite.suite_seed = *o.suite_seed;
  if (o.categories) {
    c.suite.filter.categories.clear();
    for (const auto& name : split_commas(*o.categories)) {
      auto cat = parse_task_category(name);
      if (!cat) throw ConfigError("unknown task category \"" + name + "\"");
      c.suite.filter.categories.push_back(*cat);
    }
  }
  if (o.split) {
    auto s = parse_split(*o.split);
    if (!s) throw ConfigError("unknown split \"" + *o.split + "\"");
    c.suite.filter.split = *s;
  }
  if (o.limit) c.suite.filter.limit = *o.limit;
  for (auto* b : {&c.planner, &c.distiller, &c.consolidator}) {
    if (o.backend) b->kind = *o.backend;
    if (o.script) b->script_path = *o.script;
    if (o.chat_url) b->remote.base_url = *o.chat_url;
    if (o.chat_model) b->remote.model = *o.chat_model;
    if (b->kind != "simulated" && b->kind != "scripted" && b->kind != "remote") {
      throw ConfigError("backend must be simulated, scripted or remote");
    }
  }
  if (o.embedder) {
    if (*o.embedder != "local" && *o.embedder != "remote") {
      throw ConfigError("embedder must be local or remote");
    }
    c.embedder.kind = *o.embedder;
  }
  if (o.embed_url) c.embedder.remote.url = *o.embed_url;
  if (o.embed_model) c.embedder.remote.model = *o.embed_model;
  if (o.embed_dim) {
    c.embedder.remote.dim = *o.embed_dim;
    c.embedder.local.dim = *o.embed_dim;
  }
  if (o.t_max) c.t_max = *o.t_max;
  if (o.no_consolidation) c.disable_consolidation = true;
  if (o.no_retrieval) c.disable_retrieval = true;
  if (o.no_shuffle) c.shuffle = false;
  if (o.dump_prompts) c.dump_prompts = true;
  if (o.max_pool_size) c.max_pool_size = *o.max_pool_size;
  if (o.prompts_dir) c.prompts_dir = *o.prompts_dir;
  if (o.workers) c.workers = *o.workers;
  apply_env_overrides(c);
  c.validate();
  return c;
}

StrategyPool initial_pool(const RunConfig& c, const ModelSet& models) {
  return c.pool_path.empty() ? new_pool(models.embedder->dim()) : load_pool(c.pool_path);
}

void print_metrics(const std::string& label, const Metrics& m) {
  auto j = to_json(m);
  j.erase("per_category");
  std::cout << label << ": " << j.dump() << "\n";
}

void print_pool(const StrategyPool& pool, std::size_t limit) {
  std::cout << "pool version " << pool.version() << ", " << pool.size() << " entries, dim "
            << pool.dim() << "\n";
  std::size_t shown = 0;
  for (const auto& e : pool.entries()) {
    if (limit > 0 && shown++ >= limit) break;
    std::cout << "[" << e.id << "] (" << to_string(e.kind) << ") "
              << text::clip(e.content, 160) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiential strategy-pool agent runner"};
  app.require_subcommand(1);

  Overrides online_o, supervised_o, frozen_o, ablate_o;
  auto* online = app.add_subcommand("run-online", "Online learning over a task suite");
  add_run_options(*online, online_o);
  auto* supervised =
      app.add_subcommand("run-supervised", "Train with ground truth, then evaluate frozen");
  add_run_options(*supervised, supervised_o);
  auto* frozen = app.add_subcommand("eval-frozen", "Evaluate against a fixed pool");
  add_run_options(*frozen, frozen_o);
  auto* ablate = app.add_subcommand("ablate", "Run retrieval or component ablations");
  add_run_options(*ablate, ablate_o);
  std::string ablation_kind = "retrieval";
  ablate->add_option("--kind", ablation_kind, "retrieval | components")
      ->check(CLI::IsMember({"retrieval", "components"}));

  auto* tasks = app.add_subcommand("tasks", "Export or import task files");
  tasks->require_subcommand(1);
  std::string export_dir;
  std::uint64_t export_seed = 0;
  auto* tasks_export = tasks->add_subcommand("export", "Write the builtin suite as task files");
  tasks_export->add_option("--out", export_dir, "Output directory")->required();
  tasks_export->add_option("--suite-seed", export_seed, "Seed of the builtin suite");
  std::string import_dir;
  auto* tasks_import = tasks->add_subcommand("import", "Validate and summarize task files");
  tasks_import->add_option("dir", import_dir, "Directory of task files")->required();

  auto* pool = app.add_subcommand("pool", "Inspect a pool file");
  pool->require_subcommand(1);
  std::string pool_file;
  std::size_t show_limit = 0;
  auto* pool_show = pool->add_subcommand("show", "List entries");
  pool_show->add_option("file", pool_file, "Pool file")->required();
  pool_show->add_option("--limit", show_limit, "Show at most this many entries");
  auto* pool_stats = pool->add_subcommand("stats", "Summary counts");
  pool_stats->add_option("file", pool_file, "Pool file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (online->parsed()) {
      const RunConfig c = resolve(online_o, RunMode::online);
      const auto suite = load_suite(c.suite);
      const ModelSet models = build_models(c, suite);
      const auto result = run_online(c, suite, models, initial_pool(c, models));
      print_metrics("online", result.metrics);
      std::cout << "pool: " << result.pool.size() << " entries, version "
                << result.pool.version() << "\n";
    } else if (supervised->parsed()) {
      const RunConfig c = resolve(supervised_o, RunMode::supervised);
      const auto suite = load_suite(c.suite);
      const ModelSet models = build_models(c, suite);
      const auto result = run_supervised(c, suite, models, initial_pool(c, models));
      print_metrics("train", result.train.metrics);
      print_metrics("eval", result.eval.metrics);
      std::cout << category_table_csv(result.eval.metrics);
      if (!result.train.skipped.empty()) {
        std::cout << "skipped " << result.train.skipped.size() << " task(s) without oracle\n";
      }
    } else if (frozen->parsed()) {
      const RunConfig c = resolve(frozen_o, RunMode::eval_frozen);
      const auto suite = load_suite(c.suite);
      const ModelSet models = build_models(c, suite);
      const auto result = run_eval_frozen(c, suite, models, load_pool(c.pool_path));
      print_metrics("eval", result.metrics);
      std::cout << category_table_csv(result.metrics);
    } else if (ablate->parsed()) {
      const RunConfig c = resolve(ablate_o, RunMode::online);
      const auto suite = load_suite(c.suite);
      const auto kind =
          ablation_kind == "components" ? AblationKind::components : AblationKind::retrieval;
      const auto result =
          run_ablation(c, kind, suite, [&] { return build_models(c, suite); });
      std::cout << ablation_table_csv(result);
    } else if (tasks_export->parsed()) {
      const auto suite = builtin_suites(export_seed);
      export_tasks(suite, export_dir);
      std::cout << "wrote " << suite.size() << " tasks to " << export_dir << "\n";
    } else if (tasks_import->parsed()) {
      const auto suite = import_tasks(import_dir);
      std::map<std::string, int> counts;
      for (const auto& t : suite) ++counts[std::string(to_string(t.category))];
      std::cout << suite.size() << " valid tasks\n";
      for (const auto& [name, n] : counts) std::cout << "  " << name << ": " << n << "\n";
    } else if (pool_show->parsed()) {
      print_pool(load_pool(pool_file), show_limit);
    } else if (pool_stats->parsed()) {
      const StrategyPool p = load_pool(pool_file);
      std::map<std::string, int> kinds;
      for (const auto& e : p.entries()) ++kinds[std::string(to_string(e.kind))];
      std::cout << "version " << p.version() << "\nentries " << p.size() << "\ndim "
                << p.dim() << "\nnext_id " << p.next_id() << "\n";
      for (const auto& [name, n] : kinds) std::cout << "kind " << name << " " << n << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
