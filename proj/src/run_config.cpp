#include "elite/run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "elite/error.hpp"
#include "elite/simulated_model.hpp"

namespace elite {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (allowed.count(key) == 0) {
      throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

void read_ms(const json& j, const char* key, std::chrono::milliseconds& out,
             const std::string& where) {
  long long v = out.count();
  read(j, key, v, where);
  if (v < 0) throw ConfigError(where + "." + key + " must not be negative");
  out = std::chrono::milliseconds(v);
}

void read_http(const json& j, HttpOptions& http, const std::string& where) {
  read_ms(j, "timeout_ms", http.timeout, where);
  read(j, "max_retries", http.max_retries, where);
  read_ms(j, "initial_backoff_ms", http.initial_backoff, where);
  if (http.max_retries < 0) throw ConfigError(where + ".max_retries must not be negative");
}

const std::set<std::string> kBackendKeys = {"kind",        "script",      "base_url",
                                            "model",       "api_key",     "max_in_flight",
                                            "timeout_ms",  "max_retries", "initial_backoff_ms"};

void read_backend(const json& j, BackendConfig& b, const std::string& where) {
  check_keys(j, where, kBackendKeys);
  read(j, "kind", b.kind, where);
  read(j, "script", b.script_path, where);
  read(j, "base_url", b.remote.base_url, where);
  read(j, "model", b.remote.model, where);
  read(j, "api_key", b.remote.api_key, where);
  read(j, "max_in_flight", b.remote.max_in_flight, where);
  read_http(j, b.remote.http, where);
  if (b.kind != "simulated" && b.kind != "scripted" && b.kind != "remote") {
    throw ConfigError(where + ".kind must be simulated, scripted or remote");
  }
}

nlohmann::ordered_json backend_json(const BackendConfig& b) {
  nlohmann::ordered_json j;
  j["kind"] = b.kind;
  if (b.kind == "scripted") j["script"] = b.script_path;
  if (b.kind == "remote") {
    j["base_url"] = b.remote.base_url;
    j["model"] = b.remote.model;
    j["max_in_flight"] = b.remote.max_in_flight;
    j["timeout_ms"] = b.remote.http.timeout.count();
    j["max_retries"] = b.remote.http.max_retries;
    j["initial_backoff_ms"] = b.remote.http.initial_backoff.count();
  }
  return j;
}

}  // namespace

RunConfig config_from_json(const json& j) {
  check_keys(j, "config",
             {"mode", "retrieval_mode", "k", "seed", "pool_path", "run_dir", "suite", "backend",
              "planner", "distiller", "consolidator", "embedder", "t_max",
              "disable_consolidation", "disable_retrieval", "shuffle", "dump_prompts",
              "max_pool_size", "prompts_dir", "workers"});
  RunConfig c;
  const std::string where = "config";
  std::string mode = std::string(to_string(c.mode));
  read(j, "mode", mode, where);
  if (auto m = parse_run_mode(mode)) {
    c.mode = *m;
  } else {
    throw ConfigError("unknown mode \"" + mode + "\"");
  }
  std::string retrieval = std::string(to_string(c.retrieval_mode));
  read(j, "retrieval_mode", retrieval, where);
  if (auto m = parse_retrieval_mode(retrieval)) {
    c.retrieval_mode = *m;
  } else {
    throw ConfigError("unknown retrieval_mode \"" + retrieval + "\"");
  }
  long long k = static_cast<long long>(c.k);
  read(j, "k", k, where);
  if (k < 1) throw ConfigError("k must be at least 1");
  c.k = static_cast<std::size_t>(k);
  read(j, "seed", c.seed, where);
  read(j, "pool_path", c.pool_path, where);
  read(j, "run_dir", c.run_dir, where);

  if (const auto it = j.find("suite"); it != j.end()) {
    const std::string w = "suite";
    check_keys(*it, w, {"source", "seed", "categories", "split", "limit"});
    read(*it, "source", c.suite.source, w);
    read(*it, "seed", c.suite.suite_seed, w);
    std::vector<std::string> categories;
    read(*it, "categories", categories, w);
    for (const auto& name : categories) {
      auto cat = parse_task_category(name);
      if (!cat) throw ConfigError("unknown task category \"" + name + "\"");
      c.suite.filter.categories.push_back(*cat);
    }
    std::string split;
    read(*it, "split", split, w);
    if (!split.empty()) {
      auto s = parse_split(split);
      if (!s) throw ConfigError("unknown split \"" + split + "\"");
      c.suite.filter.split = *s;
    }
    if (it->contains("limit") && !(*it)["limit"].is_null()) {
      long long limit = 0;
      read(*it, "limit", limit, w);
      if (limit < 0) throw ConfigError("suite.limit must not be negative");
      c.suite.filter.limit = static_cast<std::size_t>(limit);
    }
  }

  // "backend" configures all three roles; role keys override it.
  if (const auto it = j.find("backend"); it != j.end()) {
    read_backend(*it, c.planner, "backend");
    c.distiller = c.planner;
    c.consolidator = c.planner;
  }
  if (const auto it = j.find("planner"); it != j.end()) read_backend(*it, c.planner, "planner");
  if (const auto it = j.find("distiller"); it != j.end()) {
    read_backend(*it, c.distiller, "distiller");
  }
  if (const auto it = j.find("consolidator"); it != j.end()) {
    read_backend(*it, c.consolidator, "consolidator");
  }

  if (const auto it = j.find("embedder"); it != j.end()) {
    const std::string w = "embedder";
    check_keys(*it, w,
               {"kind", "dim", "ngram", "url", "model", "api_key", "max_in_flight", "timeout_ms",
                "max_retries", "initial_backoff_ms"});
    read(*it, "kind", c.embedder.kind, w);
    if (c.embedder.kind == "local") {
      read(*it, "dim", c.embedder.local.dim, w);
      read(*it, "ngram", c.embedder.local.ngram, w);
    } else if (c.embedder.kind == "remote") {
      read(*it, "dim", c.embedder.remote.dim, w);
      read(*it, "url", c.embedder.remote.url, w);
      read(*it, "model", c.embedder.remote.model, w);
      read(*it, "api_key", c.embedder.remote.api_key, w);
      read(*it, "max_in_flight", c.embedder.remote.max_in_flight, w);
      read_http(*it, c.embedder.remote.http, w);
    } else {
      throw ConfigError("embedder.kind must be local or remote");
    }
  }

  if (j.contains("t_max") && !j["t_max"].is_null()) {
    int t = 0;
    read(j, "t_max", t, where);
    c.t_max = t;
  }
  read(j, "disable_consolidation", c.disable_consolidation, where);
  read(j, "disable_retrieval", c.disable_retrieval, where);
  read(j, "shuffle", c.shuffle, where);
  read(j, "dump_prompts", c.dump_prompts, where);
  read(j, "max_pool_size", c.max_pool_size, where);
  read(j, "prompts_dir", c.prompts_dir, where);
  read(j, "workers", c.workers, where);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["mode"] = std::string(to_string(c.mode));
  j["retrieval_mode"] = std::string(to_string(c.retrieval_mode));
  j["k"] = c.k;
  j["seed"] = c.seed;
  j["pool_path"] = c.pool_path;
  j["run_dir"] = c.run_dir;
  nlohmann::ordered_json suite;
  suite["source"] = c.suite.source;
  suite["seed"] = c.suite.suite_seed;
  std::vector<std::string> categories;
  for (auto cat : c.suite.filter.categories) categories.emplace_back(to_string(cat));
  suite["categories"] = categories;
  suite["split"] = c.suite.filter.split ? json(std::string(to_string(*c.suite.filter.split)))
                                        : json(nullptr);
  suite["limit"] = c.suite.filter.limit ? json(*c.suite.filter.limit) : json(nullptr);
  j["suite"] = suite;
  j["planner"] = backend_json(c.planner);
  j["distiller"] = backend_json(c.distiller);
  j["consolidator"] = backend_json(c.consolidator);
  nlohmann::ordered_json embedder;
  embedder["kind"] = c.embedder.kind;
  if (c.embedder.kind == "local") {
    embedder["dim"] = c.embedder.local.dim;
    embedder["ngram"] = c.embedder.local.ngram;
  } else {
    embedder["dim"] = c.embedder.remote.dim;
    embedder["url"] = c.embedder.remote.url;
    embedder["model"] = c.embedder.remote.model;
    embedder["max_in_flight"] = c.embedder.remote.max_in_flight;
    embedder["timeout_ms"] = c.embedder.remote.http.timeout.count();
    embedder["max_retries"] = c.embedder.remote.http.max_retries;
    embedder["initial_backoff_ms"] = c.embedder.remote.http.initial_backoff.count();
  }
  j["embedder"] = embedder;
  j["t_max"] = c.t_max ? json(*c.t_max) : json(nullptr);
  j["disable_consolidation"] = c.disable_consolidation;
  j["disable_retrieval"] = c.disable_retrieval;
  j["shuffle"] = c.shuffle;
  j["dump_prompts"] = c.dump_prompts;
  j["max_pool_size"] = c.max_pool_size;
  j["prompts_dir"] = c.prompts_dir;
  j["workers"] = c.workers;
  return j;
}

void apply_env_overrides(RunConfig& config) {
  if (const char* key = std::getenv("ELITE_CHAT_API_KEY"); key != nullptr && *key != '\0') {
    for (auto* b : {&config.planner, &config.distiller, &config.consolidator}) {
      if (b->remote.api_key.empty()) b->remote.api_key = key;
    }
  }
  if (const char* key = std::getenv("ELITE_EMBED_API_KEY"); key != nullptr && *key != '\0') {
    if (config.embedder.remote.api_key.empty()) config.embedder.remote.api_key = key;
  }
}

std::vector<TaskSpec> load_suite(const SuiteSelection& suite) {
  std::vector<TaskSpec> all = suite.source == "builtin" ? builtin_suites(suite.suite_seed)
                                                        : import_tasks(suite.source);
  return select_tasks(all, suite.filter);
}

namespace {

std::shared_ptr<ChatBackend> make_backend(const BackendConfig& b,
                                          const std::vector<TaskSpec>& tasks,
                                          std::shared_ptr<ChatBackend>& simulated) {
  if (b.kind == "simulated") {
    if (!simulated) simulated = std::make_shared<SimulatedModel>(tasks);
    return simulated;
  }
  if (b.kind == "scripted") {
    if (b.script_path.empty()) throw ConfigError("scripted backend needs a script path");
    return std::shared_ptr<ChatBackend>(ScriptedBackend::from_file(b.script_path));
  }
  if (b.remote.base_url.empty()) throw ConfigError("remote backend needs base_url");
  if (b.remote.model.empty()) throw ConfigError("remote backend needs model");
  return std::make_shared<RemoteChatBackend>(b.remote);
}

}  // namespace

ModelSet build_models(const RunConfig& config, const std::vector<TaskSpec>& tasks) {
  ModelSet m;
  std::shared_ptr<ChatBackend> simulated;
  m.planner = make_backend(config.planner, tasks, simulated);
  // Roles with identical scripted configs share one backend so consume-once
  // rules behave as a single script.
  auto same = [](const BackendConfig& a, const BackendConfig& b) {
    return a.kind == b.kind && a.script_path == b.script_path &&
           a.remote.base_url == b.remote.base_url && a.remote.model == b.remote.model;
  };
  m.distiller = same(config.distiller, config.planner)
                    ? m.planner
                    : make_backend(config.distiller, tasks, simulated);
  m.consolidator = same(config.consolidator, config.planner)     ? m.planner
                   : same(config.consolidator, config.distiller) ? m.distiller
                                                                 : make_backend(
                                                                       config.consolidator,
                                                                       tasks, simulated);
  if (config.embedder.kind == "remote") {
    if (config.embedder.remote.url.empty()) throw ConfigError("remote embedder needs url");
    m.embedder = std::make_shared<RemoteEmbedder>(config.embedder.remote);
  } else {
    m.embedder = std::make_shared<LocalHashEmbedder>(config.embedder.local);
  }
  return m;
}

}  // namespace elite
