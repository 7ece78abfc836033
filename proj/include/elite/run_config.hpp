#pragma once

#include <filesystem>

#include <json.hpp>

#include "elite/harness.hpp"

namespace elite {

// JSON config file. Unknown keys are a ConfigError, so typos fail loudly.
// Example:
//   {"mode": "online", "retrieval_mode": "cot", "k": 4, "seed": 7,
//    "suite": {"source": "builtin", "limit": 50},
//    "planner": {"kind": "remote", "base_url": "http://localhost:8000/v1",
//                "model": "qwen2.5-vl-72b"},
//    "embedder": {"kind": "remote", "url": "http://localhost:8001/v1/embeddings"}}
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

// Round-trips through config_from_json. API keys are never written.
nlohmann::ordered_json to_json(const RunConfig& config);

// ELITE_CHAT_API_KEY fills empty chat keys, ELITE_EMBED_API_KEY the embedder
// key.
void apply_env_overrides(RunConfig& config);

// Tasks named by config.suite.
std::vector<TaskSpec> load_suite(const SuiteSelection& suite);

// Backends named by the config. The simulated backend is built over `tasks`.
// Throws ConfigError.
ModelSet build_models(const RunConfig& config, const std::vector<TaskSpec>& tasks);

}  // namespace elite
