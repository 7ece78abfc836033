#pragma once

#include <chrono>
#include <memory>
#include <random>
#include <vector>

#include "elite/embed.hpp"
#include "elite/gridhouse.hpp"
#include "elite/harness.hpp"
#include "elite/http_client.hpp"
#include "elite/model_backend.hpp"
#include "elite/strategy_pool.hpp"

namespace elite::test {

Vector random_unit(std::mt19937_64& rng, std::size_t dim);

// Pool of n entries with random unit embeddings and ids 1..n.
StrategyPool random_pool(std::mt19937_64& rng, std::size_t dim, std::size_t n);

// HttpOptions whose sleep records the requested delays instead of sleeping.
HttpOptions recording_http(std::vector<std::chrono::milliseconds>& delays);

// Small kitchen with a counter, a table and a sink with a faucet.
WorldState sink_world();

// Two-task cross-task transfer scenario. The teach task cleans a spatula the
// right way and distills "put objects in sink before cleaning"; the test
// task only places its plate in the sink when that strategy is in the
// prompt.
struct TransferFixture {
  TaskSpec teach;
  TaskSpec test;
  std::string lesson;  // content of the distilled strategy

  // A fresh scripted backend shared by all three roles.
  std::shared_ptr<ScriptedBackend> backend() const;
  ModelSet models() const;
};

TransferFixture transfer_fixture();

}  // namespace elite::test
