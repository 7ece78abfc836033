#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "elite/error.hpp"
#include "elite/strategy_pool.hpp"
#include "support/fixtures.hpp"

using namespace elite;

namespace {

std::vector<DeltaOp> ops(std::initializer_list<DeltaOp> list) { return list; }

StrategyPool two_entries(const Embedder& e) {
  auto r = apply_delta(new_pool(e.dim()),
                       ops({AddOp{"check sink first", InsightKind::success_pattern, "plan one", "i1"},
                            AddOp{"heat in microwave", InsightKind::repeatable_steps, "plan two", "i2"}}),
                       1, e);
  return r.pool;
}

}  // namespace

TEST_CASE("new_pool") {
  const auto p = new_pool(256);
  CHECK(p.empty());
  CHECK(p.dim() == 256);
  CHECK(p.next_id() == 1);
  CHECK(p.version() == 0);
  CHECK(new_pool(1024).dim() == 1024);
  CHECK_THROWS_AS(new_pool(0), InvalidArgument);
}

TEST_CASE("single add") {
  LocalHashEmbedder e;
  auto r = apply_delta(new_pool(256),
                       ops({AddOp{"check sink first", InsightKind::success_pattern, "p", ""}}), 1, e);
  REQUIRE(r.pool.size() == 1);
  CHECK(r.pool.entries()[0].id == 1);
  CHECK(r.pool.version() == 1);
  CHECK(r.added_ids == std::vector<EntryId>{1});
  CHECK(r.pool.entries()[0].embedding == e.embed("p"));
}

TEST_CASE("remove then revise in one batch") {
  LocalHashEmbedder e;
  const auto before = two_entries(e);
  auto r = apply_delta(before,
                       ops({RemoveOp{2}, ReviseOp{1, "open microwave before heating", std::nullopt}}),
                       5, e);
  REQUIRE(r.pool.size() == 1);
  const auto& entry = r.pool.entries()[0];
  CHECK(entry.id == 1);
  CHECK(entry.content == "open microwave before heating");
  CHECK(entry.revised_episode == 5);
  CHECK(entry.kind == InsightKind::success_pattern);
  CHECK(entry.embedding == before.entries()[0].embedding);
  CHECK(entry.plan_trace == before.entries()[0].plan_trace);
  CHECK(r.pool.version() == before.version() + 1);
  CHECK(r.rejected.empty());
}

TEST_CASE("unknown revise target is rejected and the version still advances") {
  LocalHashEmbedder e;
  auto p = apply_delta(new_pool(256), ops({AddOp{"a", InsightKind::raw, "p", ""}}), 1, e).pool;
  auto r = apply_delta(p, ops({ReviseOp{9, "x", std::nullopt}}), 2, e);
  CHECK(r.pool.entries() == p.entries());
  CHECK(r.pool.version() == p.version() + 1);
  REQUIRE(r.rejected.size() == 1);
  CHECK(r.rejected[0].reason == "unknown id");
}

TEST_CASE("invalid ops are rejected with reasons") {
  LocalHashEmbedder e;
  const auto p = two_entries(e);
  auto r = apply_delta(p,
                       ops({AddOp{"   ", InsightKind::raw, "p", ""}, AddOp{"x", InsightKind::raw, " ", ""},
                            ReviseOp{1, "\n", std::nullopt}, RemoveOp{0}, RemoveOp{77}}),
                       3, e);
  REQUIRE(r.rejected.size() == 5);
  CHECK(r.rejected[0].reason == "empty content");
  CHECK(r.rejected[1].reason == "missing plan trace");
  CHECK(r.rejected[2].reason == "empty content");
  CHECK(r.rejected[3].reason == "unknown id");
  CHECK(r.rejected[4].reason == "unknown id");
  CHECK(r.pool.size() == 2);
}

TEST_CASE("content is trimmed and capped") {
  LocalHashEmbedder e;
  auto r = apply_delta(new_pool(256),
                       ops({AddOp{"  " + std::string(3000, 'x') + "  ", InsightKind::raw, "p", ""}}), 1, e);
  CHECK(r.pool.entries()[0].content.size() == kMaxEntryContent);
}

TEST_CASE("ids are never reused after removal") {
  LocalHashEmbedder e;
  auto p = two_entries(e);
  p = apply_delta(p, ops({RemoveOp{2}}), 2, e).pool;
  auto r = apply_delta(p, ops({AddOp{"new", InsightKind::raw, "p", ""}}), 3, e);
  CHECK(r.added_ids == std::vector<EntryId>{3});
}

TEST_CASE("duplicate content is still added") {
  LocalHashEmbedder e;
  auto p = two_entries(e);
  auto r = apply_delta(p, ops({AddOp{"check sink first", InsightKind::success_pattern, "plan one", ""}}), 2, e);
  CHECK(r.pool.size() == 3);
}

TEST_CASE("embedder dimension mismatch is a config error") {
  LocalHashEmbedder e(LocalHashEmbedderConfig{64, 3});
  CHECK_THROWS_AS(apply_delta(new_pool(256), ops({}), 1, e), ConfigError);
}

TEST_CASE("size cap evicts the least recently retrieved entry") {
  LocalHashEmbedder e;
  auto p = apply_delta(new_pool(256),
                       ops({AddOp{"a", InsightKind::raw, "p", ""}, AddOp{"b", InsightKind::raw, "p", ""}}),
                       1, e).pool;
  const std::vector<EntryId> used{1};
  p.mark_retrieved(used, 2);
  auto r = apply_delta(p, ops({AddOp{"c", InsightKind::raw, "p", ""}}), 2, e, ApplyOptions{2});
  CHECK(r.evicted_ids == std::vector<EntryId>{2});
  CHECK(r.pool.size() == 2);
  CHECK(r.pool.contains(1));
  CHECK(r.pool.contains(3));
}

TEST_CASE("save and load round-trip bit-exactly") {
  LocalHashEmbedder e;
  auto p = two_entries(e);
  p = apply_delta(p, ops({AddOp{"third \"quoted\"\nline", InsightKind::avoidance_guideline, "plan 3", "i3"}}), 2, e).pool;
  const std::vector<EntryId> used{2};
  p.mark_retrieved(used, 2);
  const auto path = std::filesystem::temp_directory_path() / "elite_pool_roundtrip.jsonl";
  save_pool(p, path);
  const auto q = load_pool(path);
  CHECK(q == p);
  CHECK(serialize_pool(q) == serialize_pool(p));
  std::filesystem::remove(path);
}

TEST_CASE("load errors cite the offending line") {
  LocalHashEmbedder e;
  const auto p = two_entries(e);
  std::string text = serialize_pool(p);
  // Shorten the first entry's embedding to 255 values.
  auto j = nlohmann::json::parse(text.substr(text.find('\n') + 1, text.find('\n', text.find('\n') + 1) - text.find('\n') - 1));
  j["embedding"].erase(j["embedding"].size() - 1);
  const std::string header = text.substr(0, text.find('\n'));
  const std::string broken = header + "\n" + j.dump() + "\n";
  try {
    parse_pool(broken);
    FAIL("expected a load error");
  } catch (const LoadError& err) {
    CHECK(err.line() == 2);
  }
}

TEST_CASE("a header-only file loads as an empty pool") {
  const auto p = new_pool(16);
  const auto q = parse_pool(serialize_pool(p));
  CHECK(q.empty());
  CHECK(q.dim() == 16);
  CHECK_THROWS_AS(parse_pool(""), LoadError);
  CHECK_THROWS_AS(load_pool("/nonexistent/pool.jsonl"), LoadError);
}

TEST_CASE("random op sequences keep every invariant") {
  std::mt19937_64 rng(11);
  LocalHashEmbedder e(LocalHashEmbedderConfig{32, 3});
  for (int trial = 0; trial < 100; ++trial) {
    auto pool = new_pool(32);
    for (int step = 1; step <= 5; ++step) {
      std::vector<DeltaOp> batch;
      const auto n = rng() % 6;
      for (std::size_t i = 0; i < n; ++i) {
        const auto id = static_cast<EntryId>(rng() % (pool.next_id() + 2));
        switch (rng() % 3) {
          case 0:
            batch.push_back(AddOp{rng() % 5 ? "s" + std::to_string(rng() % 9) : "", InsightKind::raw,
                                  "plan " + std::to_string(rng() % 4), ""});
            break;
          case 1:
            batch.push_back(ReviseOp{id, "r", std::nullopt});
            break;
          default:
            batch.push_back(RemoveOp{id});
        }
      }
      auto r = apply_delta(pool, batch, step, e);
      CHECK(r.pool.check_invariants().empty());
      CHECK(r.pool.version() == step);
      pool = r.pool;
    }
  }
}
