#include <doctest.h>

#include "elite/consolidation.hpp"
#include "elite/error.hpp"
#include "elite/text.hpp"

using namespace elite;

namespace {

const LocalHashEmbedder kEmbedder(LocalHashEmbedderConfig{32, 3});
const EpisodeContext kContext{"- go to the sink\n- clean it", "Clean the plate."};

StrategyPool pool_with(std::vector<std::pair<InsightKind, std::string>> items) {
  std::vector<DeltaOp> ops;
  for (auto& [kind, content] : items) ops.emplace_back(AddOp{content, kind, "trace", "instr"});
  return apply_delta(new_pool(32), ops, 1, kEmbedder).pool;
}

Reflection failure_reflection() {
  Reflection r;
  r.task_id = "t";
  r.outcome = Outcome::failure;
  r.insights = {{InsightKind::avoidance_guideline, "Open the fridge before placing."},
                {InsightKind::failure_summary, "The fridge was closed."}};
  return r;
}

}  // namespace

TEST_CASE("pool and insight rendering") {
  CHECK(render_pool_for_prompt(new_pool(32)) == "(empty)");
  const auto pool = pool_with({{InsightKind::raw, "line one\nline two"},
                               {InsightKind::success_pattern, std::string(900, 'z')}});
  const auto rendered = render_pool_for_prompt(pool);
  const auto lines = text::split_lines(rendered);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "[1] (raw) line one line two");
  CHECK(lines[1].starts_with("[2] (success_pattern) zzz"));
  CHECK(lines[1].size() < 600);

  CHECK(render_insights(failure_reflection()) ==
        "Outcome: failure\n- (avoidance_guideline) Open the fridge before placing.\n"
        "- (failure_summary) The fridge was closed.");
}

TEST_CASE("op parsing validates against the snapshot") {
  const auto pool = pool_with({{InsightKind::raw, "a"}, {InsightKind::raw, "b"}});
  const auto parsed = parse_ops(R"(```json
{"ops": [
  {"op": "add", "kind": "avoidance_guideline", "content": "new"},
  {"op": "revise", "id": 1, "content": "a2"},
  {"op": "Remove", "target_id": "2"},
  {"op": "remove", "id": 9},
  {"op": "revise", "content": "x"},
  {"op": "add", "content": "  "},
  {"op": "add", "kind": "hunch", "content": "y"},
  {"op": "merge", "id": 1},
  "nonsense"
], "rationale": "tidy"}
```)",
                                pool, kContext);
  REQUIRE(parsed);
  REQUIRE(parsed->proposed.size() == 3);
  CHECK(std::get<AddOp>(parsed->proposed[0]) ==
        AddOp{"new", InsightKind::avoidance_guideline, kContext.plan_trace, kContext.instruction});
  CHECK(std::get<ReviseOp>(parsed->proposed[1]) == ReviseOp{1, "a2", std::nullopt});
  CHECK(std::get<RemoveOp>(parsed->proposed[2]) == RemoveOp{2});
  CHECK(parsed->rationale == "tidy");
  std::vector<std::string> reasons;
  for (const auto& r : parsed->rejected) reasons.push_back(r.reason);
  CHECK(reasons == std::vector<std::string>{"unknown id", "missing id", "empty content",
                                            "unknown kind", "unknown op", "not an object"});

  CHECK_FALSE(parse_ops("nothing", pool, kContext));
  CHECK_FALSE(parse_ops(R"({"ops": 3})", pool, kContext));
  const auto empty = parse_ops(R"({"ops": []})", pool, kContext);
  REQUIRE(empty);
  CHECK(empty->proposed.empty());
}

TEST_CASE("propose_deltas falls back to one add per insight") {
  const auto prompts = PromptSet::defaults();
  const auto pool = new_pool(32);
  int calls = 0;
  std::string seen;
  FunctionBackend garbage([&](const ChatRequest& r) {
    ++calls;
    seen = r.last_user_message();
    return std::string("ok");
  });
  const auto r = propose_deltas(failure_reflection(), pool, kContext, garbage, prompts);
  CHECK(calls == kConsolidationParseRetries + 1);
  CHECK(r.fallback);
  CHECK(r.proposed == adds_for(failure_reflection(), kContext));
  CHECK(text::contains(seen, "(avoidance_guideline) Open the fridge"));

  FunctionBackend down([](const ChatRequest&) -> std::string { throw TransportError("x", 502); });
  const auto d = propose_deltas(failure_reflection(), pool, kContext, down, prompts);
  CHECK(d.fallback);
  CHECK(text::contains(d.fallback_reason, "backend failed"));

  Reflection none;
  CHECK_THROWS_AS(propose_deltas(none, pool, kContext, garbage, prompts), InvalidArgument);
}

TEST_CASE("consolidate applies the proposal") {
  const auto prompts = PromptSet::defaults();
  const auto pool = pool_with({{InsightKind::failure_summary, "old"}});
  std::string seen;
  FunctionBackend b([&](const ChatRequest& r) {
    seen = r.last_user_message();
    return std::string(
        R"({"ops": [{"op": "revise", "id": 1, "content": "better"},
                    {"op": "add", "kind": "avoidance_guideline", "content": "fresh"}]})");
  });
  const auto [next, report] =
      consolidate(failure_reflection(), pool, 2, kContext, b, kEmbedder, prompts);
  CHECK(seen.starts_with("Update the strategy pool"));
  CHECK(text::contains(seen, "[1] (failure_summary) old"));
  CHECK_FALSE(report.skipped);
  CHECK(report.added_ids == std::vector<EntryId>{2});
  CHECK(next.size() == 2);
  CHECK(next.find(1)->content == "better");
  CHECK(next.find(1)->revised_episode == 2);
  CHECK(next.find(2)->plan_trace == kContext.plan_trace);
  CHECK(next.version() == pool.version() + 1);
  CHECK(next.check_invariants().empty());

  const auto [same, skipped] =
      consolidate(std::nullopt, pool, 2, kContext, b, kEmbedder, prompts);
  CHECK(skipped.skipped);
  CHECK(same == pool);
}
