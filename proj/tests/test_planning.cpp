#include <doctest.h>

#include "elite/error.hpp"
#include "elite/planning.hpp"
#include "elite/text.hpp"
#include "support/fixtures.hpp"

using namespace elite;

namespace {

Observation sample_observation() {
  return {"You are at the counter. On the counter: plate.",
          {Action::go_to("sink"), Action::pick("plate"), Action::place("plate", "counter"),
           Action::noop()}};
}

ScoredEntry scored(EntryId id, InsightKind kind, std::string content) {
  StrategyEntry e;
  e.id = id;
  e.kind = kind;
  e.content = std::move(content);
  return {e, 1.0};
}

}  // namespace

TEST_CASE("bullets in several list styles") {
  CHECK(split_bullets("- a\n* b\n\xE2\x80\xA2 c\n1. d\n2) e") ==
        std::vector<std::string>{"a", "b", "c", "d", "e"});
  CHECK(split_bullets("Plan:\n- one\n- two") == std::vector<std::string>{"one", "two"});
  CHECK(split_bullets("first line\n\nsecond line") ==
        std::vector<std::string>{"first line", "second line"});
  CHECK(split_bullets("```\n- x\n```") == std::vector<std::string>{"x"});
  CHECK(split_bullets("").empty());
}

TEST_CASE("plans are clamped to 3..6 bullets") {
  auto short_plan = normalize_plan("- go to the sink", "Clean the plate.");
  CHECK(short_plan.bullets.size() == kMinPlanBullets);
  CHECK(short_plan.padded);
  CHECK(short_plan.bullets[0] == "go to the sink");
  CHECK(short_plan.raw_text == "- go to the sink");

  auto long_plan = normalize_plan("- 1\n- 2\n- 3\n- 4\n- 5\n- 6\n- 7\n- 8", "x");
  CHECK(long_plan.bullets.size() == kMaxPlanBullets);
  CHECK(long_plan.truncated);
  CHECK_FALSE(long_plan.padded);
}

TEST_CASE("coarse_plan renders the instruction and degrades on failure") {
  const auto prompts = PromptSet::defaults();
  std::string seen;
  FunctionBackend ok([&](const ChatRequest& r) {
    seen = r.last_user_message();
    return "- a\n- b\n- c\n- d";
  });
  auto plan = coarse_plan("Clean the plate.", sample_observation(), ok, prompts);
  CHECK(plan.bullets.size() == 4);
  CHECK_FALSE(plan.degraded);
  CHECK(seen.starts_with("Write a coarse plan"));
  CHECK(text::contains(seen, "Clean the plate."));

  FunctionBackend down([](const ChatRequest&) -> std::string { throw TransportError("down", 503); });
  auto degraded = coarse_plan("Clean the plate.", sample_observation(), down, prompts);
  CHECK(degraded.degraded);
  CHECK(degraded.raw_text == "Clean the plate.");
  CHECK(degraded.bullets == std::vector<std::string>{"Clean the plate."});

  FunctionBackend empty([](const ChatRequest&) { return std::string("  \n"); });
  CHECK(coarse_plan("x", sample_observation(), empty, prompts).degraded);
}

TEST_CASE("strategy section formatting") {
  CHECK(format_strategy_section({}) == "No prior strategies are available for this task.");
  const auto s = format_strategy_section(
      {scored(1, InsightKind::avoidance_guideline, "Put it in the sink first."),
       scored(2, InsightKind::success_pattern, "Turn the faucet on last.")});
  CHECK(text::contains(s, "\nStrategy (avoidance_guideline): Put it in the sink first."));
  CHECK(text::contains(s, "\nStrategy (success_pattern): Turn the faucet on last."));
}

TEST_CASE("action matching is lenient about case, spaces and chatter") {
  const auto catalog = sample_observation().catalog;
  CHECK(match_action("pick(plate)", catalog) == Action::pick("plate"));
  CHECK(match_action("  Place(Plate,Counter) ", catalog) == Action::place("plate", "counter"));
  CHECK(match_action("I will goto(sink) now.", catalog) == Action::go_to("sink"));
  CHECK_FALSE(match_action("fly away", catalog));
  CHECK_FALSE(match_action("pick(mug)", catalog));
}

TEST_CASE("next_action prompt content") {
  const auto prompts = PromptSet::defaults();
  std::string seen;
  int max_tokens = 0;
  FunctionBackend b([&](const ChatRequest& r) {
    seen = r.last_user_message();
    max_tokens = r.max_tokens;
    return "pick(plate)";
  });
  const auto strategies = RetrievedSet{scored(7, InsightKind::raw, "Mind the sink.")};
  const auto choice = next_action("Clean the plate.", {}, sample_observation(), 1, 30,
                                  strategies, b, prompts);
  CHECK(choice.action == Action::pick("plate"));
  CHECK(choice.attempts == 1);
  CHECK_FALSE(choice.unparseable);
  CHECK(max_tokens == 64);
  CHECK(seen.starts_with("Choose the next action"));
  CHECK(text::contains(seen, "Instruction: Clean the plate."));
  CHECK(text::contains(seen, "Current step: 1 of 30"));
  CHECK(text::contains(seen, "Strategy (raw): Mind the sink."));
  CHECK(text::contains(seen, "(no actions yet)"));
  CHECK(text::contains(seen, "Valid actions:"));
  CHECK(text::contains(seen, "place(plate, counter)"));
}

TEST_CASE("next_action retries then falls back to noop") {
  const auto prompts = PromptSet::defaults();
  std::vector<std::string> prompts_seen;
  FunctionBackend bad([&](const ChatRequest& r) {
    prompts_seen.push_back(r.last_user_message());
    return std::string("dance");
  });
  const auto choice = next_action("x", {}, sample_observation(), 2, 30, {}, bad, prompts);
  CHECK(choice.unparseable);
  CHECK(choice.action == Action::noop());
  CHECK(choice.attempts == kActionParseRetries + 1);
  REQUIRE(prompts_seen.size() == 3);
  CHECK_FALSE(text::contains(prompts_seen[0], "is not one of the valid actions"));
  CHECK(text::contains(prompts_seen[1], "is not one of the valid actions"));

  int calls = 0;
  FunctionBackend second([&](const ChatRequest&) {
    return ++calls == 1 ? std::string("hmm") : std::string("goto(sink)");
  });
  const auto recovered = next_action("x", {}, sample_observation(), 2, 30, {}, second, prompts);
  CHECK(recovered.action == Action::go_to("sink"));
  CHECK(recovered.attempts == 2);

  FunctionBackend down([](const ChatRequest&) -> std::string { throw TransportError("down", 0); });
  CHECK_THROWS_AS(next_action("x", {}, sample_observation(), 1, 30, {}, down, prompts),
                  TransportError);
}

TEST_CASE("trajectory rendering") {
  Step s{"You are at the counter.\nOn it: plate.", Action::pick("plate"), "You pick up the plate."};
  CHECK(render_step(1, s) ==
        "1. OBS You are at the counter. On it: plate. | ACT pick(plate) | FB You pick up the plate.");
  Step long_obs{std::string(500, 'a'), Action::noop(), "You wait."};
  CHECK(render_step(5, long_obs).size() < 300);
  CHECK(render_actions({Action::go_to("sink"), Action::noop()}) == "1. goto(sink)\n2. noop");
}
