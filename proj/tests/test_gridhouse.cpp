#include <doctest.h>

#include <filesystem>

#include "elite/error.hpp"
#include "elite/gridhouse.hpp"
#include "elite/text.hpp"
#include "support/fixtures.hpp"

using namespace elite;

namespace {

TaskSpec heat_task() {
  TaskSpec t;
  t.id = "heat-1";
  t.instruction = "Put a hot potato on the table.";
  t.initial.locations = {
      {"counter", false, true, Effect::none, "", false},
      {"table", false, true, Effect::none, "", false},
      {"microwave", true, false, Effect::heat, "microwave", false},
      {"cabinet", true, false, Effect::none, "", false},
  };
  t.initial.objects = {{"potato", "counter", {{"temperature", "room"}}},
                       {"mug", "cabinet", {{"cleanliness", "dirty"}}}};
  t.initial.agent.at = "counter";
  t.goal = {{"potato", "temperature", "hot"}, {"potato", "at", "table"}};
  t.oracle = {Action::pick("potato"),    Action::go_to("microwave"),
              Action::open("microwave"), Action::place("potato", "microwave"),
              Action::close("microwave"), Action::toggle("microwave"),
              Action::open("microwave"), Action::pick("potato"),
              Action::go_to("table"),    Action::place("potato", "table")};
  return t;
}

bool in_catalog(const Observation& o, const Action& a) {
  return std::find(o.catalog.begin(), o.catalog.end(), a) != o.catalog.end();
}

}  // namespace

TEST_CASE("action text round-trips and parses loosely") {
  CHECK(Action::place("plate", "counter").to_string() == "place(plate, counter)");
  CHECK(Action::go_to("sink").to_string() == "goto(sink)");
  CHECK(Action::parse("Pick( Plate )") == Action::pick("plate"));
  CHECK(Action::parse("place(plate,counter)") == Action::place("plate", "counter"));
  CHECK(Action::parse("noop") == Action::noop());
  CHECK_FALSE(Action::parse("fly(moon)"));
  CHECK_FALSE(Action::parse("place(plate)"));
  CHECK_FALSE(Action::parse("pick()"));
}

TEST_CASE("the oracle reaches reward 1") {
  auto [env, obs] = reset(heat_task());
  for (const auto& a : heat_task().oracle) {
    CHECK(in_catalog(env.observe(), a));
    const auto r = env.step(a);
    CHECK(r.applied);
  }
  CHECK(env.goal_satisfied());
  CHECK(env.reward() == 1);
  CHECK(env.done());
  CHECK(env.goal_progress() == 1.0);
}

TEST_CASE("placing into a closed appliance fails without changing state") {
  auto [env, obs] = reset(heat_task());
  env.step(Action::pick("potato"));
  env.step(Action::go_to("microwave"));
  const WorldState before = env.state();
  const auto r = env.step(Action::place("potato", "microwave"));
  CHECK_FALSE(r.applied);
  CHECK(r.feedback == "The microwave is closed.");
  CHECK(env.state() == before);
  CHECK(env.steps_taken() == 3);
}

TEST_CASE("an open appliance cannot be switched on") {
  auto [env, obs] = reset(heat_task());
  env.step(Action::go_to("microwave"));
  env.step(Action::open("microwave"));
  const auto r = env.step(Action::toggle("microwave"));
  CHECK_FALSE(r.applied);
  CHECK(text::contains(r.feedback, "Close the microwave"));
}

TEST_CASE("closed receptacles hide their contents") {
  auto t = heat_task();
  t.initial.agent.at = "cabinet";
  auto [env, obs] = reset(t);
  CHECK_FALSE(text::contains(obs.text, "mug"));
  CHECK_FALSE(in_catalog(obs, Action::pick("mug")));
  const auto r = env.step(Action::pick("mug"));
  CHECK_FALSE(r.applied);
  env.step(Action::open("cabinet"));
  CHECK(text::contains(env.observe().text, "mug"));
  CHECK(in_catalog(env.observe(), Action::pick("mug")));
}

TEST_CASE("partial progress counts satisfied subgoals") {
  auto [env, obs] = reset(heat_task());
  env.step(Action::pick("potato"));
  env.step(Action::go_to("table"));
  env.step(Action::place("potato", "table"));
  CHECK(env.goal_progress() == doctest::Approx(0.5));
  CHECK_FALSE(env.done());
}

TEST_CASE("episodes end at the step budget") {
  auto t = heat_task();
  t.t_max = 3;
  auto [env, obs] = reset(t);
  env.step(Action::noop());
  env.step(Action::noop());
  const auto r = env.step(Action::noop());
  CHECK(r.done);
  CHECK(env.steps_taken() == 3);
  const auto after = env.step(Action::pick("potato"));
  CHECK(after.done);
  CHECK(env.steps_taken() == 3);
  CHECK(env.state().agent.holding == std::nullopt);
}

TEST_CASE("noop is always in the catalog, last") {
  auto [env, obs] = reset(heat_task());
  REQUIRE_FALSE(obs.catalog.empty());
  CHECK(obs.catalog.back() == Action::noop());
  CHECK(text::contains(obs.render(), "goto(microwave)"));
}

TEST_CASE("turning on an appliance applies its effect to the contents") {
  test::TransferFixture f = test::transfer_fixture();
  auto [env, obs] = reset(f.teach);
  env.step(Action::pick("spatula"));
  env.step(Action::go_to("sink"));
  env.step(Action::toggle("faucet"));
  // The faucet was on before the spatula went in; the clean skill is needed.
  env.step(Action::place("spatula", "sink"));
  CHECK(env.state().object("spatula")->attributes.at("cleanliness") == "dirty");
  CHECK(env.step(Action::clean("spatula")).applied);
  CHECK(env.state().object("spatula")->attributes.at("cleanliness") == "clean");
}

TEST_CASE("malformed specs are rejected") {
  auto t = heat_task();
  t.goal.push_back({"ghost", "at", "table"});
  CHECK_FALSE(t.validate().empty());
  CHECK_THROWS_AS(Env{t}, ValidationError);
  auto u = heat_task();
  u.initial.agent.at = "attic";
  CHECK_THROWS_AS(reset(u), ValidationError);
}

TEST_CASE("task files round-trip") {
  const auto t = heat_task();
  const auto path = std::filesystem::temp_directory_path() / "elite_task.json";
  save_task(t, path);
  CHECK(load_task(path) == t);
  CHECK(task_from_json(to_json(t)) == t);
  std::filesystem::remove(path);
}
