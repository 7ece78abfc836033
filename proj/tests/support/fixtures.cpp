#include "support/fixtures.hpp"

#include "elite/random.hpp"

namespace elite::test {

Vector random_unit(std::mt19937_64& rng, std::size_t dim) {
  Vector v(dim);
  for (;;) {
    for (auto& x : v) x = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    if (l2_norm(v) > 1e-3) break;
  }
  normalize(v);
  return v;
}

StrategyPool random_pool(std::mt19937_64& rng, std::size_t dim, std::size_t n) {
  std::vector<StrategyEntry> entries;
  for (std::size_t i = 0; i < n; ++i) {
    StrategyEntry e;
    e.id = i + 1;
    e.content = "strategy " + std::to_string(i + 1);
    e.kind = static_cast<InsightKind>(random::below(rng, 5));
    e.plan_trace = "plan " + std::to_string(i + 1);
    e.embedding = random_unit(rng, dim);
    entries.push_back(std::move(e));
  }
  return StrategyPool::restore(dim, n + 1, 0, std::move(entries));
}

HttpOptions recording_http(std::vector<std::chrono::milliseconds>& delays) {
  HttpOptions o;
  o.timeout = std::chrono::milliseconds(2000);
  o.sleep = [&delays](std::chrono::milliseconds d) { delays.push_back(d); };
  return o;
}

WorldState sink_world() {
  WorldState w;
  w.locations = {
      {"counter", false, true, Effect::none, "", false},
      {"table", false, true, Effect::none, "", false},
      {"sink", false, true, Effect::clean, "faucet", false},
  };
  w.agent.at = "counter";
  return w;
}

namespace {

TaskSpec cleaning_task(std::string id, std::string instruction, std::string object,
                       std::string from, std::string to) {
  TaskSpec t;
  t.id = std::move(id);
  t.instruction = std::move(instruction);
  t.category = TaskCategory::base;
  t.initial = sink_world();
  t.initial.objects.push_back({object, from, {{"cleanliness", "dirty"}}});
  t.goal = {{object, "cleanliness", "clean"}, {object, "at", to}};
  t.oracle = {Action::go_to(from),   Action::pick(object),   Action::go_to("sink"),
              Action::place(object, "sink"), Action::toggle("faucet"), Action::pick(object),
              Action::go_to(to),     Action::place(object, to)};
  if (from == "counter") t.oracle.erase(t.oracle.begin());
  return t;
}

void add_steps(std::vector<ScriptRule>& rules, const std::vector<std::string>& context,
               const std::vector<Action>& actions) {
  for (std::size_t i = 0; i < actions.size(); ++i) {
    std::vector<std::string> patterns = context;
    patterns.push_back("Current step: " + std::to_string(i + 1) + " of");
    rules.push_back(ScriptRule::all_of(std::move(patterns), actions[i].to_string()));
  }
}

}  // namespace

TransferFixture transfer_fixture() {
  TransferFixture f;
  f.teach = cleaning_task("teach-spatula", "Put a clean spatula on the table.", "spatula",
                          "counter", "table");
  f.test = cleaning_task("test-plate", "Put a clean plate on the counter.", "plate", "table",
                         "counter");
  f.lesson = "put objects in sink before cleaning";
  return f;
}

std::shared_ptr<ScriptedBackend> TransferFixture::backend() const {
  std::vector<ScriptRule> rules;
  const std::string plan_teach =
      "- Key object: the spatula\n- Clean it at the sink with the faucet\n"
      "- Put the clean spatula on the table";
  const std::string plan_test =
      "- Key object: the plate\n- Clean it at the sink with the faucet\n"
      "- Put the clean plate on the counter";
  rules.push_back(ScriptRule::all_of({"Write a coarse plan", teach.instruction}, plan_teach));
  rules.push_back(ScriptRule::all_of({"Write a coarse plan", test.instruction}, plan_test));

  add_steps(rules, {"Choose the next action", teach.instruction}, teach.oracle);
  // With the lesson in the prompt the plate goes into the sink first.
  add_steps(rules, {"Choose the next action", test.instruction, "Strategy (success_pattern): " + lesson},
            test.oracle);
  add_steps(rules, {"Choose the next action", test.instruction},
            {Action::go_to("table"), Action::pick("plate"), Action::go_to("sink"),
             Action::toggle("faucet"), Action::clean("plate"), Action::go_to("counter"),
             Action::place("plate", "counter")});

  rules.push_back(ScriptRule::all_of(
      {"Reflect on this successful episode", "spatula"},
      "```json\n{\"insights\": [{\"kind\": \"success_pattern\", \"text\": \"" + lesson +
          "\"}, {\"kind\": \"repeatable_steps\", \"text\": \"find sink; put object in sink; "
          "toggle faucet\"}]}\n```"));
  rules.push_back(ScriptRule::all_of(
      {"Reflect on this failed episode", "plate"},
      "{\"insights\": [{\"kind\": \"failure_summary\", \"text\": \"the plate stayed dirty\"}]}"));
  rules.push_back(ScriptRule::all_of(
      {"Update the strategy pool", lesson},
      "{\"ops\": [{\"op\": \"add\", \"kind\": \"success_pattern\", \"content\": \"" + lesson +
          "\"}]}"));
  rules.push_back(ScriptRule::all_of(
      {"Update the strategy pool", "the plate stayed dirty"},
      "{\"ops\": [{\"op\": \"add\", \"kind\": \"failure_summary\", \"content\": \"the plate "
      "stayed dirty\"}]}"));
  return std::make_shared<ScriptedBackend>(std::move(rules), "noop");
}

ModelSet TransferFixture::models() const {
  ModelSet m;
  auto b = backend();
  m.planner = b;
  m.distiller = b;
  m.consolidator = b;
  m.embedder = std::make_shared<LocalHashEmbedder>();
  return m;
}

}  // namespace elite::test
