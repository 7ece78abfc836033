#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "elite/error.hpp"
#include "elite/model_backend.hpp"
#include "support/fixtures.hpp"
#include "support/stub_server.hpp"

using namespace elite;
using elite::test::StubReply;
using elite::test::StubRequest;
using elite::test::StubServer;
using ms = std::chrono::milliseconds;

namespace {

ChatRequest user(std::string text) { return ChatRequest{{{Role::user, std::move(text)}}, 0.0, 1024}; }

std::string golden(const std::string& name) {
  std::ifstream in(std::string(ELITE_GOLDEN_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ChatRequest golden_request() {
  return ChatRequest{{{Role::system, "You control a household robot."},
                      {Role::user, "Choose the next action.\nValid actions:\npick(plate)"}},
                     0.0,
                     64};
}

std::string chat_reply(const std::string& content) {
  nlohmann::json j;
  j["choices"] = nlohmann::json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}});
  return j.dump();
}

}  // namespace

TEST_CASE("chat request validation") {
  CHECK_THROWS_AS(ChatRequest{}.validate(), InvalidArgument);
  CHECK_THROWS_AS((ChatRequest{{{Role::assistant, "x"}}, 0.0, 10}.validate()), InvalidArgument);
  CHECK_THROWS_AS((ChatRequest{{{Role::user, "x"}}, -1.0, 10}.validate()), InvalidArgument);
  CHECK_THROWS_AS((ChatRequest{{{Role::user, "x"}}, 0.0, 0}.validate()), InvalidArgument);
  CHECK_NOTHROW(user("x").validate());
}

TEST_CASE("scripted rules match in order and fall back to the default") {
  ScriptedBackend b({ScriptRule::substring("plate", "pick(plate)"),
                     ScriptRule::all_of({"heat", "potato"}, "goto(microwave)"),
                     ScriptRule::regex("step [0-9]+", "noop")},
                    "default");
  CHECK(b.chat(user("where is the plate")) == "pick(plate)");
  CHECK(b.chat(user("heat the potato")) == "goto(microwave)");
  CHECK(b.chat(user("heat the soup")) == "default");
  CHECK(b.chat(user("at step 12")) == "noop");
  CHECK(b.calls() == 4);
}

TEST_CASE("consume-once rules retire after their first match") {
  ScriptedBackend b({ScriptRule::substring("x", "first", true), ScriptRule::substring("x", "second")}, "d");
  CHECK(b.chat(user("x")) == "first");
  CHECK(b.chat(user("x")) == "second");
  CHECK(b.chat(user("x")) == "second");
}

TEST_CASE("scripts load from JSON") {
  auto b = ScriptedBackend::from_json(R"js({"default_reply": "noop", "rules": [
      {"match": "substring", "pattern": "plate", "reply": "pick(plate)", "once": true},
      {"match": "all_of", "patterns": ["a", "b"], "reply": "ab"}]})js");
  CHECK(b->chat(user("plate")) == "pick(plate)");
  CHECK(b->chat(user("plate")) == "noop");
  CHECK(b->chat(user("b and a")) == "ab");
  CHECK_THROWS_AS(ScriptedBackend::from_json("[]"), ConfigError);
  CHECK_THROWS_AS(ScriptedBackend::from_json(R"({"rules": [{"match": "fuzzy", "pattern": "x", "reply": "y"}]})"),
                  ConfigError);
  CHECK_THROWS_AS(ScriptedBackend::from_file("/nonexistent/script.json"), ConfigError);
}

TEST_CASE("recording backend logs exchanges and errors") {
  FunctionBackend inner([](const ChatRequest& r) {
    if (r.last_user_message() == "boom") throw TransportError("down", 503);
    return "ok:" + r.last_user_message();
  });
  RecordingBackend rec(inner, "planner");
  CHECK(rec.chat(user("hi")) == "ok:hi");
  CHECK_THROWS_AS(rec.chat(user("boom")), TransportError);
  const auto log = rec.take();
  REQUIRE(log.size() == 2);
  CHECK(log[0].role_tag == "planner");
  CHECK(log[0].reply == "ok:hi");
  CHECK_FALSE(log[1].error.empty());
  CHECK(rec.take().empty());
}

TEST_CASE("remote chat sends the golden body and reads the first choice") {
  StubServer server([](const StubRequest&, int) { return StubReply{200, chat_reply("pick(plate)")}; });
  std::vector<ms> delays;
  RemoteChatConfig c{server.base_url() + "/v1", "qwen2.5-vl-72b", "chat-key", 4, test::recording_http(delays)};
  RemoteChatBackend backend(c);
  CHECK(backend.request_body(golden_request()) == golden("chat_request.json"));
  CHECK(backend.chat(golden_request()) == "pick(plate)");
  const auto reqs = server.requests();
  REQUIRE(reqs.size() == 1);
  CHECK(reqs[0].path == "/v1/chat/completions");
  CHECK(reqs[0].body == golden("chat_request.json"));
  CHECK(reqs[0].authorization == "Bearer chat-key");
  CHECK(delays.empty());
}

TEST_CASE("remote chat retries with exponential backoff then fails") {
  StubServer server([](const StubRequest&, int) { return StubReply{503, "{}"}; });
  std::vector<ms> delays;
  RemoteChatBackend backend({server.base_url(), "m", "", 4, test::recording_http(delays)});
  try {
    backend.chat(user("x"));
    FAIL("expected a transport error");
  } catch (const TransportError& e) {
    CHECK(e.status() == 503);
  }
  CHECK(server.requests().size() == 4);
  CHECK(delays == std::vector<ms>{ms(500), ms(1000), ms(2000)});
  CHECK(server.requests()[0].authorization.empty());
}

TEST_CASE("remote chat recovers after transient failures") {
  StubServer server([](const StubRequest&, int i) {
    return i < 2 ? StubReply{500, "{}"} : StubReply{200, chat_reply("done")};
  });
  std::vector<ms> delays;
  RemoteChatBackend backend({server.base_url(), "m", "", 4, test::recording_http(delays)});
  CHECK(backend.chat(user("x")) == "done");
  CHECK(delays == std::vector<ms>{ms(500), ms(1000)});
}

TEST_CASE("remote chat surfaces malformed replies and refused connections") {
  StubServer server([](const StubRequest&, int) { return StubReply{200, "{\"choices\": []}"}; });
  std::vector<ms> delays;
  RemoteChatBackend backend({server.base_url(), "m", "", 4, test::recording_http(delays)});
  CHECK_THROWS_AS(backend.chat(user("x")), TransportError);

  std::vector<ms> delays2;
  HttpOptions quick = test::recording_http(delays2);
  quick.max_retries = 1;
  RemoteChatBackend dead({test::closed_port_url(), "m", "", 4, quick});
  try {
    dead.chat(user("x"));
    FAIL("expected a transport error");
  } catch (const TransportError& e) {
    CHECK(e.status() == 0);
  }
  CHECK(delays2 == std::vector<ms>{ms(500)});
}

TEST_CASE("remote chat config errors") {
  CHECK_THROWS_AS(RemoteChatBackend({"", "m", "", 4, {}}), ConfigError);
  CHECK_THROWS_AS(RemoteChatBackend({"http://x", "", "", 4, {}}), ConfigError);
  RemoteChatBackend no_scheme({"localhost:1", "m", "", 4, {}});
  CHECK_THROWS_AS(no_scheme.chat(user("x")), ConfigError);
}
