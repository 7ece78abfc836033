#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "elite/error.hpp"
#include "elite/json_extract.hpp"
#include "elite/prompts.hpp"
#include "elite/text.hpp"

using namespace elite;

TEST_CASE("trim and whitespace helpers") {
  CHECK(text::trim("  a b \n") == "a b");
  CHECK(text::trim("   ").empty());
  CHECK(text::collapse_whitespace("  Pick(  Plate )\t") == "pick( plate )");
  CHECK(text::squash(" Pick( Plate ) ") == "pick(plate)");
}

TEST_CASE("utf8 clipping never splits a code point") {
  const std::string s = "caf\xC3\xA9 au lait";
  CHECK(text::utf8_length(s) == 12);
  CHECK(text::utf8_truncate(s, 4) == "caf\xC3\xA9");
  CHECK(text::clip(s, 4) == "caf\xC3\xA9...");
  CHECK(text::clip("short", 10) == "short");
}

TEST_CASE("split_lines handles CRLF and a missing final newline") {
  const auto lines = text::split_lines("a\r\nb\nc");
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "a");
  CHECK(lines[2] == "c");
}

TEST_CASE("extract_first_object tolerates prose and fences") {
  auto j = extract_first_object("Sure! Here it is:\n```json\n{\"ops\": [], \"x\": \"}\"}\n```");
  REQUIRE(j);
  CHECK((*j)["x"] == "}");
  CHECK((*j)["ops"].is_array());
}

TEST_CASE("extract_first_object skips broken candidates") {
  auto j = extract_first_object("{not json} then {\"a\": 1}");
  REQUIRE(j);
  CHECK((*j)["a"] == 1);
  CHECK_FALSE(extract_first_object("no braces at all"));
  CHECK_FALSE(extract_first_object("{\"unterminated\": "));
  CHECK_FALSE(extract_first_object("[1, 2, 3]"));
}

TEST_CASE("extract_first_object respects the depth limit") {
  std::string deep(100, '{');
  deep += std::string(100, '}');
  CHECK_FALSE(extract_first_object(deep, 64));
  CHECK(extract_first_object("{\"a\": {\"b\": [1]}}", 3));
  CHECK_FALSE(extract_first_object("{\"a\": {\"b\": [1]}}", 2));
}

TEST_CASE("prompt templates parse into system and user sections") {
  const auto t = parse_prompt_template("# comment\n[system]\nsys line\n[user]\nhello {{name}}\n");
  CHECK(t.system == "sys line");
  CHECK(t.user == "hello {{name}}");
  CHECK_THROWS_AS(parse_prompt_template("[system]\nonly system\n"), ConfigError);
}

TEST_CASE("render_template substitutes verbatim and rejects missing values") {
  CHECK(render_template("a {{x}} b {{x}}", {{"x", "{{y}}"}}) == "a {{y}} b {{y}}");
  CHECK_THROWS_AS(render_template("{{missing}}", {}), ConfigError);
}

TEST_CASE("default prompt set renders every template at temperature 0") {
  const auto prompts = PromptSet::defaults();
  const auto req = prompts.render(prompt_names::coarse_plan,
                                  {{"instruction", "Put a clean plate on the counter."},
                                   {"observation", "You are at the sink."}});
  REQUIRE(req.messages.size() == 2);
  CHECK(req.messages[0].role == Role::system);
  CHECK(req.temperature == 0.0);
  CHECK(text::contains(req.last_user_message(), "Instruction: Put a clean plate on the counter."));
  CHECK_THROWS_AS(prompts.get("nonexistent"), ConfigError);
}

TEST_CASE("prompt overrides replace only the named template") {
  const auto dir = std::filesystem::temp_directory_path() / "elite_prompt_override";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "coarse_plan.v1.txt") << "[system]\nS\n[user]\nPLAN {{instruction}}\n";
  const auto prompts = PromptSet::with_overrides(dir);
  CHECK(prompts.get(prompt_names::coarse_plan).user == "PLAN {{instruction}}");
  CHECK(prompts.get(prompt_names::next_action).user ==
        PromptSet::defaults().get(prompt_names::next_action).user);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(PromptSet::with_overrides(dir), ConfigError);
}
