#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

// Deterministic text household: locations (some openable, some appliances
// with a switch), objects with attributes, precondition-guarded skills,
// conjunctive goals and binary reward.
namespace elite {

enum class Skill { go_to, pick, place, open, close, toggle, heat, cool, clean, noop };

struct Action {
  Skill skill = Skill::noop;
  std::string target;       // location, object or switch
  std::string destination;  // place() only

  static Action noop() { return {}; }
  static Action go_to(std::string location) { return {Skill::go_to, std::move(location), {}}; }
  static Action pick(std::string object) { return {Skill::pick, std::move(object), {}}; }
  static Action place(std::string object, std::string location) {
    return {Skill::place, std::move(object), std::move(location)};
  }
  static Action open(std::string location) { return {Skill::open, std::move(location), {}}; }
  static Action close(std::string location) { return {Skill::close, std::move(location), {}}; }
  static Action toggle(std::string switch_name) { return {Skill::toggle, std::move(switch_name), {}}; }
  static Action heat(std::string object) { return {Skill::heat, std::move(object), {}}; }
  static Action cool(std::string object) { return {Skill::cool, std::move(object), {}}; }
  static Action clean(std::string object) { return {Skill::clean, std::move(object), {}}; }

  // "goto(sink)", "place(plate, counter)", "noop".
  std::string to_string() const;
  // Accepts the to_string form, case- and whitespace-insensitively.
  static std::optional<Action> parse(std::string_view text);

  bool operator==(const Action&) const = default;
};

enum class Effect { none, clean, heat, cool };

struct Location {
  std::string name;
  bool openable = false;
  bool open = true;
  Effect effect = Effect::none;
  std::string switch_name;  // empty when the location has nothing to toggle
  bool on = false;

  bool operator==(const Location&) const = default;
};

struct Object {
  std::string name;
  std::string at;  // location name, empty while held
  std::map<std::string, std::string> attributes;

  bool operator==(const Object&) const = default;
};

struct AgentState {
  std::string at;
  std::optional<std::string> holding;

  bool operator==(const AgentState&) const = default;
};

struct WorldState {
  std::vector<Location> locations;
  std::vector<Object> objects;
  AgentState agent;
  std::uint64_t rng_seed = 0;

  const Location* location(std::string_view name) const;
  Location* location(std::string_view name);
  const Object* object(std::string_view name) const;
  Object* object(std::string_view name);
  const Location* location_with_switch(std::string_view switch_name) const;
  const Location* location_with_effect(Effect effect) const;

  // Objects the agent can currently see: those at its location, unless the
  // location is a closed receptacle.
  std::vector<const Object*> visible_objects() const;

  std::vector<std::string> validate() const;

  bool operator==(const WorldState&) const = default;
};

// "at" compares the object's location; any other attribute compares the
// object's attribute value.
struct Subgoal {
  std::string object;
  std::string attribute;
  std::string value;

  bool satisfied(const WorldState& state) const;
  std::string describe() const;

  bool operator==(const Subgoal&) const = default;
};

inline constexpr std::string_view kAtAttribute = "at";

enum class TaskCategory {
  base,
  long_horizon,
  complex_instruction,
  common_sense,
  spatial,
  visual_attribute,
};

std::string_view to_string(TaskCategory category);
std::optional<TaskCategory> parse_task_category(std::string_view name);
const std::vector<TaskCategory>& all_categories();

enum class Split { seen, unseen };

std::string_view to_string(Split split);
std::optional<Split> parse_split(std::string_view name);

inline constexpr int kDefaultMaxSteps = 30;

struct TaskSpec {
  std::string id;
  std::string instruction;
  TaskCategory category = TaskCategory::base;
  WorldState initial;
  std::vector<Subgoal> goal;
  int t_max = kDefaultMaxSteps;
  Split split = Split::seen;
  // Ground-truth action sequence; empty when the task ships none.
  std::vector<Action> oracle;

  std::vector<std::string> validate() const;

  bool operator==(const TaskSpec&) const = default;
};

nlohmann::ordered_json to_json(const WorldState& state);
WorldState world_state_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const TaskSpec& task);
TaskSpec task_from_json(const nlohmann::json& j);

void save_task(const TaskSpec& task, const std::filesystem::path& path);
TaskSpec load_task(const std::filesystem::path& path);

struct Observation {
  std::string text;  // situation description without the action list
  std::vector<Action> catalog;

  std::string catalog_text() const;  // one action per line
  std::string render() const;        // text + catalog
};

struct StepResult {
  Observation observation;
  std::string feedback;
  bool done = false;
  int reward = 0;
  bool applied = false;  // false when a precondition failed
};

class Env {
 public:
  // Throws ValidationError when the task is malformed.
  explicit Env(TaskSpec task);

  Observation observe() const;
  StepResult step(const Action& action);

  // Fraction of subgoals currently satisfied.
  double goal_progress() const;
  bool goal_satisfied() const;

  bool done() const { return done_; }
  int reward() const { return goal_satisfied() ? 1 : 0; }
  int steps_taken() const { return steps_; }
  const WorldState& state() const { return state_; }
  const TaskSpec& task() const { return task_; }

 private:
  // Applies the action when its preconditions hold; returns feedback and
  // whether the state changed.
  std::pair<std::string, bool> apply(const Action& action);
  std::vector<Action> catalog() const;

  TaskSpec task_;
  WorldState state_;
  int steps_ = 0;
  bool done_ = false;
};

// Validates, builds an environment at the initial state and returns o_0.
std::pair<Env, Observation> reset(const TaskSpec& task);

}  // namespace elite
