#include "elite/gridhouse.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "elite/error.hpp"
#include "elite/text.hpp"

namespace elite {

namespace {

struct SkillName {
  Skill skill;
  std::string_view name;
  int arity;
};

constexpr SkillName kSkills[] = {
    {Skill::go_to, "goto", 1},  {Skill::pick, "pick", 1},
    {Skill::place, "place", 2}, {Skill::open, "open", 1},
    {Skill::close, "close", 1}, {Skill::toggle, "toggle", 1},
    {Skill::heat, "heat", 1},   {Skill::cool, "cool", 1},
    {Skill::clean, "clean", 1}, {Skill::noop, "noop", 0},
};

std::string_view skill_name(Skill skill) {
  for (const auto& s : kSkills) {
    if (s.skill == skill) return s.name;
  }
  return "noop";
}

std::string_view effect_name(Effect e) {
  switch (e) {
    case Effect::none:
      return "none";
    case Effect::clean:
      return "clean";
    case Effect::heat:
      return "heat";
    case Effect::cool:
      return "cool";
  }
  return "none";
}

std::optional<Effect> parse_effect(std::string_view name) {
  for (auto e : {Effect::none, Effect::clean, Effect::heat, Effect::cool}) {
    if (name == effect_name(e)) return e;
  }
  return std::nullopt;
}

// Attribute written by each appliance effect, and the value it sets.
std::pair<std::string_view, std::string_view> effect_result(Effect e) {
  switch (e) {
    case Effect::clean:
      return {"cleanliness", "clean"};
    case Effect::heat:
      return {"temperature", "hot"};
    case Effect::cool:
      return {"temperature", "cold"};
    case Effect::none:
      break;
  }
  return {"", ""};
}

std::string_view effect_participle(Effect e) {
  switch (e) {
    case Effect::clean:
      return "cleaned";
    case Effect::heat:
      return "heated";
    case Effect::cool:
      return "cooled";
    case Effect::none:
      break;
  }
  return "";
}

Effect effect_of(Skill skill) {
  switch (skill) {
    case Skill::clean:
      return Effect::clean;
    case Skill::heat:
      return Effect::heat;
    case Skill::cool:
      return Effect::cool;
    default:
      return Effect::none;
  }
}

std::string describe_object(const Object& o) {
  std::string out = o.name;
  if (o.attributes.empty()) return out;
  out += " (";
  bool first = true;
  for (const auto& [key, value] : o.attributes) {
    if (!first) out += ", ";
    out += key + ": " + value;
    first = false;
  }
  out += ")";
  return out;
}

}  // namespace

std::string Action::to_string() const {
  const auto name = std::string(skill_name(skill));
  switch (skill) {
    case Skill::noop:
      return name;
    case Skill::place:
      return name + "(" + target + ", " + destination + ")";
    default:
      return name + "(" + target + ")";
  }
}

std::optional<Action> Action::parse(std::string_view raw) {
  const std::string s = text::squash(raw);
  if (s == "noop" || s == "noop()") return Action::noop();
  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')') return std::nullopt;
  const std::string name = s.substr(0, open);
  const std::string args = s.substr(open + 1, s.size() - open - 2);
  for (const auto& sk : kSkills) {
    if (sk.name != name || sk.skill == Skill::noop) continue;
    if (sk.arity == 2) {
      const auto comma = args.find(',');
      if (comma == std::string::npos) return std::nullopt;
      std::string a = args.substr(0, comma);
      std::string b = args.substr(comma + 1);
      if (a.empty() || b.empty() || b.find(',') != std::string::npos) {
        return std::nullopt;
      }
      return Action{sk.skill, std::move(a), std::move(b)};
    }
    if (args.empty() || args.find(',') != std::string::npos) return std::nullopt;
    return Action{sk.skill, args, {}};
  }
  return std::nullopt;
}

const Location* WorldState::location(std::string_view name) const {
  for (const auto& l : locations) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

Location* WorldState::location(std::string_view name) {
  for (auto& l : locations) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

const Object* WorldState::object(std::string_view name) const {
  for (const auto& o : objects) {
    if (o.name == name) return &o;
  }
  return nullptr;
}

Object* WorldState::object(std::string_view name) {
  for (auto& o : objects) {
    if (o.name == name) return &o;
  }
  return nullptr;
}

const Location* WorldState::location_with_switch(std::string_view switch_name) const {
  for (const auto& l : locations) {
    if (!l.switch_name.empty() && l.switch_name == switch_name) return &l;
  }
  return nullptr;
}

const Location* WorldState::location_with_effect(Effect effect) const {
  for (const auto& l : locations) {
    if (l.effect == effect) return &l;
  }
  return nullptr;
}

std::vector<const Object*> WorldState::visible_objects() const {
  std::vector<const Object*> out;
  const Location* here = location(agent.at);
  if (here == nullptr || (here->openable && !here->open)) return out;
  for (const auto& o : objects) {
    if (o.at == agent.at) out.push_back(&o);
  }
  return out;
}

std::vector<std::string> WorldState::validate() const {
  std::vector<std::string> problems;
  std::set<std::string> names;
  std::set<std::string> switches;
  if (locations.empty()) problems.push_back("no locations");
  for (const auto& l : locations) {
    if (l.name.empty()) problems.push_back("location with empty name");
    if (!names.insert(l.name).second) {
      problems.push_back("duplicate name '" + l.name + "'");
    }
    if (!l.openable && !l.open) {
      problems.push_back("location '" + l.name + "' is closed but not openable");
    }
    if (l.effect != Effect::none && l.switch_name.empty()) {
      problems.push_back("appliance '" + l.name + "' has no switch");
    }
    if (!l.switch_name.empty() && !switches.insert(l.switch_name).second) {
      problems.push_back("duplicate switch '" + l.switch_name + "'");
    }
  }
  int held = 0;
  for (const auto& o : objects) {
    if (o.name.empty()) problems.push_back("object with empty name");
    if (!names.insert(o.name).second) {
      problems.push_back("duplicate name '" + o.name + "'");
    }
    if (o.at.empty()) {
      ++held;
      if (agent.holding != o.name) {
        problems.push_back("object '" + o.name + "' has no location and is not held");
      }
    } else if (location(o.at) == nullptr) {
      problems.push_back("object '" + o.name + "' is at unknown location '" + o.at + "'");
    }
  }
  if (held > 1) problems.push_back("more than one object held");
  if (location(agent.at) == nullptr) {
    problems.push_back("agent is at unknown location '" + agent.at + "'");
  }
  if (agent.holding) {
    const Object* o = object(*agent.holding);
    if (o == nullptr) {
      problems.push_back("agent holds unknown object '" + *agent.holding + "'");
    } else if (!o->at.empty()) {
      problems.push_back("held object '" + o->name + "' also has a location");
    }
  }
  return problems;
}

bool Subgoal::satisfied(const WorldState& state) const {
  const Object* o = state.object(object);
  if (o == nullptr) return false;
  if (attribute == kAtAttribute) return o->at == value;
  auto it = o->attributes.find(attribute);
  return it != o->attributes.end() && it->second == value;
}

std::string Subgoal::describe() const {
  if (attribute == kAtAttribute) return object + " at " + value;
  return object + " " + attribute + "=" + value;
}

std::string_view to_string(TaskCategory category) {
  switch (category) {
    case TaskCategory::base:
      return "base";
    case TaskCategory::long_horizon:
      return "long_horizon";
    case TaskCategory::complex_instruction:
      return "complex_instruction";
    case TaskCategory::common_sense:
      return "common_sense";
    case TaskCategory::spatial:
      return "spatial";
    case TaskCategory::visual_attribute:
      return "visual_attribute";
  }
  return "base";
}

const std::vector<TaskCategory>& all_categories() {
  static const std::vector<TaskCategory> categories = {
      TaskCategory::base,         TaskCategory::long_horizon,
      TaskCategory::complex_instruction, TaskCategory::common_sense,
      TaskCategory::spatial,      TaskCategory::visual_attribute};
  return categories;
}

std::optional<TaskCategory> parse_task_category(std::string_view name) {
  for (auto c : all_categories()) {
    if (name == to_string(c)) return c;
  }
  return std::nullopt;
}

std::string_view to_string(Split split) {
  return split == Split::seen ? "seen" : "unseen";
}

std::optional<Split> parse_split(std::string_view name) {
  if (name == "seen") return Split::seen;
  if (name == "unseen") return Split::unseen;
  return std::nullopt;
}

std::vector<std::string> TaskSpec::validate() const {
  std::vector<std::string> problems = initial.validate();
  if (id.empty()) problems.push_back("task id is empty");
  if (text::trim(instruction).empty()) problems.push_back("instruction is empty");
  if (t_max < 1) problems.push_back("t_max must be >= 1");
  if (goal.empty()) problems.push_back("goal is empty");
  for (const auto& g : goal) {
    const Object* o = initial.object(g.object);
    if (o == nullptr) {
      problems.push_back("subgoal names unknown object '" + g.object + "'");
      continue;
    }
    if (g.attribute == kAtAttribute) {
      if (initial.location(g.value) == nullptr) {
        problems.push_back("subgoal names unknown location '" + g.value + "'");
      }
    } else if (!o->attributes.contains(g.attribute)) {
      problems.push_back("object '" + g.object + "' has no attribute '" +
                         g.attribute + "'");
    }
  }
  if (!goal.empty() &&
      std::all_of(goal.begin(), goal.end(),
                  [this](const Subgoal& g) { return g.satisfied(initial); })) {
    problems.push_back("initial state already satisfies the goal");
  }
  return problems;
}

nlohmann::ordered_json to_json(const WorldState& state) {
  nlohmann::ordered_json j;
  j["rng_seed"] = state.rng_seed;
  j["agent"]["at"] = state.agent.at;
  j["agent"]["holding"] = state.agent.holding
                              ? nlohmann::ordered_json(*state.agent.holding)
                              : nlohmann::ordered_json(nullptr);
  j["locations"] = nlohmann::ordered_json::array();
  for (const auto& l : state.locations) {
    nlohmann::ordered_json lj;
    lj["name"] = l.name;
    lj["openable"] = l.openable;
    lj["open"] = l.open;
    lj["effect"] = effect_name(l.effect);
    lj["switch"] = l.switch_name;
    lj["on"] = l.on;
    j["locations"].push_back(std::move(lj));
  }
  j["objects"] = nlohmann::ordered_json::array();
  for (const auto& o : state.objects) {
    nlohmann::ordered_json oj;
    oj["name"] = o.name;
    oj["at"] = o.at.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(o.at);
    oj["attributes"] = o.attributes;
    j["objects"].push_back(std::move(oj));
  }
  return j;
}

WorldState world_state_from_json(const nlohmann::json& j) {
  try {
    WorldState s;
    s.rng_seed = j.value("rng_seed", std::uint64_t{0});
    s.agent.at = j.at("agent").at("at").get<std::string>();
    const auto& holding = j.at("agent").at("holding");
    if (!holding.is_null()) s.agent.holding = holding.get<std::string>();
    for (const auto& lj : j.at("locations")) {
      Location l;
      l.name = lj.at("name").get<std::string>();
      l.openable = lj.value("openable", false);
      l.open = lj.value("open", true);
      const auto effect = parse_effect(lj.value("effect", std::string("none")));
      if (!effect) throw ValidationError({"unknown effect on '" + l.name + "'"});
      l.effect = *effect;
      l.switch_name = lj.value("switch", std::string());
      l.on = lj.value("on", false);
      s.locations.push_back(std::move(l));
    }
    for (const auto& oj : j.at("objects")) {
      Object o;
      o.name = oj.at("name").get<std::string>();
      if (!oj.at("at").is_null()) o.at = oj.at("at").get<std::string>();
      o.attributes = oj.value("attributes", std::map<std::string, std::string>{});
      s.objects.push_back(std::move(o));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError({std::string("malformed world state: ") + e.what()});
  }
}

nlohmann::ordered_json to_json(const TaskSpec& task) {
  nlohmann::ordered_json j;
  j["id"] = task.id;
  j["instruction"] = task.instruction;
  j["category"] = to_string(task.category);
  j["split"] = to_string(task.split);
  j["t_max"] = task.t_max;
  j["goal"] = nlohmann::ordered_json::array();
  for (const auto& g : task.goal) {
    nlohmann::ordered_json gj;
    gj["object"] = g.object;
    gj["attribute"] = g.attribute;
    gj["value"] = g.value;
    j["goal"].push_back(std::move(gj));
  }
  j["initial"] = to_json(task.initial);
  j["oracle"] = nlohmann::ordered_json::array();
  for (const auto& a : task.oracle) j["oracle"].push_back(a.to_string());
  return j;
}

TaskSpec task_from_json(const nlohmann::json& j) {
  std::vector<std::string> problems;
  TaskSpec t;
  try {
    t.id = j.at("id").get<std::string>();
    t.instruction = j.at("instruction").get<std::string>();
    const auto category = parse_task_category(j.at("category").get<std::string>());
    if (!category) problems.push_back("unknown category");
    else t.category = *category;
    const auto split = parse_split(j.value("split", std::string("seen")));
    if (!split) problems.push_back("unknown split");
    else t.split = *split;
    t.t_max = j.value("t_max", kDefaultMaxSteps);
    for (const auto& gj : j.at("goal")) {
      t.goal.push_back({gj.at("object").get<std::string>(),
                        gj.at("attribute").get<std::string>(),
                        gj.at("value").get<std::string>()});
    }
    t.initial = world_state_from_json(j.at("initial"));
    for (const auto& aj : j.value("oracle", nlohmann::json::array())) {
      const auto raw = aj.get<std::string>();
      auto a = Action::parse(raw);
      if (!a) problems.push_back("unparseable oracle action '" + raw + "'");
      else t.oracle.push_back(*a);
    }
  } catch (const nlohmann::json::exception& e) {
    problems.push_back(std::string("malformed task: ") + e.what());
  }
  if (!problems.empty()) throw ValidationError(problems);
  return t;
}

void save_task(const TaskSpec& task, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write task file " + path.string());
  out << to_json(task).dump(2) << "\n";
}

TaskSpec load_task(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read task file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto j = nlohmann::json::parse(buffer.str(), nullptr, false);
  if (j.is_discarded()) {
    throw ValidationError({path.string() + ": not valid JSON"});
  }
  return task_from_json(j);
}

std::string Observation::catalog_text() const {
  std::string out;
  for (const auto& a : catalog) out += a.to_string() + "\n";
  if (!out.empty()) out.pop_back();
  return out;
}

std::string Observation::render() const {
  return text + "\nValid actions:\n" + catalog_text();
}

Env::Env(TaskSpec task) : task_(std::move(task)) {
  if (auto problems = task_.validate(); !problems.empty()) {
    throw ValidationError(std::move(problems));
  }
  state_ = task_.initial;
}

std::pair<Env, Observation> reset(const TaskSpec& task) {
  Env env(task);
  Observation o0 = env.observe();
  return {std::move(env), std::move(o0)};
}

std::vector<Action> Env::catalog() const {
  std::vector<Action> out;
  const Location* here = state_.location(state_.agent.at);
  for (const auto& l : state_.locations) {
    if (l.name != state_.agent.at) out.push_back(Action::go_to(l.name));
  }
  const auto visible = state_.visible_objects();
  for (const Object* o : visible) out.push_back(Action::pick(o->name));
  if (state_.agent.holding) {
    out.push_back(Action::place(*state_.agent.holding, state_.agent.at));
  }
  if (here != nullptr && here->openable) {
    out.push_back(Action::open(here->name));
    out.push_back(Action::close(here->name));
  }
  if (here != nullptr && !here->switch_name.empty()) {
    out.push_back(Action::toggle(here->switch_name));
  }
  if (here != nullptr && here->effect != Effect::none) {
    const Skill skill = here->effect == Effect::clean  ? Skill::clean
                        : here->effect == Effect::heat ? Skill::heat
                                                       : Skill::cool;
    if (state_.agent.holding) out.push_back({skill, *state_.agent.holding, {}});
    for (const Object* o : visible) out.push_back({skill, o->name, {}});
  }
  out.push_back(Action::noop());
  return out;
}

Observation Env::observe() const {
  std::ostringstream os;
  const Location* here = state_.location(state_.agent.at);
  os << "You are at the " << state_.agent.at << ".";
  if (here->openable) os << " The " << here->name << " is " << (here->open ? "open" : "closed") << ".";
  if (!here->switch_name.empty()) {
    os << " The " << here->switch_name << " is " << (here->on ? "on" : "off") << ".";
  }
  os << "\n";
  if (state_.agent.holding) {
    os << "You are holding: " << describe_object(*state_.object(*state_.agent.holding)) << ".\n";
  } else {
    os << "You are holding nothing.\n";
  }
  if (here->openable && !here->open) {
    os << "The " << here->name << " is closed; you cannot see inside.\n";
  } else {
    const auto visible = state_.visible_objects();
    if (visible.empty()) {
      os << "You see nothing here.\n";
    } else {
      os << "You see: ";
      for (std::size_t i = 0; i < visible.size(); ++i) {
        if (i > 0) os << "; ";
        os << describe_object(*visible[i]);
      }
      os << ".\n";
    }
  }
  os << "Locations: ";
  for (std::size_t i = 0; i < state_.locations.size(); ++i) {
    if (i > 0) os << ", ";
    os << state_.locations[i].name;
  }
  os << ".";
  return {os.str(), catalog()};
}

std::pair<std::string, bool> Env::apply(const Action& a) {
  auto& agent = state_.agent;
  switch (a.skill) {
    case Skill::noop:
      return {"You wait.", true};

    case Skill::go_to: {
      if (state_.location(a.target) == nullptr) {
        return {"There is no location called " + a.target + ".", false};
      }
      agent.at = a.target;
      return {"You go to the " + a.target + ".", true};
    }

    case Skill::pick: {
      Object* o = state_.object(a.target);
      if (o == nullptr) return {"There is no object called " + a.target + ".", false};
      if (agent.holding) {
        return {"Your hands are full: you are holding the " + *agent.holding + ".", false};
      }
      const auto visible = state_.visible_objects();
      if (std::find(visible.begin(), visible.end(), o) == visible.end()) {
        return {"The " + a.target + " is not at your location.", false};
      }
      o->at.clear();
      agent.holding = o->name;
      return {"You pick up the " + a.target + ".", true};
    }

    case Skill::place: {
      Location* l = state_.location(a.destination);
      if (l == nullptr) {
        return {"There is no location called " + a.destination + ".", false};
      }
      if (agent.holding != a.target) {
        return {"You are not holding the " + a.target + ".", false};
      }
      if (agent.at != l->name) {
        return {"You must be at the " + l->name + " to place something there.", false};
      }
      if (l->openable && !l->open) return {"The " + l->name + " is closed.", false};
      state_.object(a.target)->at = l->name;
      agent.holding.reset();
      return {"You place the " + a.target + " in the " + l->name + ".", true};
    }

    case Skill::open:
    case Skill::close: {
      const bool opening = a.skill == Skill::open;
      const std::string verb = opening ? "open" : "close";
      Location* l = state_.location(a.target);
      if (l == nullptr) return {"There is no location called " + a.target + ".", false};
      if (!l->openable) return {"The " + l->name + " cannot be " + verb + "ed.", false};
      if (agent.at != l->name) {
        return {"You must be at the " + l->name + " to " + verb + " it.", false};
      }
      if (l->open == opening) {
        return {"The " + l->name + " is already " + (opening ? "open" : "closed") + ".", false};
      }
      l->open = opening;
      return {"You " + verb + " the " + l->name + ".", true};
    }

    case Skill::toggle: {
      const Location* found = state_.location_with_switch(a.target);
      if (found == nullptr) return {"There is no switch called " + a.target + ".", false};
      Location* l = state_.location(found->name);
      if (agent.at != l->name) {
        return {"You must be at the " + l->name + " to use the " + a.target + ".", false};
      }
      if (!l->on && l->openable && l->open) {
        return {"Close the " + l->name + " before turning on the " + a.target + ".", false};
      }
      l->on = !l->on;
      if (!l->on) return {"You turn off the " + a.target + ".", true};
      const auto [key, value] = effect_result(l->effect);
      if (!key.empty()) {
        for (auto& o : state_.objects) {
          auto it = o.attributes.find(std::string(key));
          if (o.at == l->name && it != o.attributes.end()) it->second = value;
        }
      }
      return {"You turn on the " + a.target + ".", true};
    }

    case Skill::heat:
    case Skill::cool:
    case Skill::clean: {
      const Effect effect = effect_of(a.skill);
      Object* o = state_.object(a.target);
      if (o == nullptr) return {"There is no object called " + a.target + ".", false};
      const Location* appliance = state_.location_with_effect(effect);
      const std::string participle(effect_participle(effect));
      if (appliance == nullptr) {
        return {"Nothing here can get the " + a.target + " " + participle + ".", false};
      }
      if (agent.at != appliance->name) {
        return {"You must be at the " + appliance->name + " to do that.", false};
      }
      if (o->at != appliance->name) {
        return {"The " + a.target + " must be in the " + appliance->name +
                    " to be " + participle + ".",
                false};
      }
      if (!appliance->on) return {"The " + appliance->switch_name + " is off.", false};
      const auto [key, value] = effect_result(effect);
      auto it = o->attributes.find(std::string(key));
      if (it == o->attributes.end()) {
        return {"The " + a.target + " cannot be " + participle + ".", false};
      }
      it->second = value;
      return {"The " + a.target + " is now " + std::string(value) + ".", true};
    }
  }
  return {"Nothing happens.", false};
}

StepResult Env::step(const Action& action) {
  StepResult result;
  if (done_) {
    result.observation = observe();
    result.feedback = "The episode is over.";
    result.done = true;
    result.reward = reward();
    return result;
  }
  auto [feedback, applied] = apply(action);
  ++steps_;
  result.feedback = std::move(feedback);
  result.applied = applied;
  result.reward = reward();
  done_ = result.reward == 1 || steps_ >= task_.t_max;
  result.done = done_;
  result.observation = observe();
  return result;
}

double Env::goal_progress() const {
  if (task_.goal.empty()) return 0.0;
  std::size_t satisfied = 0;
  for (const auto& g : task_.goal) {
    if (g.satisfied(state_)) ++satisfied;
  }
  return static_cast<double>(satisfied) / static_cast<double>(task_.goal.size());
}

bool Env::goal_satisfied() const {
  return std::all_of(task_.goal.begin(), task_.goal.end(),
                     [this](const Subgoal& g) { return g.satisfied(state_); });
}

}  // namespace elite
