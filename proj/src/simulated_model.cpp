#include "elite/simulated_model.hpp"

#include <sstream>

#include <json.hpp>

#include "elite/strategy_pool.hpp"
#include "elite/task_suite.hpp"
#include "elite/text.hpp"

namespace elite {

namespace {

std::string category_intent(TaskCategory c) {
  switch (c) {
    case TaskCategory::base:
      return "a direct household request; follow the instruction literally";
    case TaskCategory::long_horizon:
      return "a multi-part request; finish each sub-task completely before starting the next";
    case TaskCategory::complex_instruction:
      return "a verbose request; extract the goal object and its destination from the wording";
    case TaskCategory::common_sense:
      return "an implicit request; infer the required object state from everyday knowledge";
    case TaskCategory::spatial:
      return "a spatial request; resolve the object and destination from the relative positions";
    case TaskCategory::visual_attribute:
      return "an appearance request; choose the object whose color matches, not its look-alike";
  }
  return {};
}

std::string procedure_lesson(std::string_view procedure) {
  if (procedure == "clean") {
    return "put the object into the sink before switching on the faucet, since the faucet "
           "only cleans what is inside the sink";
  }
  if (procedure == "heat") {
    return "open the microwave before placing the object inside, then close it and switch "
           "it on to heat the object";
  }
  if (procedure == "cool") {
    return "open the fridge before placing the object inside, then close it and switch it "
           "on to chill the object";
  }
  return "open the closed cabinet, drawer or fridge before placing the object inside";
}

std::vector<std::string> split_family(const std::string& family) {
  std::vector<std::string> out;
  std::stringstream ss(family);
  for (std::string part; std::getline(ss, part, '+');) out.push_back(part);
  return out;
}

std::string family_lessons(const std::string& family) {
  std::string out;
  for (const auto& p : split_family(family)) {
    if (!out.empty()) out += "; then ";
    out += procedure_lesson(p);
  }
  return out;
}

// Value of the first "<key>: ..." line.
std::string line_value(std::string_view prompt, std::string_view key) {
  for (const auto& line : text::split_lines(prompt)) {
    if (line.starts_with(key)) return text::trim(std::string_view(line).substr(key.size()));
  }
  return {};
}

std::optional<std::string> marker_in(std::string_view s) {
  const auto begin = s.find("[procedure: ");
  if (begin == std::string_view::npos) return std::nullopt;
  const auto end = s.find(']', begin);
  if (end == std::string_view::npos) return std::nullopt;
  return std::string(s.substr(begin, end - begin + 1));
}

std::string fenced(const nlohmann::ordered_json& j) {
  return "```json\n" + j.dump() + "\n```";
}

}  // namespace

SimulatedModel::SimulatedModel(const std::vector<TaskSpec>& tasks)
    : SimulatedModel(tasks, Options{}) {}

SimulatedModel::SimulatedModel(const std::vector<TaskSpec>& tasks, Options options)
    : options_(options) {
  for (const auto& t : tasks) by_instruction_.emplace(t.instruction, t);
}

std::string SimulatedModel::lesson_marker(const TaskSpec& task) {
  return "[procedure: " + procedure_family(task) + " | subset: " +
         std::string(to_string(task.category)) + "]";
}

std::vector<Action> SimulatedModel::flawed_plan(const TaskSpec& task) {
  const auto family = split_family(procedure_family(task));
  std::vector<Action> plan = task.oracle;
  if (family.empty()) return plan;
  const std::string& first = family.front();
  bool picked = false;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const Action& a = plan[i];
    bool critical = false;
    if (first == "clean") {
      critical = a.skill == Skill::place && a.destination == "sink";
    } else if (first == "heat") {
      critical = a.skill == Skill::open && a.target == "microwave";
    } else if (first == "cool") {
      critical = picked && a.skill == Skill::open && a.target == "fridge";
    } else {
      critical = picked && a.skill == Skill::open;
    }
    if (a.skill == Skill::pick) picked = true;
    if (critical) {
      plan.erase(plan.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  return plan;
}

const TaskSpec* SimulatedModel::find_task(std::string_view prompt) const {
  const auto it = by_instruction_.find(line_value(prompt, "Instruction: "));
  return it == by_instruction_.end() ? nullptr : &it->second;
}

std::string SimulatedModel::chat(const ChatRequest& request) {
  const std::string prompt = request.last_user_message();
  if (prompt.starts_with("Update the strategy pool")) return consolidation_reply(prompt);
  const TaskSpec* task = find_task(prompt);
  if (task == nullptr) return "I do not recognise this task.";
  if (prompt.starts_with("Write a coarse plan")) return plan_reply(*task);
  if (prompt.starts_with("Choose the next action")) return action_reply(*task, prompt);
  if (prompt.starts_with("Reflect on this") || prompt.starts_with("Compare the agent")) {
    return reflection_reply(*task, prompt);
  }
  return "I do not recognise this request.";
}

std::string SimulatedModel::plan_reply(const TaskSpec& task) const {
  std::string objects;
  std::string destinations;
  for (const auto& g : task.goal) {
    if (g.attribute != kAtAttribute) continue;
    if (!objects.empty()) {
      objects += ", ";
      destinations += ", ";
    }
    objects += g.object;
    destinations += g.value;
  }
  return "- Task type: " + category_intent(task.category) + ".\n" +
         "- Procedure (" + procedure_family(task) + "): " + family_lessons(procedure_family(task)) +
         ".\n" + "- Key objects: " + objects + "; destination: " + destinations + ".\n" +
         "- Check the feedback after every action and confirm the goal before finishing.";
}

std::string SimulatedModel::action_reply(const TaskSpec& task, std::string_view prompt) const {
  const std::string marker = lesson_marker(task);
  bool informed = false;
  std::size_t seen = 0;
  for (const auto& line : text::split_lines(prompt)) {
    if (!line.starts_with("Strategy (")) continue;
    if (seen++ >= options_.attention_window) break;
    if (text::contains(line, marker)) informed = true;
  }
  const std::vector<Action> plan = informed ? task.oracle : flawed_plan(task);

  const std::string step_text = line_value(prompt, "Current step: ");
  std::size_t step = 0;
  try {
    step = std::stoul(step_text);
  } catch (...) {
    return "noop";
  }
  if (step == 0 || step > plan.size()) return "noop";
  return plan[step - 1].to_string();
}

std::string SimulatedModel::reflection_reply(const TaskSpec& task,
                                             std::string_view prompt) const {
  const std::string marker = lesson_marker(task);
  const std::string family = procedure_family(task);
  const bool success = line_value(prompt, "Outcome: ") == "success";
  const std::string lesson = family_lessons(family);
  nlohmann::ordered_json insights = nlohmann::ordered_json::array();
  if (success) {
    insights.push_back({{"kind", "success_pattern"},
                        {"text", marker + " For " + category_intent(task.category) + ": " +
                                     lesson + "."}});
    insights.push_back({{"kind", "repeatable_steps"},
                        {"text", marker + " Fetch the object, " + lesson +
                                     ", then deliver it to the destination."}});
  } else {
    insights.push_back({{"kind", "avoidance_guideline"},
                        {"text", marker + " For " + category_intent(task.category) +
                                     ": always " + lesson + "."}});
    insights.push_back({{"kind", "failure_summary"},
                        {"text", marker + " The goal was missed because a precondition of the " +
                                     split_family(family).front() + " step was skipped."}});
  }
  return fenced({{"insights", insights}});
}

std::string SimulatedModel::consolidation_reply(std::string_view prompt) const {
  struct Known {
    std::uint64_t id;
    bool failure_kind;
  };
  std::map<std::string, Known> pool;  // marker -> entry
  std::vector<std::pair<InsightKind, std::string>> insights;
  bool in_reflection = false;
  for (const auto& line : text::split_lines(prompt)) {
    if (line.starts_with("New reflection")) in_reflection = true;
    if (!in_reflection && line.starts_with("[")) {
      const auto close = line.find(']');
      const auto kind_open = line.find('(', close);
      const auto kind_close = line.find(')', kind_open);
      if (close == std::string::npos || kind_close == std::string::npos) continue;
      const auto marker = marker_in(line);
      if (!marker) continue;
      const auto kind = parse_insight_kind(line.substr(kind_open + 1, kind_close - kind_open - 1));
      const std::uint64_t id = std::stoull(line.substr(1, close - 1));
      pool.emplace(*marker, Known{id, kind && is_failure_kind(*kind)});
    } else if (in_reflection && line.starts_with("- (")) {
      const auto kind_close = line.find(')');
      if (kind_close == std::string::npos) continue;
      const auto kind = parse_insight_kind(line.substr(3, kind_close - 3));
      insights.emplace_back(kind.value_or(InsightKind::raw),
                            text::trim(std::string_view(line).substr(kind_close + 1)));
    }
  }

  nlohmann::ordered_json ops = nlohmann::ordered_json::array();
  std::size_t redundant = 0;
  for (const auto& [kind, content] : insights) {
    const auto marker = marker_in(content);
    if (!marker) {
      ++redundant;
      continue;
    }
    auto it = pool.find(*marker);
    if (it == pool.end()) {
      ops.push_back({{"op", "add"}, {"kind", std::string(to_string(kind))}, {"content", content}});
      pool.emplace(*marker, Known{0, is_failure_kind(kind)});
    } else if (it->second.failure_kind && is_success_kind(kind) && it->second.id != 0) {
      ops.push_back({{"op", "revise"},
                     {"id", it->second.id},
                     {"kind", std::string(to_string(kind))},
                     {"content", content}});
      it->second.failure_kind = false;
    } else {
      ++redundant;
    }
  }
  nlohmann::ordered_json reply;
  reply["ops"] = ops;
  reply["rationale"] = std::to_string(ops.size()) + " change(s), " + std::to_string(redundant) +
                       " redundant insight(s)";
  return fenced(reply);
}

}  // namespace elite
