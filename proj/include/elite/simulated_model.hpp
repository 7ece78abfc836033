#pragma once

#include <map>
#include <string>
#include <vector>

#include "elite/gridhouse.hpp"
#include "elite/model_backend.hpp"

namespace elite {

// Deterministic stand-in for a chat model over a known task list, used for
// offline runs and the learning-dynamics experiments.
//
// It answers all six prompt kinds. Its action policy follows a task's
// oracle only when one of the first `attention_window` strategies in the
// prompt carries the task's lesson marker (category and procedure family);
// otherwise it follows the oracle with the first procedure's critical step
// missing. Reflections carry the marker, and the consolidator keeps one
// entry per marker, upgrading a failure lesson once a success is seen.
class SimulatedModel final : public ChatBackend {
 public:
  struct Options {
    std::size_t attention_window = 4;
  };

  explicit SimulatedModel(const std::vector<TaskSpec>& tasks);
  SimulatedModel(const std::vector<TaskSpec>& tasks, Options options);

  std::string chat(const ChatRequest& request) override;
  std::string name() const override { return "simulated"; }

  // "[procedure: heat | subset: spatial]"
  static std::string lesson_marker(const TaskSpec& task);
  // Oracle with the first procedure's critical step removed.
  static std::vector<Action> flawed_plan(const TaskSpec& task);

 private:
  const TaskSpec* find_task(std::string_view prompt) const;
  std::string plan_reply(const TaskSpec& task) const;
  std::string action_reply(const TaskSpec& task, std::string_view prompt) const;
  std::string reflection_reply(const TaskSpec& task, std::string_view prompt) const;
  std::string consolidation_reply(std::string_view prompt) const;

  std::map<std::string, TaskSpec, std::less<>> by_instruction_;
  Options options_;
};

}  // namespace elite
