#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "elite/gridhouse.hpp"

namespace elite {

enum class Outcome { success, failure };

std::string_view to_string(Outcome outcome);

// One executed step: the observation the action was chosen from, the action
// and the environment's feedback.
struct Step {
  std::string observation;
  Action action;
  std::string feedback;
};

using Trajectory = std::vector<Step>;

inline constexpr std::size_t kObservationSummaryChars = 200;

// "t. OBS <summary> | ACT <action> | FB <feedback>", one line per step,
// numbered from 1, observation newlines folded to spaces and clipped.
std::string render_step(std::size_t t, const Step& step);
std::string render_trajectory(const Trajectory& trajectory);

// Numbered action list for trajectories without observations.
std::string render_actions(const std::vector<Action>& actions);

}  // namespace elite
