#include "elite/trajectory.hpp"

#include "elite/text.hpp"

namespace elite {

std::string_view to_string(Outcome outcome) {
  return outcome == Outcome::success ? "success" : "failure";
}

std::string render_step(std::size_t t, const Step& step) {
  std::string obs = step.observation;
  for (char& c : obs) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return std::to_string(t) + ". OBS " + text::clip(text::trim(obs), kObservationSummaryChars) +
         " | ACT " + step.action.to_string() + " | FB " + step.feedback;
}

std::string render_trajectory(const Trajectory& trajectory) {
  std::string out;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    if (i > 0) out += '\n';
    out += render_step(i + 1, trajectory[i]);
  }
  return out;
}

std::string render_actions(const std::vector<Action>& actions) {
  std::string out;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (i > 0) out += '\n';
    out += std::to_string(i + 1) + ". " + actions[i].to_string();
  }
  return out;
}

}  // namespace elite
