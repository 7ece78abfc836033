#include "elite/planning.hpp"

#include <array>

#include "elite/error.hpp"
#include "elite/text.hpp"

namespace elite {

namespace {

const std::array<std::string_view, 3> kGenericBullets = {
    "Locate the objects named in the instruction before acting on them.",
    "Check the feedback of every action and retry a step whose precondition failed.",
    "Confirm that every part of the goal holds before finishing.",
};

// Length of the bullet marker at the start of `line`, 0 when there is none.
std::size_t marker_length(std::string_view line) {
  if (line.starts_with("- ") || line.starts_with("* ")) return 2;
  if (line.starts_with("\xE2\x80\xA2")) return 3;  // U+2022 bullet
  std::size_t i = 0;
  while (i < line.size() && i < 3 && line[i] >= '0' && line[i] <= '9') ++i;
  if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) return i + 1;
  return 0;
}

}  // namespace

std::vector<std::string> split_bullets(std::string_view text_in) {
  std::vector<std::string> marked;
  std::vector<std::string> plain;
  for (const auto& raw : text::split_lines(text_in)) {
    const std::string line = text::trim(raw);
    if (line.empty() || line.starts_with("```")) continue;
    if (const auto n = marker_length(line); n > 0) {
      std::string body = text::trim(std::string_view(line).substr(n));
      if (!body.empty()) marked.push_back(std::move(body));
    } else {
      plain.push_back(line);
    }
  }
  return marked.empty() ? plain : marked;
}

CoarsePlan normalize_plan(std::string raw_text, std::string instruction) {
  CoarsePlan plan;
  plan.bullets = split_bullets(raw_text);
  if (plan.bullets.size() > kMaxPlanBullets) {
    plan.bullets.resize(kMaxPlanBullets);
    plan.truncated = true;
  }
  for (std::size_t i = 0; plan.bullets.size() < kMinPlanBullets; ++i) {
    plan.bullets.emplace_back(kGenericBullets[i]);
    plan.padded = true;
  }
  plan.raw_text = std::move(raw_text);
  plan.source_instruction = std::move(instruction);
  return plan;
}

CoarsePlan coarse_plan(const std::string& instruction, const Observation& initial,
                       ChatBackend& backend, const PromptSet& prompts) {
  const auto request = prompts.render(prompt_names::coarse_plan,
                                      {{"instruction", instruction},
                                       {"observation", initial.text}});
  try {
    std::string reply = backend.chat(request);
    if (!text::trim(reply).empty()) return normalize_plan(std::move(reply), instruction);
  } catch (const TransportError&) {
  }
  CoarsePlan plan;
  plan.bullets = {instruction};
  plan.raw_text = instruction;
  plan.source_instruction = instruction;
  plan.degraded = true;
  return plan;
}

std::string format_strategy_section(const RetrievedSet& strategies) {
  if (strategies.empty()) {
    return "No prior strategies are available for this task.";
  }
  std::string out =
      "Strategies learned from earlier tasks. Apply them selectively, only where they "
      "are relevant to the current task:";
  for (const auto& s : strategies) {
    out += "\nStrategy (";
    out += to_string(s.entry.kind);
    out += "): ";
    out += s.entry.content;
  }
  return out;
}

std::optional<Action> match_action(std::string_view reply,
                                   const std::vector<Action>& catalog) {
  const std::string trimmed = text::trim(reply);
  for (const auto& a : catalog) {
    if (a.to_string() == trimmed) return a;
  }
  const std::string squashed = text::squash(trimmed);
  for (const auto& a : catalog) {
    if (text::squash(a.to_string()) == squashed) return a;
  }
  for (const auto& a : catalog) {
    if (text::contains(squashed, text::squash(a.to_string()))) return a;
  }
  return std::nullopt;
}

ActionChoice next_action(const std::string& instruction, const Trajectory& history,
                         const Observation& current, int step, int max_steps,
                         const RetrievedSet& strategies, ChatBackend& backend,
                         const PromptSet& prompts) {
  if (current.catalog.empty()) throw InvalidArgument("empty action catalog");
  const auto request = prompts.render(
      prompt_names::next_action,
      {{"strategies", format_strategy_section(strategies)},
       {"instruction", instruction},
       {"history", history.empty() ? "(no actions yet)" : render_trajectory(history)},
       {"observation", current.text},
       {"step", std::to_string(step)},
       {"max_steps", std::to_string(max_steps)},
       {"actions", current.catalog_text()}},
      64);

  ActionChoice choice;
  ChatRequest attempt = request;
  for (int i = 0; i <= kActionParseRetries; ++i) {
    choice.attempts = i + 1;
    choice.reply = backend.chat(attempt);
    if (auto a = match_action(choice.reply, current.catalog)) {
      choice.action = *a;
      return choice;
    }
    attempt = request;
    attempt.messages.back().content +=
        "\n\nYour previous reply \"" + text::clip(text::trim(choice.reply), 80) +
        "\" is not one of the valid actions. Reply with exactly one action copied from the "
        "list above.";
  }
  choice.action = Action::noop();
  choice.unparseable = true;
  return choice;
}

}  // namespace elite
