#include "elite/reflection.hpp"

#include "elite/error.hpp"
#include "elite/json_extract.hpp"
#include "elite/text.hpp"

namespace elite {

std::string_view to_string(ReflectionMode mode) {
  return mode == ReflectionMode::online ? "online" : "comparative";
}

bool kind_allowed(InsightKind kind, Outcome outcome) {
  if (kind == InsightKind::raw) return true;
  return outcome == Outcome::success ? is_success_kind(kind) : is_failure_kind(kind);
}

std::optional<std::vector<Insight>> parse_insights(std::string_view reply, Outcome outcome,
                                                   std::vector<std::string>* warnings) {
  auto warn = [&](std::string w) {
    if (warnings) warnings->push_back(std::move(w));
  };
  const auto object = extract_first_object(reply);
  if (!object) return std::nullopt;
  const auto it = object->find("insights");
  if (it == object->end() || !it->is_array()) return std::nullopt;

  std::vector<Insight> out;
  for (const auto& item : *it) {
    if (!item.is_object()) continue;
    const auto t = item.find("text");
    if (t == item.end() || !t->is_string()) continue;
    Insight insight;
    insight.text = text::trim(t->get<std::string>());
    if (insight.text.empty()) continue;
    const auto k = item.find("kind");
    if (k != item.end() && k->is_string()) {
      if (auto parsed = parse_insight_kind(k->get<std::string>())) {
        insight.kind = *parsed;
      } else {
        warn("unknown insight kind \"" + text::clip(k->get<std::string>(), 40) +
             "\" treated as raw");
      }
    }
    if (!kind_allowed(insight.kind, outcome)) {
      warn("insight kind " + std::string(to_string(insight.kind)) + " contradicts outcome " +
           std::string(to_string(outcome)) + "; coerced to raw");
      insight.kind = InsightKind::raw;
    }
    out.push_back(std::move(insight));
  }
  if (out.empty()) return std::nullopt;
  if (out.size() > kMaxInsights) {
    warn(std::to_string(out.size()) + " insights truncated to " + std::to_string(kMaxInsights));
    out.resize(kMaxInsights);
  }
  return out;
}

namespace {

constexpr std::string_view kCorrectiveSuffix =
    "\n\nYour previous reply could not be parsed. Reply with one fenced JSON object of the "
    "form {\"insights\": [{\"kind\": \"...\", \"text\": \"...\"}]} and nothing else.";

Reflection run(const ReflectInput& input, const ChatRequest& request, ReflectionMode mode,
               ChatBackend& backend) {
  Reflection r;
  r.task_id = input.task_id;
  r.outcome = input.outcome;
  r.mode = mode;
  ChatRequest attempt = request;
  std::string reply;
  for (int i = 0; i <= kReflectionParseRetries; ++i) {
    r.attempts = i + 1;
    reply = backend.chat(attempt);
    std::vector<std::string> warnings;
    if (auto insights = parse_insights(reply, input.outcome, &warnings)) {
      r.insights = std::move(*insights);
      r.warnings = std::move(warnings);
      return r;
    }
    attempt = request;
    attempt.messages.back().content += kCorrectiveSuffix;
  }
  r.fallback = true;
  r.warnings.push_back("reflection reply unparseable after " + std::to_string(r.attempts) +
                       " attempts; kept verbatim as a raw insight");
  // A raw insight needs non-empty text even when the model replied nothing.
  r.insights.push_back({InsightKind::raw, text::trim(reply).empty() ? "(empty reply)" : reply});
  return r;
}

void require_trajectory(const ReflectInput& input) {
  if (input.trajectory.empty()) throw InvalidArgument("reflection needs a non-empty trajectory");
}

}  // namespace

Reflection reflect(const ReflectInput& input, ChatBackend& backend, const PromptSet& prompts) {
  require_trajectory(input);
  const auto name = input.outcome == Outcome::success ? prompt_names::reflect_success
                                                      : prompt_names::reflect_failure;
  const auto request = prompts.render(
      name, {{"instruction", input.instruction},
             {"trajectory", render_trajectory(input.trajectory)}});
  return run(input, request, ReflectionMode::online, backend);
}

std::optional<std::size_t> first_divergence(const Trajectory& agent,
                                            const std::vector<Action>& ground_truth) {
  const std::size_t n = std::min(agent.size(), ground_truth.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!(agent[i].action == ground_truth[i])) return i;
  }
  if (agent.size() != ground_truth.size()) return n;
  return std::nullopt;
}

std::string describe_divergence(const Trajectory& agent,
                                const std::vector<Action>& ground_truth) {
  const auto d = first_divergence(agent, ground_truth);
  if (!d) return "none: the agent's actions match the ground truth exactly";
  const std::size_t i = *d;
  const std::string step = "step " + std::to_string(i + 1);
  if (i >= agent.size()) {
    return step + ": the agent stopped, the ground truth continues with " +
           ground_truth[i].to_string();
  }
  if (i >= ground_truth.size()) {
    return step + ": the ground truth is complete, the agent continued with " +
           agent[i].action.to_string();
  }
  return step + ": the agent chose " + agent[i].action.to_string() +
         ", the ground truth chose " + ground_truth[i].to_string();
}

Reflection reflect_comparative(const ReflectInput& input,
                               const std::vector<Action>& ground_truth, ChatBackend& backend,
                               const PromptSet& prompts) {
  require_trajectory(input);
  if (ground_truth.empty()) throw InvalidArgument("comparative reflection needs a ground truth");
  const std::string allowed = input.outcome == Outcome::success
                                  ? "success_pattern, repeatable_steps"
                                  : "failure_summary, avoidance_guideline";
  const auto request = prompts.render(
      prompt_names::reflect_comparative,
      {{"instruction", input.instruction},
       {"outcome", std::string(to_string(input.outcome))},
       {"trajectory", render_trajectory(input.trajectory)},
       {"ground_truth", render_actions(ground_truth)},
       {"divergence", describe_divergence(input.trajectory, ground_truth)},
       {"allowed_kinds", allowed}});
  return run(input, request, ReflectionMode::comparative, backend);
}

}  // namespace elite
