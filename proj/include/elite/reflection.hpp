#pragma once

#include <string>
#include <vector>

#include "elite/model_backend.hpp"
#include "elite/prompts.hpp"
#include "elite/strategy_pool.hpp"
#include "elite/trajectory.hpp"

namespace elite {

struct Insight {
  InsightKind kind = InsightKind::raw;
  std::string text;

  bool operator==(const Insight&) const = default;
};

enum class ReflectionMode { online, comparative };

std::string_view to_string(ReflectionMode mode);

struct Reflection {
  std::string task_id;
  Outcome outcome = Outcome::failure;
  std::vector<Insight> insights;
  ReflectionMode mode = ReflectionMode::online;
  std::vector<std::string> warnings;  // coercions, truncation, fallback
  bool fallback = false;              // reply never parsed; single raw insight
  int attempts = 1;
};

inline constexpr std::size_t kMaxInsights = 8;
inline constexpr int kReflectionParseRetries = 2;

// True when `kind` may appear in a reflection with this outcome.
bool kind_allowed(InsightKind kind, Outcome outcome);

// Parses {"insights": [{"kind", "text"}, ...]} out of a reply. Entries with
// a missing or empty text are dropped, unknown kinds become raw, kinds that
// contradict the outcome are coerced to raw (with a warning), and more than
// kMaxInsights entries are truncated. Empty when nothing usable was found.
// Never throws.
std::optional<std::vector<Insight>> parse_insights(std::string_view reply, Outcome outcome,
                                                   std::vector<std::string>* warnings);

struct ReflectInput {
  std::string task_id;
  std::string instruction;
  Trajectory trajectory;
  Outcome outcome = Outcome::failure;
};

// Throws TransportError when the backend fails; InvalidArgument on an empty
// trajectory.
Reflection reflect(const ReflectInput& input, ChatBackend& backend, const PromptSet& prompts);

// Index of the first step whose action differs from the ground truth, or
// std::nullopt when the agent's actions equal the ground truth exactly.
std::optional<std::size_t> first_divergence(const Trajectory& agent,
                                            const std::vector<Action>& ground_truth);
std::string describe_divergence(const Trajectory& agent,
                                const std::vector<Action>& ground_truth);

Reflection reflect_comparative(const ReflectInput& input,
                               const std::vector<Action>& ground_truth, ChatBackend& backend,
                               const PromptSet& prompts);

}  // namespace elite
