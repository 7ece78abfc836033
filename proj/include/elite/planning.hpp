#pragma once

#include <string>
#include <vector>

#include "elite/gridhouse.hpp"
#include "elite/model_backend.hpp"
#include "elite/prompts.hpp"
#include "elite/retrieval.hpp"
#include "elite/trajectory.hpp"

namespace elite {

inline constexpr std::size_t kMinPlanBullets = 3;
inline constexpr std::size_t kMaxPlanBullets = 6;

struct CoarsePlan {
  std::vector<std::string> bullets;
  std::string raw_text;  // verbatim reply; this is what gets embedded
  std::string source_instruction;
  bool truncated = false;
  bool padded = false;
  bool degraded = false;  // backend failed; raw_text is the instruction
};

// Bullets from "- ", "* ", "• ", "1. " or "1) " prefixed lines; when no line
// carries a marker every non-empty line counts.
std::vector<std::string> split_bullets(std::string_view text);

// Truncates to six bullets or pads to three with fixed generic bullets.
CoarsePlan normalize_plan(std::string raw_text, std::string instruction);

CoarsePlan coarse_plan(const std::string& instruction, const Observation& initial,
                       ChatBackend& backend, const PromptSet& prompts);

std::string format_strategy_section(const RetrievedSet& strategies);

inline constexpr std::string_view kUnparseableFeedback = "unparseable action";
inline constexpr int kActionParseRetries = 2;

// Exact, then case/whitespace-insensitive, then first catalog action that
// occurs in the reply. Empty when nothing matches.
std::optional<Action> match_action(std::string_view reply,
                                   const std::vector<Action>& catalog);

struct ActionChoice {
  Action action;
  bool unparseable = false;  // noop substituted after the retries ran out
  int attempts = 1;
  std::string reply;         // last raw reply
};

// Throws TransportError when the backend fails.
ActionChoice next_action(const std::string& instruction, const Trajectory& history,
                         const Observation& current, int step, int max_steps,
                         const RetrievedSet& strategies, ChatBackend& backend,
                         const PromptSet& prompts);

}  // namespace elite
