#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "elite/model_backend.hpp"
#include "elite/prompts.hpp"
#include "elite/reflection.hpp"
#include "elite/strategy_pool.hpp"

namespace elite {

inline constexpr std::size_t kPromptEntryChars = 500;
inline constexpr int kConsolidationParseRetries = 2;

struct RawRejection {
  std::string op_text;
  std::string reason;
};

struct ConsolidationResult {
  std::vector<DeltaOp> proposed;
  std::vector<RawRejection> rejected;
  std::optional<std::string> rationale;
  bool fallback = false;  // model output unusable; one Add per insight
  int attempts = 1;
  std::string fallback_reason;
};

// Episode context attached to new entries.
struct EpisodeContext {
  std::string plan_trace;
  std::string instruction;
};

// "[id] (kind) content" per entry in id order, content clipped.
std::string render_pool_for_prompt(const StrategyPool& pool);
std::string render_insights(const Reflection& reflection);

// One Add per insight carrying the episode's plan trace.
std::vector<DeltaOp> adds_for(const Reflection& reflection, const EpisodeContext& context);

// Parses {"ops": [...]} and validates each op against `snapshot`. Empty when
// the reply holds no object with an ops array. Never throws.
std::optional<ConsolidationResult> parse_ops(std::string_view reply,
                                             const StrategyPool& snapshot,
                                             const EpisodeContext& context);

// Never throws on backend failure; falls back to adds_for().
ConsolidationResult propose_deltas(const Reflection& reflection, const StrategyPool& snapshot,
                                   const EpisodeContext& context, ChatBackend& backend,
                                   const PromptSet& prompts);

struct ConsolidationReport {
  bool skipped = false;  // no reflection to consolidate
  ConsolidationResult proposal;
  std::vector<RejectedOp> apply_rejected;
  std::vector<EntryId> added_ids;
  std::vector<EntryId> evicted_ids;
};

// propose_deltas followed by apply_delta. Without a reflection the pool is
// returned unchanged.
std::pair<StrategyPool, ConsolidationReport> consolidate(
    const std::optional<Reflection>& reflection, const StrategyPool& pool, int episode,
    const EpisodeContext& context, ChatBackend& backend, const Embedder& embedder,
    const PromptSet& prompts, const ApplyOptions& options = {});

}  // namespace elite
