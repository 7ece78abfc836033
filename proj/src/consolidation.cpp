#include "elite/consolidation.hpp"

#include "elite/error.hpp"
#include "elite/json_extract.hpp"
#include "elite/text.hpp"

namespace elite {

namespace {

std::string one_line(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::optional<EntryId> read_id(const nlohmann::json& item) {
  for (const char* key : {"id", "target_id"}) {
    const auto it = item.find(key);
    if (it == item.end()) continue;
    if (it->is_number_unsigned()) return it->get<EntryId>();
    if (it->is_number_integer() && it->get<long long>() >= 0) {
      return static_cast<EntryId>(it->get<long long>());
    }
    if (it->is_string()) {
      const std::string s = text::trim(it->get<std::string>());
      if (!s.empty() && s.size() < 20 &&
          s.find_first_not_of("0123456789") == std::string::npos) {
        return std::stoull(s);
      }
    }
    return std::nullopt;
  }
  return std::nullopt;
}

std::string read_string(const nlohmann::json& item, const char* key) {
  const auto it = item.find(key);
  if (it == item.end() || !it->is_string()) return {};
  return text::trim(it->get<std::string>());
}

}  // namespace

std::string render_pool_for_prompt(const StrategyPool& pool) {
  if (pool.empty()) return "(empty)";
  std::string out;
  for (const auto& e : pool.entries()) {
    if (!out.empty()) out += '\n';
    out += "[" + std::to_string(e.id) + "] (" + std::string(to_string(e.kind)) + ") " +
           text::clip(one_line(e.content), kPromptEntryChars);
  }
  return out;
}

std::string render_insights(const Reflection& reflection) {
  std::string out = "Outcome: " + std::string(to_string(reflection.outcome));
  for (const auto& i : reflection.insights) {
    out += "\n- (" + std::string(to_string(i.kind)) + ") " + one_line(i.text);
  }
  return out;
}

std::vector<DeltaOp> adds_for(const Reflection& reflection, const EpisodeContext& context) {
  std::vector<DeltaOp> ops;
  for (const auto& i : reflection.insights) {
    ops.emplace_back(AddOp{i.text, i.kind, context.plan_trace, context.instruction});
  }
  return ops;
}

std::optional<ConsolidationResult> parse_ops(std::string_view reply,
                                             const StrategyPool& snapshot,
                                             const EpisodeContext& context) {
  const auto object = extract_first_object(reply);
  if (!object) return std::nullopt;
  const auto ops = object->find("ops");
  if (ops == object->end() || !ops->is_array()) return std::nullopt;

  ConsolidationResult result;
  if (auto r = read_string(*object, "rationale"); !r.empty()) result.rationale = r;

  for (const auto& item : *ops) {
    auto reject = [&](std::string reason) {
      result.rejected.push_back({item.dump(), std::move(reason)});
    };
    if (!item.is_object()) {
      reject("not an object");
      continue;
    }
    const std::string op = text::to_lower(read_string(item, "op"));
    const std::string content = read_string(item, "content");
    std::optional<InsightKind> kind;
    const std::string kind_name = read_string(item, "kind");
    if (!kind_name.empty()) {
      kind = parse_insight_kind(kind_name);
      if (!kind) {
        reject("unknown kind");
        continue;
      }
    }

    if (op == "add") {
      if (content.empty()) {
        reject("empty content");
        continue;
      }
      result.proposed.emplace_back(AddOp{content, kind.value_or(InsightKind::raw),
                                         context.plan_trace, context.instruction});
    } else if (op == "revise" || op == "remove") {
      const auto id = read_id(item);
      if (!id) {
        reject("missing id");
        continue;
      }
      if (!snapshot.contains(*id)) {
        reject("unknown id");
        continue;
      }
      if (op == "remove") {
        result.proposed.emplace_back(RemoveOp{*id});
      } else if (content.empty()) {
        reject("empty content");
      } else {
        result.proposed.emplace_back(ReviseOp{*id, content, kind});
      }
    } else {
      reject("unknown op");
    }
  }
  return result;
}

ConsolidationResult propose_deltas(const Reflection& reflection, const StrategyPool& snapshot,
                                   const EpisodeContext& context, ChatBackend& backend,
                                   const PromptSet& prompts) {
  if (reflection.insights.empty()) {
    throw InvalidArgument("consolidation needs at least one insight");
  }
  const auto request = prompts.render(prompt_names::consolidate,
                                      {{"pool", render_pool_for_prompt(snapshot)},
                                       {"insights", render_insights(reflection)},
                                       {"instruction", context.instruction}});
  ChatRequest attempt = request;
  int attempts = 0;
  std::string reason;
  try {
    for (int i = 0; i <= kConsolidationParseRetries; ++i) {
      attempts = i + 1;
      const std::string reply = backend.chat(attempt);
      if (auto parsed = parse_ops(reply, snapshot, context)) {
        parsed->attempts = attempts;
        return *std::move(parsed);
      }
      attempt = request;
      attempt.messages.back().content +=
          "\n\nYour previous reply could not be parsed. Reply with one fenced JSON object of "
          "the form {\"ops\": [...], \"rationale\": \"...\"} and nothing else.";
    }
    reason = "consolidator reply unparseable after " + std::to_string(attempts) + " attempts";
  } catch (const TransportError& e) {
    reason = std::string("consolidator backend failed: ") + e.what();
  }
  ConsolidationResult result;
  result.proposed = adds_for(reflection, context);
  result.fallback = true;
  result.attempts = attempts;
  result.fallback_reason = std::move(reason);
  return result;
}

std::pair<StrategyPool, ConsolidationReport> consolidate(
    const std::optional<Reflection>& reflection, const StrategyPool& pool, int episode,
    const EpisodeContext& context, ChatBackend& backend, const Embedder& embedder,
    const PromptSet& prompts, const ApplyOptions& options) {
  ConsolidationReport report;
  if (!reflection) {
    report.skipped = true;
    return {pool, std::move(report)};
  }
  report.proposal = propose_deltas(*reflection, pool, context, backend, prompts);
  auto applied = apply_delta(pool, report.proposal.proposed, episode, embedder, options);
  report.apply_rejected = std::move(applied.rejected);
  report.added_ids = std::move(applied.added_ids);
  report.evicted_ids = std::move(applied.evicted_ids);
  return {std::move(applied.pool), std::move(report)};
}

}  // namespace elite
