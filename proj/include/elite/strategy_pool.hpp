#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "elite/embed.hpp"

namespace elite {

enum class InsightKind {
  success_pattern,
  repeatable_steps,
  failure_summary,
  avoidance_guideline,
  raw,
};

std::string_view to_string(InsightKind kind);
std::optional<InsightKind> parse_insight_kind(std::string_view name);

bool is_success_kind(InsightKind kind);
bool is_failure_kind(InsightKind kind);

using EntryId = std::uint64_t;

// Maximum stored content length, in characters, after trimming.
inline constexpr std::size_t kMaxEntryContent = 2000;

struct StrategyEntry {
  EntryId id = 0;
  std::string content;
  InsightKind kind = InsightKind::raw;
  // Coarse plan of the episode that produced the entry; the embedding is
  // computed from this text.
  std::string plan_trace;
  // Instruction of the originating task (used by instruction-similarity
  // retrieval).
  std::string instruction;
  Vector embedding;
  int created_episode = 1;
  std::optional<int> revised_episode;
  std::optional<int> last_retrieved_episode;

  bool operator==(const StrategyEntry&) const = default;
};

struct AddOp {
  std::string content;
  InsightKind kind = InsightKind::raw;
  std::string plan_trace;
  std::string instruction;

  bool operator==(const AddOp&) const = default;
};

struct ReviseOp {
  EntryId target_id = 0;
  std::string new_content;
  std::optional<InsightKind> new_kind;

  bool operator==(const ReviseOp&) const = default;
};

struct RemoveOp {
  EntryId target_id = 0;

  bool operator==(const RemoveOp&) const = default;
};

using DeltaOp = std::variant<AddOp, ReviseOp, RemoveOp>;

nlohmann::ordered_json to_json(const DeltaOp& op);
std::string describe(const DeltaOp& op);

struct RejectedOp {
  DeltaOp op;
  std::string reason;
};

// The evolving strategy pool. Mutated only through apply_delta (and the
// retrieval bookkeeping in mark_retrieved); everything else is read-only.
class StrategyPool {
 public:
  explicit StrategyPool(std::size_t dim);

  // Rebuilds a pool from persisted parts. Throws InvalidArgument when the
  // parts violate a pool invariant.
  static StrategyPool restore(std::size_t dim, EntryId next_id, int version,
                              std::vector<StrategyEntry> entries);

  std::size_t dim() const { return dim_; }
  EntryId next_id() const { return next_id_; }
  int version() const { return version_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<StrategyEntry>& entries() const { return entries_; }

  const StrategyEntry* find(EntryId id) const;
  bool contains(EntryId id) const { return find(id) != nullptr; }

  // Records that these entries were injected into a prompt during `episode`.
  // Drives least-recently-retrieved eviction; does not bump the version.
  void mark_retrieved(std::span<const EntryId> ids, int episode);

  // Empty when every invariant holds, otherwise one message per violation.
  std::vector<std::string> check_invariants() const;

  bool operator==(const StrategyPool&) const = default;

 private:
  friend struct PoolMutator;

  std::size_t dim_;
  EntryId next_id_ = 1;
  int version_ = 0;
  std::vector<StrategyEntry> entries_;
};

StrategyPool new_pool(std::size_t dim);

struct ApplyOptions {
  // 0 disables the cap. Otherwise the least recently retrieved entries
  // (falling back to creation episode, then id) are evicted after the batch.
  std::size_t max_entries = 0;
};

struct DeltaResult {
  StrategyPool pool;
  std::vector<RejectedOp> rejected;
  std::vector<EntryId> added_ids;
  std::vector<EntryId> evicted_ids;
};

// Applies ops in order. Add assigns the next id and embeds its plan trace;
// Revise replaces content (and optionally kind) but keeps id, embedding and
// plan trace; Remove deletes. Invalid ops are skipped and reported. The
// version always advances by exactly one.
DeltaResult apply_delta(const StrategyPool& pool, std::span<const DeltaOp> ops,
                        int episode, const Embedder& embed,
                        const ApplyOptions& options = {});

// Pool file: a header object line followed by one entry object per line.
void save_pool(const StrategyPool& pool, const std::filesystem::path& path);
StrategyPool load_pool(const std::filesystem::path& path);

std::string serialize_pool(const StrategyPool& pool);
StrategyPool parse_pool(std::string_view contents);

nlohmann::ordered_json entry_to_json(const StrategyEntry& entry);

}  // namespace elite
