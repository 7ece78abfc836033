#include "elite/strategy_pool.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "elite/error.hpp"
#include "elite/text.hpp"

namespace elite {

namespace {

constexpr double kNormTolerance = 1e-6;
constexpr int kFormatVersion = 1;

std::string clean_content(std::string_view raw) {
  return text::utf8_truncate(text::trim(raw), kMaxEntryContent);
}

}  // namespace

std::string_view to_string(InsightKind kind) {
  switch (kind) {
    case InsightKind::success_pattern:
      return "success_pattern";
    case InsightKind::repeatable_steps:
      return "repeatable_steps";
    case InsightKind::failure_summary:
      return "failure_summary";
    case InsightKind::avoidance_guideline:
      return "avoidance_guideline";
    case InsightKind::raw:
      return "raw";
  }
  return "raw";
}

std::optional<InsightKind> parse_insight_kind(std::string_view name) {
  const std::string n = text::to_lower(text::trim(name));
  for (auto kind : {InsightKind::success_pattern, InsightKind::repeatable_steps,
                    InsightKind::failure_summary,
                    InsightKind::avoidance_guideline, InsightKind::raw}) {
    if (n == to_string(kind)) return kind;
  }
  return std::nullopt;
}

bool is_success_kind(InsightKind kind) {
  return kind == InsightKind::success_pattern ||
         kind == InsightKind::repeatable_steps;
}

bool is_failure_kind(InsightKind kind) {
  return kind == InsightKind::failure_summary ||
         kind == InsightKind::avoidance_guideline;
}

nlohmann::ordered_json to_json(const DeltaOp& op) {
  return std::visit(
      [](const auto& o) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(o)>;
        nlohmann::ordered_json j;
        if constexpr (std::is_same_v<T, AddOp>) {
          j["op"] = "add";
          j["kind"] = to_string(o.kind);
          j["content"] = o.content;
        } else if constexpr (std::is_same_v<T, ReviseOp>) {
          j["op"] = "revise";
          j["id"] = o.target_id;
          j["content"] = o.new_content;
          if (o.new_kind) j["kind"] = to_string(*o.new_kind);
        } else {
          j["op"] = "remove";
          j["id"] = o.target_id;
        }
        return j;
      },
      op);
}

std::string describe(const DeltaOp& op) {
  return std::visit(
      [](const auto& o) -> std::string {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, AddOp>) {
          return "Add(" + std::string(to_string(o.kind)) + ")";
        } else if constexpr (std::is_same_v<T, ReviseOp>) {
          return "Revise(" + std::to_string(o.target_id) + ")";
        } else {
          return "Remove(" + std::to_string(o.target_id) + ")";
        }
      },
      op);
}

StrategyPool::StrategyPool(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw InvalidArgument("pool dimension must be positive");
}

StrategyPool new_pool(std::size_t dim) { return StrategyPool(dim); }

const StrategyEntry* StrategyPool::find(EntryId id) const {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [id](const StrategyEntry& e) { return e.id == id; });
  return it == entries_.end() ? nullptr : &*it;
}

void StrategyPool::mark_retrieved(std::span<const EntryId> ids, int episode) {
  for (auto& entry : entries_) {
    if (std::find(ids.begin(), ids.end(), entry.id) != ids.end()) {
      entry.last_retrieved_episode = episode;
    }
  }
}

std::vector<std::string> StrategyPool::check_invariants() const {
  std::vector<std::string> problems;
  std::set<EntryId> seen;
  for (const auto& e : entries_) {
    const std::string label = "entry " + std::to_string(e.id);
    if (e.id == 0) problems.push_back(label + ": id must be positive");
    if (!seen.insert(e.id).second) problems.push_back(label + ": duplicate id");
    if (e.id >= next_id_) problems.push_back(label + ": id not below next_id");
    if (e.embedding.size() != dim_) {
      problems.push_back(label + ": embedding length " +
                         std::to_string(e.embedding.size()) + " != dim " +
                         std::to_string(dim_));
    } else if (std::abs(l2_norm(e.embedding) - 1.0) > kNormTolerance) {
      problems.push_back(label + ": embedding is not unit norm");
    }
    if (text::trim(e.content).empty()) {
      problems.push_back(label + ": empty content");
    }
    if (e.created_episode < 1) {
      problems.push_back(label + ": created_episode must be >= 1");
    }
  }
  if (version_ < 0) problems.push_back("negative version");
  return problems;
}

StrategyPool StrategyPool::restore(std::size_t dim, EntryId next_id,
                                   int version,
                                   std::vector<StrategyEntry> entries) {
  StrategyPool pool(dim);
  pool.next_id_ = next_id;
  pool.version_ = version;
  pool.entries_ = std::move(entries);
  if (auto problems = pool.check_invariants(); !problems.empty()) {
    throw InvalidArgument("invalid pool: " + problems.front());
  }
  return pool;
}

struct PoolMutator {
  static std::vector<StrategyEntry>& entries(StrategyPool& p) {
    return p.entries_;
  }
  static EntryId& next_id(StrategyPool& p) { return p.next_id_; }
  static int& version(StrategyPool& p) { return p.version_; }
};

DeltaResult apply_delta(const StrategyPool& pool, std::span<const DeltaOp> ops,
                        int episode, const Embedder& embed,
                        const ApplyOptions& options) {
  if (embed.dim() != pool.dim()) {
    throw ConfigError("embedder dim " + std::to_string(embed.dim()) +
                      " does not match pool dim " + std::to_string(pool.dim()));
  }

  DeltaResult result{pool, {}, {}, {}};
  auto& entries = PoolMutator::entries(result.pool);
  auto& next_id = PoolMutator::next_id(result.pool);

  auto locate = [&entries](EntryId id) {
    return std::find_if(entries.begin(), entries.end(),
                        [id](const StrategyEntry& e) { return e.id == id; });
  };

  for (const auto& op : ops) {
    if (const auto* add = std::get_if<AddOp>(&op)) {
      std::string content = clean_content(add->content);
      if (content.empty()) {
        result.rejected.push_back({op, "empty content"});
        continue;
      }
      if (normalize_for_embedding(add->plan_trace).empty()) {
        result.rejected.push_back({op, "missing plan trace"});
        continue;
      }
      Vector z = embed.embed(add->plan_trace);
      if (z.size() != pool.dim() ||
          std::abs(l2_norm(z) - 1.0) > kNormTolerance) {
        throw ConfigError("embedder returned a vector that is not a unit "
                          "vector of the pool dimension");
      }
      StrategyEntry entry;
      entry.id = next_id++;
      entry.content = std::move(content);
      entry.kind = add->kind;
      entry.plan_trace = add->plan_trace;
      entry.instruction = add->instruction;
      entry.embedding = std::move(z);
      entry.created_episode = episode;
      result.added_ids.push_back(entry.id);
      entries.push_back(std::move(entry));
    } else if (const auto* revise = std::get_if<ReviseOp>(&op)) {
      auto it = locate(revise->target_id);
      if (revise->target_id == 0 || it == entries.end()) {
        result.rejected.push_back({op, "unknown id"});
        continue;
      }
      std::string content = clean_content(revise->new_content);
      if (content.empty()) {
        result.rejected.push_back({op, "empty content"});
        continue;
      }
      it->content = std::move(content);
      if (revise->new_kind) it->kind = *revise->new_kind;
      it->revised_episode = episode;
    } else if (const auto* remove = std::get_if<RemoveOp>(&op)) {
      auto it = locate(remove->target_id);
      if (remove->target_id == 0 || it == entries.end()) {
        result.rejected.push_back({op, "unknown id"});
        continue;
      }
      entries.erase(it);
    }
  }

  if (options.max_entries > 0) {
    while (entries.size() > options.max_entries) {
      auto recency = [](const StrategyEntry& e) {
        return std::max(e.created_episode, e.last_retrieved_episode.value_or(0));
      };
      auto victim = std::min_element(
          entries.begin(), entries.end(),
          [&](const StrategyEntry& a, const StrategyEntry& b) {
            const int ra = recency(a);
            const int rb = recency(b);
            return ra != rb ? ra < rb : a.id < b.id;
          });
      result.evicted_ids.push_back(victim->id);
      entries.erase(victim);
    }
  }

  ++PoolMutator::version(result.pool);
  return result;
}

nlohmann::ordered_json entry_to_json(const StrategyEntry& e) {
  auto optional = [](const std::optional<int>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["id"] = e.id;
  j["kind"] = to_string(e.kind);
  j["content"] = e.content;
  j["plan_trace"] = e.plan_trace;
  j["instruction"] = e.instruction;
  j["created_episode"] = e.created_episode;
  j["revised_episode"] = optional(e.revised_episode);
  j["last_retrieved_episode"] = optional(e.last_retrieved_episode);
  j["embedding"] = e.embedding;
  return j;
}

std::string serialize_pool(const StrategyPool& pool) {
  std::string out;
  nlohmann::ordered_json header;
  header["format_version"] = kFormatVersion;
  header["dim"] = pool.dim();
  header["next_id"] = pool.next_id();
  header["version"] = pool.version();
  out += header.dump() + "\n";
  for (const auto& e : pool.entries()) {
    out += entry_to_json(e).dump() + "\n";
  }
  return out;
}

namespace {

template <typename T>
T require_field(const nlohmann::json& j, const char* key, std::size_t line) {
  if (!j.contains(key)) throw LoadError(line, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw LoadError(line, std::string("field '") + key + "' has the wrong type");
  }
}

std::optional<int> optional_int(const nlohmann::json& j, const char* key,
                                std::size_t line) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number_integer()) {
    throw LoadError(line, std::string("field '") + key + "' must be an integer");
  }
  return j.at(key).get<int>();
}

}  // namespace

StrategyPool parse_pool(std::string_view contents) {
  const auto lines = text::split_lines(contents);

  std::size_t header_line = 0;
  while (header_line < lines.size() && text::trim(lines[header_line]).empty()) {
    ++header_line;
  }
  if (header_line == lines.size()) throw LoadError(1, "missing header line");

  const auto header = nlohmann::json::parse(lines[header_line], nullptr, false);
  const std::size_t header_no = header_line + 1;
  if (header.is_discarded() || !header.is_object()) {
    throw LoadError(header_no, "header is not a JSON object");
  }
  const int format = require_field<int>(header, "format_version", header_no);
  if (format != kFormatVersion) {
    throw LoadError(header_no, "unsupported format_version " + std::to_string(format));
  }
  const auto dim = require_field<std::size_t>(header, "dim", header_no);
  const auto next_id = require_field<EntryId>(header, "next_id", header_no);
  const int version = require_field<int>(header, "version", header_no);
  if (dim == 0) throw LoadError(header_no, "dim must be positive");
  if (version < 0) throw LoadError(header_no, "version must be non-negative");

  std::vector<StrategyEntry> entries;
  std::set<EntryId> ids;
  for (std::size_t i = header_line + 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (text::trim(lines[i]).empty()) continue;
    const auto j = nlohmann::json::parse(lines[i], nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw LoadError(line_no, "entry is not a JSON object");
    }
    StrategyEntry e;
    e.id = require_field<EntryId>(j, "id", line_no);
    const auto kind_name = require_field<std::string>(j, "kind", line_no);
    const auto kind = parse_insight_kind(kind_name);
    if (!kind) throw LoadError(line_no, "unknown kind '" + kind_name + "'");
    e.kind = *kind;
    e.content = require_field<std::string>(j, "content", line_no);
    e.plan_trace = require_field<std::string>(j, "plan_trace", line_no);
    e.instruction = j.contains("instruction") && j["instruction"].is_string()
                        ? j["instruction"].get<std::string>()
                        : std::string();
    e.created_episode = require_field<int>(j, "created_episode", line_no);
    e.revised_episode = optional_int(j, "revised_episode", line_no);
    e.last_retrieved_episode = optional_int(j, "last_retrieved_episode", line_no);
    e.embedding = require_field<Vector>(j, "embedding", line_no);

    if (e.id == 0) throw LoadError(line_no, "id must be positive");
    if (!ids.insert(e.id).second) {
      throw LoadError(line_no, "duplicate id " + std::to_string(e.id));
    }
    if (e.id >= next_id) {
      throw LoadError(line_no, "id " + std::to_string(e.id) +
                                   " is not below next_id " +
                                   std::to_string(next_id));
    }
    if (e.embedding.size() != dim) {
      throw LoadError(line_no, "embedding length " +
                                   std::to_string(e.embedding.size()) +
                                   " does not match dim " + std::to_string(dim));
    }
    if (std::abs(l2_norm(e.embedding) - 1.0) > kNormTolerance) {
      throw LoadError(line_no, "embedding is not unit norm");
    }
    if (text::trim(e.content).empty()) throw LoadError(line_no, "empty content");
    if (e.created_episode < 1) {
      throw LoadError(line_no, "created_episode must be >= 1");
    }
    entries.push_back(std::move(e));
  }
  return StrategyPool::restore(dim, next_id, version, std::move(entries));
}

void save_pool(const StrategyPool& pool, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write pool file " + tmp);
    out << serialize_pool(pool);
    if (!out) throw Error("failed writing pool file " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

StrategyPool load_pool(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(1, "cannot open pool file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_pool(buffer.str());
}

}  // namespace elite
