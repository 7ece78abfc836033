#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "elite/gridhouse.hpp"

namespace elite {

// Procedures a task is composed of, in goal order, joined with '+':
// "clean", "heat", "cool", "store", e.g. "clean+heat" for a two-part task.
std::string procedure_family(const TaskSpec& task);

inline constexpr int kTasksPerCategory = 12;

// Procedurally generated kitchen tasks, kTasksPerCategory per category; the
// first half of each category is the seen split, the second half unseen.
// Every task carries an oracle action sequence. Deterministic per seed.
std::vector<TaskSpec> builtin_suites(std::uint64_t seed);

struct TaskFilter {
  std::vector<TaskCategory> categories;  // empty = all
  std::optional<Split> split;
  // Keeps the first `limit` tasks taken round-robin across categories.
  std::optional<std::size_t> limit;
};

std::vector<TaskSpec> select_tasks(const std::vector<TaskSpec>& tasks,
                                   const TaskFilter& filter);

// One "<id>.json" file per task.
void export_tasks(const std::vector<TaskSpec>& tasks,
                  const std::filesystem::path& dir);
// Loads every *.json in dir, sorted by file name; validates each task.
std::vector<TaskSpec> import_tasks(const std::filesystem::path& dir);

}  // namespace elite
