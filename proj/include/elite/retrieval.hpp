#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elite/strategy_pool.hpp"

namespace elite {

enum class RetrievalMode { cot, tfidf_content, tfidf_instruction, all, random, none };

std::string_view to_string(RetrievalMode mode);
std::optional<RetrievalMode> parse_retrieval_mode(std::string_view name);

struct ScoredEntry {
  StrategyEntry entry;
  double score = 0.0;
};

// Descending by score; no duplicate ids.
using RetrievedSet = std::vector<ScoredEntry>;

std::vector<EntryId> ids_of(const RetrievedSet& set);

// The k entries with the highest cosine(q, z_i); ties go to the smaller id.
// The subset objective is a sum of per-entry terms, so the best k-subset is
// the k individually best entries.
RetrievedSet retrieve_topk(const StrategyPool& pool, std::span<const double> query,
                           std::size_t k);

enum class TfidfField { content, instruction };

// Lowercased alphanumeric runs.
std::vector<std::string> tokenize(std::string_view text);

// Sparse tf-idf cosine with tf = raw count and idf = ln(N / (1 + df)) + 1
// over the pool's documents for the chosen field.
RetrievedSet retrieve_tfidf(const StrategyPool& pool, std::string_view query,
                            std::size_t k, TfidfField field);

// Uniform sample of min(k, |P|) entries without replacement, reported in id
// order with score 0.
RetrievedSet retrieve_random(const StrategyPool& pool, std::size_t k,
                             std::uint64_t seed);

// Every entry in id order, score 0.
RetrievedSet retrieve_all(const StrategyPool& pool);

}  // namespace elite
