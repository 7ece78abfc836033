#include "elite/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "elite/error.hpp"
#include "elite/random.hpp"

namespace elite {

std::string_view to_string(RetrievalMode mode) {
  switch (mode) {
    case RetrievalMode::cot:
      return "cot";
    case RetrievalMode::tfidf_content:
      return "tfidf_content";
    case RetrievalMode::tfidf_instruction:
      return "tfidf_instruction";
    case RetrievalMode::all:
      return "all";
    case RetrievalMode::random:
      return "random";
    case RetrievalMode::none:
      return "none";
  }
  return "none";
}

std::optional<RetrievalMode> parse_retrieval_mode(std::string_view name) {
  for (auto mode : {RetrievalMode::cot, RetrievalMode::tfidf_content,
                    RetrievalMode::tfidf_instruction, RetrievalMode::all,
                    RetrievalMode::random, RetrievalMode::none}) {
    if (name == to_string(mode)) return mode;
  }
  return std::nullopt;
}

std::vector<EntryId> ids_of(const RetrievedSet& set) {
  std::vector<EntryId> ids;
  ids.reserve(set.size());
  for (const auto& s : set) ids.push_back(s.entry.id);
  return ids;
}

namespace {

struct Candidate {
  std::size_t index;
  double score;
};

RetrievedSet take_best(const StrategyPool& pool, std::vector<Candidate> cands,
                       std::size_t k) {
  const std::size_t n = std::min(k, cands.size());
  const auto& entries = pool.entries();
  auto better = [&entries](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return entries[a.index].id < entries[b.index].id;
  };
  std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(n),
                    cands.end(), better);
  RetrievedSet out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({entries[cands[i].index], cands[i].score});
  }
  return out;
}

}  // namespace

RetrievedSet retrieve_topk(const StrategyPool& pool, std::span<const double> query,
                           std::size_t k) {
  if (k == 0) throw InvalidArgument("k must be at least 1");
  if (query.size() != pool.dim()) {
    throw InvalidArgument("query dimension " + std::to_string(query.size()) +
                          " does not match pool dim " +
                          std::to_string(pool.dim()));
  }
  std::vector<Candidate> cands;
  cands.reserve(pool.size());
  const auto& entries = pool.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    cands.push_back({i, cosine(query, entries[i].embedding)});
  }
  return take_best(pool, std::move(cands), k);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    const bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                       (c >= '0' && c <= '9');
    if (alnum) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

RetrievedSet retrieve_tfidf(const StrategyPool& pool, std::string_view query,
                            std::size_t k, TfidfField field) {
  if (k == 0) throw InvalidArgument("k must be at least 1");
  if (pool.empty()) return {};

  using Counts = std::map<std::string, double>;
  auto count = [](const std::vector<std::string>& tokens) {
    Counts c;
    for (const auto& t : tokens) c[t] += 1.0;
    return c;
  };

  const auto& entries = pool.entries();
  std::vector<Counts> docs;
  docs.reserve(entries.size());
  std::map<std::string, double> df;
  for (const auto& e : entries) {
    docs.push_back(count(tokenize(field == TfidfField::content ? e.content
                                                                : e.instruction)));
    for (const auto& [term, _] : docs.back()) df[term] += 1.0;
  }
  const double n = static_cast<double>(entries.size());
  auto idf = [&](const std::string& term) {
    auto it = df.find(term);
    const double d = it == df.end() ? 0.0 : it->second;
    return std::log(n / (1.0 + d)) + 1.0;
  };
  auto weigh = [&](const Counts& c) {
    Counts w;
    for (const auto& [term, tf] : c) w[term] = tf * idf(term);
    return w;
  };
  auto norm = [](const Counts& w) {
    double s = 0.0;
    for (const auto& [_, x] : w) s += x * x;
    return std::sqrt(s);
  };

  const Counts q = weigh(count(tokenize(query)));
  const double qn = norm(q);

  std::vector<Candidate> cands;
  cands.reserve(entries.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const Counts d = weigh(docs[i]);
    const double dn = norm(d);
    double score = 0.0;
    if (qn > 0.0 && dn > 0.0) {
      double dot = 0.0;
      for (const auto& [term, x] : q) {
        if (auto it = d.find(term); it != d.end()) dot += x * it->second;
      }
      score = dot / (qn * dn);
    }
    cands.push_back({i, score});
  }
  return take_best(pool, std::move(cands), k);
}

RetrievedSet retrieve_random(const StrategyPool& pool, std::size_t k,
                             std::uint64_t seed) {
  if (k == 0) throw InvalidArgument("k must be at least 1");
  const auto& entries = pool.entries();
  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  // Partial Fisher–Yates: the first n slots become the sample.
  std::mt19937_64 rng(seed);
  const std::size_t n = std::min(k, order.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(random::below(rng, order.size() - i));
    std::swap(order[i], order[j]);
  }
  order.resize(n);
  std::sort(order.begin(), order.end(), [&entries](std::size_t a, std::size_t b) {
    return entries[a].id < entries[b].id;
  });

  RetrievedSet out;
  for (auto i : order) out.push_back({entries[i], 0.0});
  return out;
}

RetrievedSet retrieve_all(const StrategyPool& pool) {
  RetrievedSet out;
  for (const auto& e : pool.entries()) out.push_back({e, 0.0});
  std::sort(out.begin(), out.end(), [](const ScoredEntry& a, const ScoredEntry& b) {
    return a.entry.id < b.entry.id;
  });
  return out;
}

}  // namespace elite
