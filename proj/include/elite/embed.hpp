#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elite/http_client.hpp"

namespace elite {

using Vector = std::vector<double>;

// Embed(·): maps text to a unit vector of length dim().
class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual std::size_t dim() const = 0;
  virtual Vector embed(std::string_view text) const = 0;
};

// FNV-1a, 64-bit (offset basis 0xcbf29ce484222325, prime 0x100000001b3).
std::uint64_t fnv1a64(std::string_view bytes);

// Lowercase ASCII letters, collapse each whitespace run to one space, trim.
std::string normalize_for_embedding(std::string_view text);

// Scales v to unit Euclidean norm. Throws InvalidArgument for a zero vector.
void normalize(Vector& v);

double l2_norm(std::span<const double> v);

// (a·b) / (|a| |b|). Throws InvalidArgument on length mismatch or a zero
// vector.
double cosine(std::span<const double> a, std::span<const double> b);

struct LocalHashEmbedderConfig {
  std::size_t dim = 256;
  std::size_t ngram = 3;
};

// Hashed byte n-gram bag: every contiguous n-gram of the normalized text adds
// 1.0 to bucket fnv1a64(gram) % dim, then the vector is L2-normalized. Text
// shorter than n counts as a single gram.
Vector local_embed(std::string_view text, const LocalHashEmbedderConfig& config);

class LocalHashEmbedder final : public Embedder {
 public:
  explicit LocalHashEmbedder(LocalHashEmbedderConfig config = {});

  std::size_t dim() const override { return config_.dim; }
  Vector embed(std::string_view text) const override;

 private:
  LocalHashEmbedderConfig config_;
};

struct RemoteEmbedderConfig {
  std::string url;  // full endpoint URL, e.g. http://host:8080/v1/embeddings
  std::string model = "bge-m3";
  std::string api_key;
  std::size_t dim = 1024;
  std::size_t max_in_flight = 4;
  HttpOptions http;
};

// Client for an embeddings-compatible endpoint. Responses are re-normalized
// locally; results are memoized by exact text for the lifetime of the object.
class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(RemoteEmbedderConfig config);
  ~RemoteEmbedder() override;

  std::size_t dim() const override { return config_.dim; }
  Vector embed(std::string_view text) const override;

  // Exact JSON body sent for `text`.
  std::string request_body(std::string_view text) const;

 private:
  struct State;

  RemoteEmbedderConfig config_;
  std::unique_ptr<State> state_;
};

// remote_embed as a free function for one-off calls.
Vector remote_embed(std::string_view text, const RemoteEmbedderConfig& config);

}  // namespace elite
