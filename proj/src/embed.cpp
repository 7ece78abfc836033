#include "elite/embed.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <json.hpp>
#include <semaphore>

#include "elite/error.hpp"
#include "elite/text.hpp"

namespace elite {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string normalize_for_embedding(std::string_view text) {
  return text::collapse_whitespace(text);
}

double l2_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

void normalize(Vector& v) {
  const double norm = l2_norm(v);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidArgument("cannot normalize a zero or non-finite vector");
  }
  for (auto& x : v) x /= norm;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("cosine: length mismatch (" +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw InvalidArgument("cosine: zero vector");
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

Vector local_embed(std::string_view text, const LocalHashEmbedderConfig& config) {
  if (config.dim < 8) throw InvalidArgument("local embedder dim must be >= 8");
  if (config.ngram < 1) throw InvalidArgument("local embedder ngram must be >= 1");

  const std::string normalized = normalize_for_embedding(text);
  if (normalized.empty()) {
    throw InvalidArgument("cannot embed empty text");
  }

  Vector v(config.dim, 0.0);
  const std::string_view s(normalized);
  if (s.size() < config.ngram) {
    v[fnv1a64(s) % config.dim] += 1.0;
  } else {
    for (std::size_t i = 0; i + config.ngram <= s.size(); ++i) {
      v[fnv1a64(s.substr(i, config.ngram)) % config.dim] += 1.0;
    }
  }
  normalize(v);
  return v;
}

LocalHashEmbedder::LocalHashEmbedder(LocalHashEmbedderConfig config)
    : config_(config) {
  if (config_.dim < 8) throw InvalidArgument("local embedder dim must be >= 8");
  if (config_.ngram < 1) {
    throw InvalidArgument("local embedder ngram must be >= 1");
  }
}

Vector LocalHashEmbedder::embed(std::string_view text) const {
  return local_embed(text, config_);
}

struct RemoteEmbedder::State {
  explicit State(std::size_t limit)
      : in_flight(static_cast<std::ptrdiff_t>(limit)) {}

  std::counting_semaphore<> in_flight;
  std::mutex memo_mutex;
  std::map<std::string, Vector, std::less<>> memo;
};

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderConfig config)
    : config_(std::move(config)) {
  if (config_.dim == 0) throw ConfigError("embedding dim must be positive");
  if (config_.url.empty()) throw ConfigError("embedding endpoint URL is empty");
  if (config_.max_in_flight == 0) config_.max_in_flight = 1;
  state_ = std::make_unique<State>(config_.max_in_flight);
}

RemoteEmbedder::~RemoteEmbedder() = default;

std::string RemoteEmbedder::request_body(std::string_view text) const {
  nlohmann::ordered_json body;
  body["model"] = config_.model;
  body["input"] = std::string(text);
  return body.dump();
}

Vector RemoteEmbedder::embed(std::string_view text) const {
  if (text::trim(text).empty()) throw InvalidArgument("cannot embed empty text");
  {
    std::lock_guard lock(state_->memo_mutex);
    if (auto it = state_->memo.find(text); it != state_->memo.end()) {
      return it->second;
    }
  }

  HttpResponse response;
  {
    state_->in_flight.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{state_->in_flight};
    response = post_json(config_.url, request_body(text), config_.api_key,
                         config_.http);
  }

  const auto json = nlohmann::json::parse(response.body, nullptr, false);
  if (json.is_discarded() || !json.contains("data") ||
      !json["data"].is_array() || json["data"].empty() ||
      !json["data"][0].contains("embedding") ||
      !json["data"][0]["embedding"].is_array()) {
    throw TransportError("embedding response lacks data[0].embedding",
                         response.status);
  }
  Vector v;
  for (const auto& x : json["data"][0]["embedding"]) {
    if (!x.is_number()) {
      throw TransportError("embedding response holds a non-numeric value",
                           response.status);
    }
    v.push_back(x.get<double>());
  }
  if (v.size() != config_.dim) {
    throw ConfigError("embedding endpoint returned " + std::to_string(v.size()) +
                      " dimensions, configured dim is " +
                      std::to_string(config_.dim));
  }
  normalize(v);

  std::lock_guard lock(state_->memo_mutex);
  state_->memo.emplace(std::string(text), v);
  return v;
}

Vector remote_embed(std::string_view text, const RemoteEmbedderConfig& config) {
  return RemoteEmbedder(config).embed(text);
}

}  // namespace elite
