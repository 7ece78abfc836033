#pragma once

#include <chrono>
#include <functional>
#include <string>

namespace elite {

struct HttpOptions {
  std::chrono::milliseconds timeout{120'000};
  int max_retries = 3;
  // Delay before retry i (0-based) is initial_backoff * 2^i.
  std::chrono::milliseconds initial_backoff{500};
  // Injected for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// POSTs a JSON body, retrying network failures and non-2xx responses with
// exponential backoff. Returns the first 2xx response; throws TransportError
// once the retry budget is spent.
HttpResponse post_json(const std::string& url, const std::string& body,
                       const std::string& api_key, const HttpOptions& options);

}  // namespace elite
