#include "elite/http_client.hpp"

#include <httplib.h>

#include <thread>

#include "elite/error.hpp"

namespace elite {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint URL lacks a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.compare(0, scheme_end, "https") == 0) {
    throw ConfigError("https endpoints need a build with OpenSSL: " + url);
  }
#endif
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpResponse post_json(const std::string& url, const std::string& body,
                       const std::string& api_key, const HttpOptions& options) {
  const auto [origin, path] = split_url(url);

  httplib::Client client(origin);
  const auto seconds =
      std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
      options.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  httplib::Headers headers;
  if (!api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + api_key);
  }

  std::string last_error;
  int last_status = 0;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    if (attempt > 0) {
      const auto delay = options.initial_backoff * (1 << (attempt - 1));
      if (options.sleep) {
        options.sleep(delay);
      } else {
        std::this_thread::sleep_for(delay);
      }
    }
    auto result = client.Post(path, headers, body, "application/json");
    if (!result) {
      last_status = 0;
      last_error = "request to " + url + " failed: " +
                   httplib::to_string(result.error());
      continue;
    }
    if (result->status >= 200 && result->status < 300) {
      return {result->status, result->body};
    }
    last_status = result->status;
    last_error = "request to " + url + " returned HTTP " +
                 std::to_string(result->status);
  }
  throw TransportError(last_error + " (after " +
                           std::to_string(options.max_retries) + " retries)",
                       last_status);
}

}  // namespace elite
