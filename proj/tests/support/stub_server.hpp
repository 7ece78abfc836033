#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace elite::test {

struct StubRequest {
  std::string path;
  std::string body;
  std::string authorization;
};

struct StubReply {
  int status = 200;
  std::string body;
};

// Local HTTP server on an ephemeral port answering every POST through the
// handler, and recording each request.
class StubServer {
 public:
  using Handler = std::function<StubReply(const StubRequest&, int call_index)>;

  explicit StubServer(Handler handler);
  ~StubServer();

  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  std::string base_url() const;  // http://127.0.0.1:<port>
  std::vector<StubRequest> requests() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// An unused local port with nothing listening on it.
std::string closed_port_url();

}  // namespace elite::test
