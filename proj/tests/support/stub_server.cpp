#include "support/stub_server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <thread>

#include <httplib.h>

namespace elite::test {

struct StubServer::Impl {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  mutable std::mutex mutex;
  std::vector<StubRequest> requests;
  Handler handler;
};

StubServer::StubServer(Handler handler) : impl_(std::make_unique<Impl>()) {
  impl_->handler = std::move(handler);
  impl_->server.Post(".*", [this](const httplib::Request& req, httplib::Response& res) {
    StubRequest r{req.path, req.body, req.get_header_value("Authorization")};
    int index = 0;
    {
      std::lock_guard lock(impl_->mutex);
      index = static_cast<int>(impl_->requests.size());
      impl_->requests.push_back(r);
    }
    const StubReply reply = impl_->handler(r, index);
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
  impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

StubServer::~StubServer() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string StubServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port);
}

std::vector<StubRequest> StubServer::requests() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->requests;
}

std::string closed_port_url() {
  // Bind an ephemeral port, read it back, then close without listening.
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  socklen_t len = sizeof addr;
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return "http://127.0.0.1:" + std::to_string(ntohs(addr.sin_port));
}

}  // namespace elite::test
