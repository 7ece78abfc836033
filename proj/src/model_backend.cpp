#include "elite/model_backend.hpp"

#include <fstream>
#include <json.hpp>
#include <regex>
#include <semaphore>
#include <sstream>

#include "elite/error.hpp"

namespace elite {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::system:
      return "system";
    case Role::user:
      return "user";
    case Role::assistant:
      return "assistant";
  }
  return "user";
}

void ChatRequest::validate() const {
  if (messages.empty()) throw InvalidArgument("chat request has no messages");
  if (messages.front().role == Role::assistant) {
    throw InvalidArgument("first chat message must be system or user");
  }
  if (temperature < 0.0) throw InvalidArgument("temperature must be >= 0");
  if (max_tokens <= 0) throw InvalidArgument("max_tokens must be positive");
}

std::string ChatRequest::last_user_message() const {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == Role::user) return it->content;
  }
  return {};
}

ScriptRule ScriptRule::substring(std::string pattern, std::string reply, bool once) {
  return {Match::substring, {std::move(pattern)}, std::move(reply), once};
}

ScriptRule ScriptRule::all_of(std::vector<std::string> patterns, std::string reply,
                              bool once) {
  return {Match::all_of, std::move(patterns), std::move(reply), once};
}

ScriptRule ScriptRule::regex(std::string pattern, std::string reply, bool once) {
  return {Match::regex, {std::move(pattern)}, std::move(reply), once};
}

struct ScriptedBackend::Impl {
  struct Compiled {
    ScriptRule rule;
    std::optional<std::regex> re;
    bool spent = false;
  };

  std::vector<Compiled> rules;
  std::string default_reply;
  std::size_t calls = 0;
  mutable std::mutex mutex;

  bool matches(const Compiled& c, const std::string& message) const {
    switch (c.rule.match) {
      case ScriptRule::Match::substring:
        return message.find(c.rule.patterns.front()) != std::string::npos;
      case ScriptRule::Match::all_of:
        for (const auto& p : c.rule.patterns) {
          if (message.find(p) == std::string::npos) return false;
        }
        return true;
      case ScriptRule::Match::regex:
        return std::regex_search(message, *c.re);
    }
    return false;
  }
};

ScriptedBackend::ScriptedBackend(std::vector<ScriptRule> rules,
                                 std::string default_reply)
    : impl_(std::make_unique<Impl>()) {
  impl_->default_reply = std::move(default_reply);
  for (auto& rule : rules) {
    if (rule.patterns.empty()) throw InvalidArgument("script rule without pattern");
    Impl::Compiled c{std::move(rule), std::nullopt, false};
    if (c.rule.match == ScriptRule::Match::regex) {
      try {
        c.re.emplace(c.rule.patterns.front(), std::regex::ECMAScript);
      } catch (const std::regex_error& e) {
        throw InvalidArgument("bad script regex '" + c.rule.patterns.front() +
                              "': " + e.what());
      }
    }
    impl_->rules.push_back(std::move(c));
  }
}

ScriptedBackend::~ScriptedBackend() = default;

std::string ScriptedBackend::chat(const ChatRequest& request) {
  request.validate();
  const std::string message = request.last_user_message();
  std::lock_guard lock(impl_->mutex);
  ++impl_->calls;
  for (auto& c : impl_->rules) {
    if (c.spent || !impl_->matches(c, message)) continue;
    if (c.rule.consume_once) c.spent = true;
    return c.rule.reply;
  }
  return impl_->default_reply;
}

std::size_t ScriptedBackend::calls() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->calls;
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_json(std::string_view json) {
  const auto j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ConfigError("script file is not a JSON object");
  }
  std::vector<ScriptRule> rules;
  try {
    for (const auto& r : j.value("rules", nlohmann::json::array())) {
      const auto match = r.value("match", std::string("substring"));
      const auto reply = r.at("reply").get<std::string>();
      const bool once = r.value("once", false);
      if (match == "substring") {
        rules.push_back(ScriptRule::substring(r.at("pattern").get<std::string>(),
                                              reply, once));
      } else if (match == "regex") {
        rules.push_back(
            ScriptRule::regex(r.at("pattern").get<std::string>(), reply, once));
      } else if (match == "all_of") {
        rules.push_back(ScriptRule::all_of(
            r.at("patterns").get<std::vector<std::string>>(), reply, once));
      } else {
        throw ConfigError("unknown script match type '" + match + "'");
      }
    }
    return std::make_unique<ScriptedBackend>(
        std::move(rules), j.value("default_reply", std::string()));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed script rule: ") + e.what());
  }
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read script file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

struct RemoteChatBackend::State {
  explicit State(std::size_t limit)
      : in_flight(static_cast<std::ptrdiff_t>(limit)) {}
  std::counting_semaphore<> in_flight;
};

RemoteChatBackend::RemoteChatBackend(RemoteChatConfig config)
    : config_(std::move(config)) {
  if (config_.base_url.empty()) throw ConfigError("chat base URL is empty");
  if (config_.model.empty()) throw ConfigError("chat model name is empty");
  if (config_.max_in_flight == 0) config_.max_in_flight = 1;
  state_ = std::make_unique<State>(config_.max_in_flight);
}

RemoteChatBackend::~RemoteChatBackend() = default;

std::string RemoteChatBackend::request_body(const ChatRequest& request) const {
  nlohmann::ordered_json body;
  body["model"] = config_.model;
  body["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : request.messages) {
    nlohmann::ordered_json msg;
    msg["role"] = to_string(m.role);
    msg["content"] = m.content;
    body["messages"].push_back(std::move(msg));
  }
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  return body.dump();
}

std::string RemoteChatBackend::chat(const ChatRequest& request) {
  request.validate();
  std::string url = config_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  url += "/chat/completions";

  HttpResponse response;
  {
    state_->in_flight.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{state_->in_flight};
    response = post_json(url, request_body(request), config_.api_key, config_.http);
  }

  const auto j = nlohmann::json::parse(response.body, nullptr, false);
  try {
    if (!j.is_discarded()) {
      const auto& content = j.at("choices").at(0).at("message").at("content");
      if (content.is_string()) return content.get<std::string>();
    }
  } catch (const nlohmann::json::exception&) {
  }
  throw TransportError("chat response lacks choices[0].message.content",
                       response.status);
}

std::string RecordingBackend::chat(const ChatRequest& request) {
  ChatExchange exchange{role_tag_, request, {}, {}};
  try {
    exchange.reply = inner_.chat(request);
  } catch (const std::exception& e) {
    exchange.error = e.what();
    std::lock_guard lock(mutex_);
    log_.push_back(std::move(exchange));
    throw;
  }
  std::string reply = exchange.reply;
  std::lock_guard lock(mutex_);
  log_.push_back(std::move(exchange));
  return reply;
}

std::vector<ChatExchange> RecordingBackend::take() {
  std::lock_guard lock(mutex_);
  return std::exchange(log_, {});
}

}  // namespace elite
