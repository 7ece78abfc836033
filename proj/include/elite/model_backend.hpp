#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elite/http_client.hpp"

namespace elite {

enum class Role { system, user, assistant };

std::string_view to_string(Role role);

struct ChatMessage {
  Role role = Role::user;
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 1024;

  // Throws InvalidArgument: no messages, first message not system/user,
  // negative temperature, non-positive max_tokens.
  void validate() const;

  // Content of the last user message, empty if there is none.
  std::string last_user_message() const;
};

// Chat-completion model used by the planner, distiller and consolidator.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;

  virtual std::string chat(const ChatRequest& request) = 0;
  virtual std::string name() const = 0;
};

struct ScriptRule {
  enum class Match { substring, all_of, regex };

  Match match = Match::substring;
  // substring/regex: patterns[0]; all_of: every pattern must occur.
  std::vector<std::string> patterns;
  std::string reply;
  bool consume_once = false;

  static ScriptRule substring(std::string pattern, std::string reply,
                              bool once = false);
  static ScriptRule all_of(std::vector<std::string> patterns, std::string reply,
                           bool once = false);
  static ScriptRule regex(std::string pattern, std::string reply,
                          bool once = false);
};

// Deterministic test double: the first live rule matching the last user
// message supplies the reply, otherwise default_reply. Consume-once rules
// retire after their first match.
class ScriptedBackend final : public ChatBackend {
 public:
  ScriptedBackend(std::vector<ScriptRule> rules, std::string default_reply);
  ~ScriptedBackend() override;

  // {"default_reply": "...", "rules": [{"match": "substring"|"all_of"|"regex",
  //   "pattern": "..." | "patterns": [...], "reply": "...", "once": bool}]}
  static std::unique_ptr<ScriptedBackend> from_file(
      const std::filesystem::path& path);
  static std::unique_ptr<ScriptedBackend> from_json(std::string_view json);

  std::string chat(const ChatRequest& request) override;
  std::string name() const override { return "scripted"; }

  std::size_t calls() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Wraps a callable; used for programmatic test models.
class FunctionBackend final : public ChatBackend {
 public:
  using Fn = std::function<std::string(const ChatRequest&)>;

  explicit FunctionBackend(Fn fn, std::string name = "function")
      : fn_(std::move(fn)), name_(std::move(name)) {}

  std::string chat(const ChatRequest& request) override { return fn_(request); }
  std::string name() const override { return name_; }

 private:
  Fn fn_;
  std::string name_;
};

struct RemoteChatConfig {
  std::string base_url;  // requests go to base_url + "/chat/completions"
  std::string model;
  std::string api_key;
  std::size_t max_in_flight = 4;
  HttpOptions http;
};

// OpenAI-compatible chat-completions client.
class RemoteChatBackend final : public ChatBackend {
 public:
  explicit RemoteChatBackend(RemoteChatConfig config);
  ~RemoteChatBackend() override;

  std::string chat(const ChatRequest& request) override;
  std::string name() const override { return "remote:" + config_.model; }

  // Exact JSON body sent for `request`.
  std::string request_body(const ChatRequest& request) const;

 private:
  struct State;

  RemoteChatConfig config_;
  std::unique_ptr<State> state_;
};

struct ChatExchange {
  std::string role_tag;
  ChatRequest request;
  std::string reply;
  std::string error;
};

// Decorator that records every request/reply pair, for prompt dumps.
class RecordingBackend final : public ChatBackend {
 public:
  RecordingBackend(ChatBackend& inner, std::string role_tag)
      : inner_(inner), role_tag_(std::move(role_tag)) {}

  std::string chat(const ChatRequest& request) override;
  std::string name() const override { return inner_.name(); }

  std::vector<ChatExchange> take();

 private:
  ChatBackend& inner_;
  std::string role_tag_;
  std::mutex mutex_;
  std::vector<ChatExchange> log_;
};

}  // namespace elite
