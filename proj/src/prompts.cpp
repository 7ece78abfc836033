#include "elite/prompts.hpp"

#include <fstream>
#include <sstream>

#include "elite/error.hpp"
#include "elite/text.hpp"

namespace elite {

namespace {

std::string strip_trailing_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

}  // namespace

PromptTemplate parse_prompt_template(std::string_view source) {
  enum class Section { preamble, system, user } section = Section::preamble;
  PromptTemplate t;
  bool saw_user = false;
  for (const auto& line : text::split_lines(source)) {
    if (line == "[system]") {
      section = Section::system;
      continue;
    }
    if (line == "[user]") {
      section = Section::user;
      saw_user = true;
      continue;
    }
    switch (section) {
      case Section::preamble:
        if (!text::trim(line).empty() && line.front() != '#') {
          throw ConfigError("prompt template text before [system]/[user]: " + line);
        }
        break;
      case Section::system:
        t.system += line + "\n";
        break;
      case Section::user:
        t.user += line + "\n";
        break;
    }
  }
  if (!saw_user) throw ConfigError("prompt template has no [user] section");
  t.system = strip_trailing_newlines(std::move(t.system));
  t.user = strip_trailing_newlines(std::move(t.user));
  return t;
}

std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    out.append(tmpl.substr(pos, open - pos));
    const std::string key(tmpl.substr(open + 2, close - open - 2));
    auto it = vars.find(key);
    if (it == vars.end()) {
      throw ConfigError("prompt placeholder {{" + key + "}} has no value");
    }
    out.append(it->second);
    pos = close + 2;
  }
  return out;
}

PromptSet PromptSet::defaults() {
  PromptSet set;
  for (const auto& [name, source] : detail::embedded_prompt_sources()) {
    set.templates_.emplace(name, parse_prompt_template(source));
  }
  return set;
}

PromptSet PromptSet::with_overrides(const std::filesystem::path& dir) {
  PromptSet set = defaults();
  if (dir.empty()) return set;
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("prompt directory does not exist: " + dir.string());
  }
  for (auto& [name, tmpl] : set.templates_) {
    const auto path = dir / (name + ".v1.txt");
    if (!std::filesystem::exists(path)) continue;
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    tmpl = parse_prompt_template(buffer.str());
  }
  return set;
}

const PromptTemplate& PromptSet::get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) {
    throw ConfigError("unknown prompt template '" + std::string(name) + "'");
  }
  return it->second;
}

ChatRequest PromptSet::render(std::string_view name,
                              const std::map<std::string, std::string>& vars,
                              int max_tokens) const {
  const auto& t = get(name);
  ChatRequest request;
  if (!t.system.empty()) {
    request.messages.push_back({Role::system, render_template(t.system, vars)});
  }
  request.messages.push_back({Role::user, render_template(t.user, vars)});
  request.temperature = 0.0;
  request.max_tokens = max_tokens;
  return request;
}

}  // namespace elite
