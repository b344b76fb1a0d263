/* Copyright 2026 The SpecNet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "specnet/cli/config.hpp"

#include <charconv>
#include <cmath>

#include "specnet/train/report.hpp"

namespace specnet {

ConfigValue ConfigValue::of(bool v) {
  ConfigValue out;
  out.type = Type::kBool;
  out.b = v;
  return out;
}
ConfigValue ConfigValue::of(std::int64_t v) {
  ConfigValue out;
  out.type = Type::kInt;
  out.i = v;
  return out;
}
ConfigValue ConfigValue::of(double v) {
  ConfigValue out;
  out.type = Type::kFloat;
  out.d = v;
  return out;
}
ConfigValue ConfigValue::of(std::string v) {
  ConfigValue out;
  out.type = Type::kString;
  out.s = std::move(v);
  return out;
}
ConfigValue ConfigValue::of(std::vector<ConfigValue> v) {
  ConfigValue out;
  out.type = Type::kList;
  out.list = std::move(v);
  return out;
}

std::string type_name(ConfigValue::Type type) {
  switch (type) {
    case ConfigValue::Type::kBool: return "boolean";
    case ConfigValue::Type::kInt: return "integer";
    case ConfigValue::Type::kFloat: return "number";
    case ConfigValue::Type::kString: return "string";
    case ConfigValue::Type::kList: return "list";
  }
  return "?";
}

std::string ConfigValue::to_text() const {
  switch (type) {
    case Type::kBool: return b ? "true" : "false";
    case Type::kInt: return std::to_string(i);
    case Type::kFloat: {
      std::string text = format_double(d);
      // Keep a float recognizable as one when it reads back.
      if (text.find_first_of(".eEn") == std::string::npos) text += ".0";
      return text;
    }
    case Type::kString: {
      std::string out = "\"";
      for (char c : s) {
        switch (c) {
          case '"': out += "\\\""; break;
          case '\\': out += "\\\\"; break;
          case '\n': out += "\\n"; break;
          case '\t': out += "\\t"; break;
          default: out += c;
        }
      }
      return out + "\"";
    }
    case Type::kList: {
      std::string out = "[";
      for (std::size_t k = 0; k < list.size(); ++k) {
        if (k) out += ", ";
        out += list[k].to_text();
      }
      return out + "]";
    }
  }
  return {};
}

namespace {

class Cursor {
 public:
  explicit Cursor(const std::string& text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }
  bool done() {
    skip_space();
    return pos_ >= text_.size() || text_[pos_] == '#';
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  ConfigValue value(bool allow_list) {
    skip_space();
    const char c = peek();
    if (c == '"') return string_value();
    if (c == '[') {
      if (!allow_list) throw ConfigError("nested lists are not supported");
      return list_value();
    }
    std::size_t end = pos_;
    while (end < text_.size() && text_[end] != ',' && text_[end] != ']' && text_[end] != '#' &&
           text_[end] != ' ' && text_[end] != '\t') {
      ++end;
    }
    const std::string token = text_.substr(pos_, end - pos_);
    pos_ = end;
    return scalar(token);
  }

 private:
  ConfigValue string_value() {
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      char c = text_[pos_++];
      if (c == '\\') {
        if (pos_ >= text_.size()) break;
        const char e = text_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: throw ConfigError(std::string("unknown escape \\") + e);
        }
      }
      out += c;
    }
    if (pos_ >= text_.size()) throw ConfigError("unterminated string");
    ++pos_;
    return ConfigValue::of(std::move(out));
  }

  ConfigValue list_value() {
    ++pos_;
    std::vector<ConfigValue> items;
    skip_space();
    if (peek() == ']') {
      ++pos_;
      return ConfigValue::of(std::move(items));
    }
    while (true) {
      items.push_back(value(false));
      skip_space();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == ']') {
        ++pos_;
        return ConfigValue::of(std::move(items));
      }
      throw ConfigError("expected ',' or ']' in list");
    }
  }

  static ConfigValue scalar(const std::string& token) {
    if (token.empty()) throw ConfigError("missing value");
    if (token == "true") return ConfigValue::of(true);
    if (token == "false") return ConfigValue::of(false);
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (token.find_first_of(".eEn") == std::string::npos) {
      std::int64_t i = 0;
      auto [ptr, ec] = std::from_chars(first, last, i);
      if (ec == std::errc() && ptr == last) return ConfigValue::of(i);
    }
    double d = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, d);
    if (ec == std::errc() && ptr == last) return ConfigValue::of(d);
    throw ConfigError("cannot parse value '" + token + "' (strings need quotes)");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfigValue ConfigValue::parse(const std::string& text) {
  Cursor cursor(text);
  ConfigValue v = cursor.value(true);
  if (!cursor.done()) throw ConfigError("trailing characters after value '" + text + "'");
  return v;
}

ConfigTable parse_config_text(const std::string& text) {
  ConfigTable table;
  std::string section;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (line[0] == '[') {
      const auto close = line.find(']');
      if (close == std::string::npos || trim(line.substr(close + 1)).find_first_not_of('#') == 0) {
        throw ConfigError(where + "malformed section header");
      }
      section = trim(line.substr(1, close - 1));
      if (section.empty()) throw ConfigError(where + "empty section name");
      table[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "key outside any [section]");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where + "empty key");
    try {
      auto [it, inserted] = table[section].emplace(key, ConfigValue::parse(line.substr(eq + 1)));
      if (!inserted) throw ConfigError("duplicate key");
    } catch (const ConfigError& e) {
      throw ConfigError(where + "[" + section + "] " + key + ": " + e.what());
    }
  }
  return table;
}

std::string format_config_text(const ConfigTable& table,
                               const std::vector<std::string>& section_order) {
  std::string out;
  for (const auto& name : section_order) {
    auto it = table.find(name);
    if (it == table.end()) continue;
    if (!out.empty()) out += "\n";
    out += "[" + name + "]\n";
    for (const auto& [key, value] : it->second) out += key + " = " + value.to_text() + "\n";
  }
  return out;
}

}  // namespace specnet
