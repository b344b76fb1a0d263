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

#ifndef SPECNET_CLI_CONFIG_HPP_
#define SPECNET_CLI_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace specnet {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Typed value of the sectioned key/value format:
//   [section]
//   key = 42 | 0.5 | true | "text" | [1, 2, 3]
// '#' starts a comment outside strings. Lists hold scalars only.
struct ConfigValue {
  enum class Type { kBool, kInt, kFloat, kString, kList };

  Type type = Type::kString;
  bool b = false;
  std::int64_t i = 0;
  double d = 0.0;
  std::string s;
  std::vector<ConfigValue> list;

  static ConfigValue of(bool v);
  static ConfigValue of(std::int64_t v);
  static ConfigValue of(double v);
  static ConfigValue of(std::string v);
  static ConfigValue of(std::vector<ConfigValue> v);

  std::string to_text() const;
  static ConfigValue parse(const std::string& text);
};

std::string type_name(ConfigValue::Type type);

// Ordered section -> key -> value.
using ConfigTable = std::map<std::string, std::map<std::string, ConfigValue>>;

ConfigTable parse_config_text(const std::string& text);
std::string format_config_text(const ConfigTable& table,
                               const std::vector<std::string>& section_order);

}  // namespace specnet

#endif  // SPECNET_CLI_CONFIG_HPP_
