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

#ifndef SPECNET_CLI_CLI_HPP_
#define SPECNET_CLI_CLI_HPP_

#include <filesystem>
#include <ostream>
#include <string>

#include "specnet/cli/run_config.hpp"
#include "specnet/train/report.hpp"

namespace specnet {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// specnet <featurize|train|transfer|ablate|report> [options]
//
// Settings come from built-in defaults, then --config, then --set
// section.key=value overrides, then dedicated flags; later sources win.
// Outputs land in <out>/<name>, where an empty name picks
// <command>-<UTC stamp>-seed<seed>, together with the resolved config.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

Json config_to_json(const RunConfig& config);

}  // namespace specnet

#endif  // SPECNET_CLI_CLI_HPP_
