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

#ifndef SPECNET_DATA_SAMPLING_HPP_
#define SPECNET_DATA_SAMPLING_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "specnet/data/dataset.hpp"

namespace specnet {

// Keeps round(fraction * n_c) examples of every class c, drawn without
// replacement, never fewer than one for a nonempty class. The result
// preserves input order. Deterministic in `seed`.
std::vector<Example> stratified_fraction(std::span<const Example> examples, double fraction,
                                         std::uint64_t seed);

std::size_t stratified_count(std::size_t class_count, double fraction);

}  // namespace specnet

#endif  // SPECNET_DATA_SAMPLING_HPP_
