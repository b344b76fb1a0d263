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

#include "specnet/data/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace specnet {

std::size_t stratified_count(std::size_t class_count, double fraction) {
  if (class_count == 0) return 0;
  const auto n = std::size_t(std::llround(fraction * double(class_count)));
  return std::clamp<std::size_t>(n, 1, class_count);
}

std::vector<Example> stratified_fraction(std::span<const Example> examples, double fraction,
                                         std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("stratified_fraction: fraction " + std::to_string(fraction) +
                                " outside (0, 1]");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < examples.size(); ++i) by_class[examples[i].label].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> keep;
  for (const auto& [label, indices] : by_class) {
    std::sample(indices.begin(), indices.end(), std::back_inserter(keep),
                stratified_count(indices.size(), fraction), rng);
  }
  std::sort(keep.begin(), keep.end());
  std::vector<Example> out;
  out.reserve(keep.size());
  for (std::size_t i : keep) out.push_back(examples[i]);
  return out;
}

}  // namespace specnet
