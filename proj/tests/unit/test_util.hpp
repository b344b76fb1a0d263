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

#ifndef SPECNET_TESTS_TEST_UTIL_HPP_
#define SPECNET_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "specnet/tensor/tensor.hpp"

namespace specnet::test {

inline std::filesystem::path fixture(const std::string& rel) {
  return std::filesystem::path(SPECNET_FIXTURE_DIR) / rel;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("specnet_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

template <typename T>
BasicTensor<T> random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<T> v(shape_numel(shape));
  for (auto& x : v) x = T(dist(rng));
  return BasicTensor<T>(std::move(shape), std::move(v));
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

// Relative error scaled by the magnitude of the whole reference array, which
// stays meaningful for entries that cancel to near zero.
template <typename A, typename B>
double max_rel_err(const A& got, const B& want) {
  double scale = 1e-12;
  for (auto w : want) scale = std::max(scale, std::abs(double(w)));
  double worst = 0.0;
  for (std::size_t i = 0; i < want.size(); ++i) {
    worst = std::max(worst, std::abs(double(got[i]) - double(want[i])) / scale);
  }
  return worst;
}

}  // namespace specnet::test

#endif  // SPECNET_TESTS_TEST_UTIL_HPP_
