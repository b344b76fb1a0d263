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

#include "specnet/tensor/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace specnet {

double finite_difference_check(
    const std::function<TensorD(const TensorD&)>& fn, TensorD input,
    double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_difference_check: step must be > 0");
  const bool previously_required = input.requires_grad();
  input.set_requires_grad(true);
  input.zero_grad();
  fn(input).backward();
  const std::vector<double> analytic(input.grad().begin(), input.grad().end());

  double worst = 0.0;
  {
    NoGradGuard no_grad;
    auto values = input.mutable_values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + step;
      const double plus = fn(input).item();
      values[i] = saved - step;
      const double minus = fn(input).item();
      values[i] = saved;
      const double numeric = (plus - minus) / (2.0 * step);
      const double denom =
          std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
    }
  }
  input.zero_grad();
  input.set_requires_grad(previously_required);
  return worst;
}

}  // namespace specnet
