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

#ifndef SPECNET_TENSOR_GRADCHECK_HPP_
#define SPECNET_TENSOR_GRADCHECK_HPP_

#include <functional>

#include "specnet/tensor/tensor.hpp"

namespace specnet {

// Compares the reverse-mode gradient of a scalar function against central
// differences at every coordinate of `input`. Returns
//   max_i |analytic_i - numeric_i| / max(|analytic_i|, |numeric_i|, 1e-8).
// `fn` must be deterministic; `input` is restored before returning.
double finite_difference_check(
    const std::function<TensorD(const TensorD&)>& fn, TensorD input,
    double step);

}  // namespace specnet

#endif  // SPECNET_TENSOR_GRADCHECK_HPP_
