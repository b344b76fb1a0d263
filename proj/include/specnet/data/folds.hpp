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

#ifndef SPECNET_DATA_FOLDS_HPP_
#define SPECNET_DATA_FOLDS_HPP_

#include <vector>

#include "specnet/data/dataset.hpp"

namespace specnet {

inline constexpr int kNumFolds = 10;

struct FoldPlan {
  int test_fold = 1;
  int val_fold = 2;
  std::vector<int> train_folds;
};

// Validation uses the next fold cyclically; the other eight train.
FoldPlan make_fold_plan(int test_fold);

struct SplitExamples {
  std::vector<Example> train;
  std::vector<Example> val;
  std::vector<Example> test;
};

SplitExamples split_by_fold(const Dataset& dataset, const FoldPlan& plan);
SplitExamples split_by_list(const Dataset& dataset);

}  // namespace specnet

#endif  // SPECNET_DATA_FOLDS_HPP_
