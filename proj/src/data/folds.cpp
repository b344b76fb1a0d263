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

#include "specnet/data/folds.hpp"

#include <stdexcept>

namespace specnet {

FoldPlan make_fold_plan(int test_fold) {
  if (test_fold < 1 || test_fold > kNumFolds) {
    throw std::invalid_argument("fold plan: test fold " + std::to_string(test_fold) +
                                " outside 1-10");
  }
  FoldPlan plan;
  plan.test_fold = test_fold;
  plan.val_fold = test_fold % kNumFolds + 1;
  for (int f = 1; f <= kNumFolds; ++f) {
    if (f != plan.test_fold && f != plan.val_fold) plan.train_folds.push_back(f);
  }
  return plan;
}

SplitExamples split_by_fold(const Dataset& dataset, const FoldPlan& plan) {
  SplitExamples out;
  for (const auto& e : dataset.examples) {
    if (!e.fold) throw DatasetError("split_by_fold: example " + e.id + " has no fold");
    if (*e.fold == plan.test_fold) {
      out.test.push_back(e);
    } else if (*e.fold == plan.val_fold) {
      out.val.push_back(e);
    } else {
      out.train.push_back(e);
    }
  }
  return out;
}

SplitExamples split_by_list(const Dataset& dataset) {
  SplitExamples out;
  for (const auto& e : dataset.examples) {
    if (!e.split) throw DatasetError("split_by_list: example " + e.id + " has no split");
    switch (*e.split) {
      case Split::kTrain: out.train.push_back(e); break;
      case Split::kVal: out.val.push_back(e); break;
      case Split::kTest: out.test.push_back(e); break;
    }
  }
  return out;
}

}  // namespace specnet
