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

#ifndef SPECNET_AUDIO_RESAMPLE_HPP_
#define SPECNET_AUDIO_RESAMPLE_HPP_

#include "specnet/audio/wav.hpp"

namespace specnet {

struct ResamplerOptions {
  // Zero crossings of the interpolation kernel on each side of the centre.
  int half_width_zero_crossings = 32;
  // Passband edge as a fraction of the lower of the two Nyquist rates.
  double rolloff = 0.95;
  double kaiser_beta = 8.6;
};

// Band-limited windowed-sinc interpolation. The output holds
// round(n * target_rate / rate) samples; equal rates return the input as is.
PcmSignal resample(const PcmSignal& signal, int target_rate,
                   const ResamplerOptions& options = {});

}  // namespace specnet

#endif  // SPECNET_AUDIO_RESAMPLE_HPP_
