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

#include "specnet/audio/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace specnet {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

PcmSignal resample(const PcmSignal& signal, int target_rate,
                   const ResamplerOptions& options) {
  if (target_rate <= 0) throw std::invalid_argument("resample: target rate must be positive");
  if (signal.sample_rate <= 0) throw std::invalid_argument("resample: input rate must be positive");
  if (target_rate == signal.sample_rate) return signal;

  const double in_rate = signal.sample_rate;
  const double out_rate = target_rate;
  // Kernel cutoff in cycles per input sample, relative to the input Nyquist.
  const double cutoff = std::min(1.0, out_rate / in_rate) * options.rolloff;
  const double half_width = options.half_width_zero_crossings / cutoff;
  const double i0_beta = std::cyl_bessel_i(0.0, options.kaiser_beta);

  // Tabulate the symmetric kernel once; evaluating the Bessel window per tap
  // dominates otherwise.
  constexpr int kTableDensity = 512;  // entries per input sample
  const auto table_size = std::size_t(std::ceil(half_width * kTableDensity)) + 2;
  std::vector<double> table(table_size);
  for (std::size_t i = 0; i < table_size; ++i) {
    const double u = double(i) / kTableDensity;
    const double r = u / half_width;
    if (r >= 1.0) {
      table[i] = 0.0;
      continue;
    }
    const double window =
        std::cyl_bessel_i(0.0, options.kaiser_beta * std::sqrt(1.0 - r * r)) / i0_beta;
    table[i] = cutoff * sinc(cutoff * u) * window;
  }
  auto kernel = [&](double u) {
    const double pos = std::abs(u) * kTableDensity;
    const auto i = std::size_t(pos);
    if (i + 1 >= table_size) return 0.0;
    const double frac = pos - double(i);
    return table[i] + frac * (table[i + 1] - table[i]);
  };

  const std::size_t n_in = signal.samples.size();
  const auto n_out = std::size_t(std::llround(double(n_in) * out_rate / in_rate));
  PcmSignal out;
  out.sample_rate = target_rate;
  out.samples.resize(n_out);
  const auto& x = signal.samples;

  for (std::size_t n = 0; n < n_out; ++n) {
    // Exact position of output sample n on the input time axis.
    const double t = double(n) * in_rate / out_rate;
    const auto first = std::ptrdiff_t(std::ceil(t - half_width));
    const auto last = std::ptrdiff_t(std::floor(t + half_width));
    double acc = 0.0;
    for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(first, 0);
         k <= last && k < std::ptrdiff_t(n_in); ++k) {
      acc += double(x[std::size_t(k)]) * kernel(t - double(k));
    }
    out.samples[n] = float(acc);
  }
  return out;
}

}  // namespace specnet
