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

#include <cstddef>
#include <string>
#include <vector>

#include "specnet/tensor/kernels.hpp"
#include "specnet/tensor/tensor.hpp"

namespace specnet {

namespace {

std::size_t output_extent(std::size_t input, std::size_t kernel,
                          std::size_t stride, std::size_t pad,
                          std::size_t dilation, const char* axis) {
  const std::size_t span = dilation * (kernel - 1) + 1;
  const std::size_t padded = input + 2 * pad;
  if (padded < span) {
    throw ShapeError(std::string("conv2d: dilated kernel extent ") +
                     std::to_string(span) + " exceeds padded input " + axis +
                     " " + std::to_string(padded));
  }
  return (padded - span) / stride + 1;
}

}  // namespace

void ConvGeometry::validate() const {
  if (kernel_h == 0 || kernel_w == 0 || stride_h == 0 || stride_w == 0 ||
      dilation == 0) {
    throw ShapeError("conv2d: kernel, stride and dilation must be >= 1");
  }
}

std::size_t ConvGeometry::output_height(std::size_t input_h) const {
  validate();
  return output_extent(input_h, kernel_h, stride_h, pad_h, dilation, "height");
}

std::size_t ConvGeometry::output_width(std::size_t input_w) const {
  validate();
  return output_extent(input_w, kernel_w, stride_w, pad_w, dilation, "width");
}

namespace kernels {

namespace {
// Products of unsigned sizes with negative offsets need a signed type.
using Index = std::ptrdiff_t;
}  // namespace

template <typename T>
void im2col(const T* image, std::size_t channels, std::size_t h, std::size_t w,
            const ConvGeometry& g, T* columns) {
  const std::size_t oh = g.output_height(h);
  const std::size_t ow = g.output_width(w);
  const std::size_t rows = channels * g.kernel_h * g.kernel_w;
#pragma omp parallel for schedule(static) if (rows * oh * ow > (1 << 16))
  for (std::size_t row = 0; row < rows; ++row) {
    const std::size_t c = row / (g.kernel_h * g.kernel_w);
    const std::size_t i = (row / g.kernel_w) % g.kernel_h;
    const std::size_t j = row % g.kernel_w;
    const T* plane = image + c * h * w;
    T* out = columns + row * oh * ow;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      const Index iy = Index(oy * g.stride_h + i * g.dilation) - Index(g.pad_h);
      T* dst = out + oy * ow;
      if (iy < 0 || iy >= Index(h)) {
        for (std::size_t ox = 0; ox < ow; ++ox) dst[ox] = T(0);
        continue;
      }
      const T* src = plane + iy * Index(w);
      for (std::size_t ox = 0; ox < ow; ++ox) {
        const Index ix = Index(ox * g.stride_w + j * g.dilation) - Index(g.pad_w);
        dst[ox] = (ix >= 0 && ix < Index(w)) ? src[ix] : T(0);
      }
    }
  }
}

template <typename T>
void col2im(const T* columns, std::size_t channels, std::size_t h,
            std::size_t w, const ConvGeometry& g, T* image) {
  const std::size_t oh = g.output_height(h);
  const std::size_t ow = g.output_width(w);
  const std::size_t taps = g.kernel_h * g.kernel_w;
  // Channels are disjoint in the image, so they can be scattered in parallel;
  // within a channel the tap order is fixed.
#pragma omp parallel for schedule(static) if (channels * taps * oh * ow > (1 << 16))
  for (std::size_t c = 0; c < channels; ++c) {
    T* plane = image + c * h * w;
    for (std::size_t t = 0; t < taps; ++t) {
      const std::size_t i = t / g.kernel_w;
      const std::size_t j = t % g.kernel_w;
      const T* src = columns + (c * taps + t) * oh * ow;
      for (std::size_t oy = 0; oy < oh; ++oy) {
        const Index iy = Index(oy * g.stride_h + i * g.dilation) - Index(g.pad_h);
        if (iy < 0 || iy >= Index(h)) continue;
        T* dst = plane + iy * Index(w);
        for (std::size_t ox = 0; ox < ow; ++ox) {
          const Index ix = Index(ox * g.stride_w + j * g.dilation) - Index(g.pad_w);
          if (ix >= 0 && ix < Index(w)) dst[ix] += src[oy * ow + ox];
        }
      }
    }
  }
}

namespace {

bool is_pointwise(const ConvGeometry& g) {
  return g.kernel_h == 1 && g.kernel_w == 1 && g.stride_h == 1 &&
         g.stride_w == 1 && g.pad_h == 0 && g.pad_w == 0;
}

}  // namespace

template <typename T>
void conv2d_forward(const ConvProblem& p, const T* input, const T* weight,
                    const T* bias, T* output) {
  const ConvGeometry& g = p.geom;
  const std::size_t oh = p.out_h();
  const std::size_t ow = p.out_w();
  const std::size_t spatial = oh * ow;
  const std::size_t patch = p.in_channels * g.kernel_h * g.kernel_w;
  const bool pointwise = is_pointwise(g);
  std::vector<T> columns(pointwise ? 0 : patch * spatial);

  for (std::size_t n = 0; n < p.batch; ++n) {
    const T* image = input + n * p.in_channels * p.in_h * p.in_w;
    T* out = output + n * p.out_channels * spatial;
    const T* cols = image;
    if (!pointwise) {
      im2col(image, p.in_channels, p.in_h, p.in_w, g, columns.data());
      cols = columns.data();
    }
    gemm(Transpose::kNo, Transpose::kNo, p.out_channels, spatial, patch, T(1),
         weight, patch, cols, spatial, T(0), out, spatial);
    if (bias) {
      for (std::size_t co = 0; co < p.out_channels; ++co) {
        T* row = out + co * spatial;
        for (std::size_t s = 0; s < spatial; ++s) row[s] += bias[co];
      }
    }
  }
}

template <typename T>
void conv2d_backward(const ConvProblem& p, const T* input, const T* weight,
                     const T* grad_output, T* grad_input, T* grad_weight,
                     T* grad_bias) {
  const ConvGeometry& g = p.geom;
  const std::size_t spatial = p.out_h() * p.out_w();
  const std::size_t patch = p.in_channels * g.kernel_h * g.kernel_w;
  const std::size_t image_size = p.in_channels * p.in_h * p.in_w;
  const bool pointwise = is_pointwise(g);
  std::vector<T> columns(pointwise ? 0 : patch * spatial);
  std::vector<T> grad_columns(grad_input && !pointwise ? patch * spatial : 0);

  for (std::size_t n = 0; n < p.batch; ++n) {
    const T* dy = grad_output + n * p.out_channels * spatial;
    if (grad_bias) {
      for (std::size_t co = 0; co < p.out_channels; ++co) {
        const T* row = dy + co * spatial;
        T acc = T(0);
        for (std::size_t s = 0; s < spatial; ++s) acc += row[s];
        grad_bias[co] += acc;
      }
    }
    if (grad_weight) {
      const T* image = input + n * image_size;
      const T* cols = image;
      if (!pointwise) {
        im2col(image, p.in_channels, p.in_h, p.in_w, g, columns.data());
        cols = columns.data();
      }
      // dW[Cout, patch] += dY[Cout, S] * cols[patch, S]^T
      gemm(Transpose::kNo, Transpose::kYes, p.out_channels, patch, spatial,
           T(1), dy, spatial, cols, spatial, T(1), grad_weight, patch);
    }
    if (grad_input) {
      T* dx = grad_input + n * image_size;
      if (pointwise) {
        gemm(Transpose::kYes, Transpose::kNo, patch, spatial, p.out_channels,
             T(1), weight, patch, dy, spatial, T(1), dx, spatial);
      } else {
        gemm(Transpose::kYes, Transpose::kNo, patch, spatial, p.out_channels,
             T(1), weight, patch, dy, spatial, T(0), grad_columns.data(),
             spatial);
        col2im(grad_columns.data(), p.in_channels, p.in_h, p.in_w, g, dx);
      }
    }
  }
}

template <typename T>
void conv2d_forward_reference(const ConvProblem& p, const T* input,
                              const T* weight, const T* bias, T* output) {
  const ConvGeometry& g = p.geom;
  const std::size_t oh = p.out_h();
  const std::size_t ow = p.out_w();
  for (std::size_t n = 0; n < p.batch; ++n) {
    for (std::size_t co = 0; co < p.out_channels; ++co) {
      for (std::size_t oy = 0; oy < oh; ++oy) {
        for (std::size_t ox = 0; ox < ow; ++ox) {
          T acc = T(0);
          for (std::size_t ci = 0; ci < p.in_channels; ++ci) {
            for (std::size_t i = 0; i < g.kernel_h; ++i) {
              const Index iy = Index(oy * g.stride_h + i * g.dilation) - Index(g.pad_h);
              if (iy < 0 || iy >= Index(p.in_h)) continue;
              for (std::size_t j = 0; j < g.kernel_w; ++j) {
                const Index ix = Index(ox * g.stride_w + j * g.dilation) - Index(g.pad_w);
                if (ix < 0 || ix >= Index(p.in_w)) continue;
                acc += weight[((co * p.in_channels + ci) * g.kernel_h + i) * g.kernel_w + j] *
                       input[((n * p.in_channels + ci) * p.in_h + iy) * p.in_w + ix];
              }
            }
          }
          // Bias last, matching the summation order of the gemm path.
          output[((n * p.out_channels + co) * oh + oy) * ow + ox] =
              bias ? acc + bias[co] : acc;
        }
      }
    }
  }
}

template <typename T>
void conv2d_backward_reference(const ConvProblem& p, const T* input,
                               const T* weight, const T* grad_output,
                               T* grad_input, T* grad_weight, T* grad_bias) {
  const ConvGeometry& g = p.geom;
  const std::size_t oh = p.out_h();
  const std::size_t ow = p.out_w();
  for (std::size_t n = 0; n < p.batch; ++n) {
    for (std::size_t co = 0; co < p.out_channels; ++co) {
      for (std::size_t oy = 0; oy < oh; ++oy) {
        for (std::size_t ox = 0; ox < ow; ++ox) {
          const T dy = grad_output[((n * p.out_channels + co) * oh + oy) * ow + ox];
          if (grad_bias) grad_bias[co] += dy;
          for (std::size_t ci = 0; ci < p.in_channels; ++ci) {
            for (std::size_t i = 0; i < g.kernel_h; ++i) {
              const Index iy = Index(oy * g.stride_h + i * g.dilation) - Index(g.pad_h);
              if (iy < 0 || iy >= Index(p.in_h)) continue;
              for (std::size_t j = 0; j < g.kernel_w; ++j) {
                const Index ix = Index(ox * g.stride_w + j * g.dilation) - Index(g.pad_w);
                if (ix < 0 || ix >= Index(p.in_w)) continue;
                const std::size_t w_at = ((co * p.in_channels + ci) * g.kernel_h + i) * g.kernel_w + j;
                const std::size_t x_at = ((n * p.in_channels + ci) * p.in_h + iy) * p.in_w + ix;
                if (grad_weight) grad_weight[w_at] += dy * input[x_at];
                if (grad_input) grad_input[x_at] += dy * weight[w_at];
              }
            }
          }
        }
      }
    }
  }
}

#define SPECNET_INSTANTIATE_CONV(T)                                            \
  template void im2col<T>(const T*, std::size_t, std::size_t, std::size_t,    \
                          const ConvGeometry&, T*);                            \
  template void col2im<T>(const T*, std::size_t, std::size_t, std::size_t,    \
                          const ConvGeometry&, T*);                            \
  template void conv2d_forward<T>(const ConvProblem&, const T*, const T*,      \
                                  const T*, T*);                               \
  template void conv2d_backward<T>(const ConvProblem&, const T*, const T*,     \
                                   const T*, T*, T*, T*);                      \
  template void conv2d_forward_reference<T>(const ConvProblem&, const T*,      \
                                            const T*, const T*, T*);           \
  template void conv2d_backward_reference<T>(const ConvProblem&, const T*,     \
                                             const T*, const T*, T*, T*, T*);

SPECNET_INSTANTIATE_CONV(float)
SPECNET_INSTANTIATE_CONV(double)

#undef SPECNET_INSTANTIATE_CONV

}  // namespace kernels
}  // namespace specnet
