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

#include "specnet/tensor/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace specnet {

namespace {

template <typename T>
using Node = typename BasicTensor<T>::Node;

void require_rank(const Shape& shape, std::size_t rank, const char* op) {
  if (shape.size() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " +
                     std::to_string(rank) + ", got shape " +
                     shape_to_string(shape));
  }
}

void require_same_shape(const Shape& a, const Shape& b, const char* op) {
  if (a != b) {
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     shape_to_string(a) + " vs " + shape_to_string(b));
  }
}

template <typename T>
bool wants_grad(const std::shared_ptr<Node<T>>& node) {
  return node && node->requires_grad;
}

}  // namespace

template <typename T>
BasicBatchNormState<T> BasicBatchNormState<T>::make(std::size_t channels) {
  BasicBatchNormState state;
  state.gamma = BasicTensor<T>(Shape{channels}, T(1));
  state.gamma.set_requires_grad(true);
  state.beta = BasicTensor<T>(Shape{channels}, T(0));
  state.beta.set_requires_grad(true);
  state.running_mean = BasicTensor<T>(Shape{channels}, T(0));
  state.running_var = BasicTensor<T>(Shape{channels}, T(1));
  return state;
}

template <typename T>
BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_same_shape(a.shape(), b.shape(), "add");
  std::vector<T> out(a.numel());
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return BasicTensor<T>::from_op(a.shape(), std::move(out), {a, b},
                                 [](Node<T>& node) {
    for (auto& parent : node.parents) {
      if (!parent->requires_grad) continue;
      auto& g = parent->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i];
    }
  });
}

template <typename T>
BasicTensor<T> mul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_same_shape(a.shape(), b.shape(), "mul");
  std::vector<T> out(a.numel());
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return BasicTensor<T>::from_op(a.shape(), std::move(out), {a, b},
                                 [](Node<T>& node) {
    auto& pa = *node.parents[0];
    auto& pb = *node.parents[1];
    // The same node may appear twice (x * x); read values before writing.
    if (pa.requires_grad) {
      auto& g = pa.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i] * pb.values[i];
    }
    if (pb.requires_grad) {
      auto& g = pb.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i] * pa.values[i];
    }
  });
}

template <typename T>
BasicTensor<T> scale(const BasicTensor<T>& a, T factor) {
  std::vector<T> out(a.values().begin(), a.values().end());
  for (auto& v : out) v *= factor;
  return BasicTensor<T>::from_op(a.shape(), std::move(out), {a},
                                 [factor](Node<T>& node) {
    auto& g = node.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += factor * node.grad[i];
  });
}

template <typename T>
BasicTensor<T> relu(const BasicTensor<T>& x) {
  std::vector<T> out(x.numel());
  auto xv = x.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] > T(0) ? xv[i] : T(0);
  return BasicTensor<T>::from_op(x.shape(), std::move(out), {x},
                                 [](Node<T>& node) {
    auto& parent = *node.parents[0];
    auto& g = parent.grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (parent.values[i] > T(0)) g[i] += node.grad[i];
    }
  });
}

template <typename T>
BasicTensor<T> sum(const BasicTensor<T>& x) {
  T total = T(0);
  for (T v : x.values()) total += v;
  return BasicTensor<T>::from_op(Shape{}, {total}, {x}, [](Node<T>& node) {
    auto& g = node.parents[0]->grad_buffer();
    for (auto& v : g) v += node.grad[0];
  });
}

template <typename T>
BasicTensor<T> mean(const BasicTensor<T>& x) {
  if (x.numel() == 0) throw ShapeError("mean: empty tensor");
  return scale(sum(x), T(1) / T(x.numel()));
}

template <typename T>
BasicTensor<T> reshape(const BasicTensor<T>& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw ShapeError("reshape: cannot view " + shape_to_string(x.shape()) +
                     " as " + shape_to_string(shape));
  }
  std::vector<T> out(x.values().begin(), x.values().end());
  return BasicTensor<T>::from_op(std::move(shape), std::move(out), {x},
                                 [](Node<T>& node) {
    auto& g = node.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i];
  });
}

template <typename T>
BasicTensor<T> flatten(const BasicTensor<T>& x) {
  if (x.rank() < 1) throw ShapeError("flatten: scalar input");
  const std::size_t n = x.dim(0);
  return reshape(x, Shape{n, n == 0 ? 0 : x.numel() / n});
}

template <typename T>
BasicTensor<T> conv2d(const BasicTensor<T>& input, const BasicTensor<T>& weight,
                      const BasicTensor<T>& bias, const ConvGeometry& geom) {
  require_rank(input.shape(), 4, "conv2d input");
  require_rank(weight.shape(), 4, "conv2d weight");
  ConvProblem p;
  p.batch = input.dim(0);
  p.in_channels = input.dim(1);
  p.in_h = input.dim(2);
  p.in_w = input.dim(3);
  p.out_channels = weight.dim(0);
  p.geom = geom;
  if (weight.dim(1) != p.in_channels) {
    throw ShapeError("conv2d: weight expects " + std::to_string(weight.dim(1)) +
                     " input channels, input has " +
                     std::to_string(p.in_channels));
  }
  if (weight.dim(2) != geom.kernel_h || weight.dim(3) != geom.kernel_w) {
    throw ShapeError("conv2d: weight kernel " + shape_to_string(weight.shape()) +
                     " disagrees with geometry");
  }
  if (bias.defined() && bias.shape() != Shape{p.out_channels}) {
    throw ShapeError("conv2d: bias shape " + shape_to_string(bias.shape()));
  }
  const std::size_t oh = p.out_h();
  const std::size_t ow = p.out_w();
  std::vector<T> out(p.batch * p.out_channels * oh * ow);
  kernels::conv2d_forward(p, input.values().data(), weight.values().data(),
                          bias.defined() ? bias.values().data() : nullptr,
                          out.data());

  std::vector<BasicTensor<T>> parents{input, weight};
  if (bias.defined()) parents.push_back(bias);
  return BasicTensor<T>::from_op(
      Shape{p.batch, p.out_channels, oh, ow}, std::move(out), std::move(parents),
      [p](Node<T>& node) {
        auto& in = *node.parents[0];
        auto& w = *node.parents[1];
        T* grad_bias = nullptr;
        if (node.parents.size() > 2 && node.parents[2]->requires_grad) {
          grad_bias = node.parents[2]->grad_buffer().data();
        }
        kernels::conv2d_backward(
            p, in.values.data(), w.values.data(), node.grad.data(),
            in.requires_grad ? in.grad_buffer().data() : nullptr,
            w.requires_grad ? w.grad_buffer().data() : nullptr, grad_bias);
      });
}

namespace {

std::size_t pool_extent(std::size_t input, std::size_t window,
                        std::size_t stride, std::size_t pad, const char* op) {
  if (window == 0 || stride == 0) {
    throw ShapeError(std::string(op) + ": window and stride must be >= 1");
  }
  if (2 * pad > window) {
    throw ShapeError(std::string(op) + ": padding exceeds half the window");
  }
  if (input + 2 * pad < window) {
    throw ShapeError(std::string(op) + ": window " + std::to_string(window) +
                     " larger than padded input " +
                     std::to_string(input + 2 * pad));
  }
  return (input + 2 * pad - window) / stride + 1;
}

}  // namespace

template <typename T>
BasicTensor<T> max_pool2d(const BasicTensor<T>& input, const PoolGeometry& g) {
  require_rank(input.shape(), 4, "max_pool2d");
  const std::size_t n = input.dim(0), c = input.dim(1);
  const std::size_t h = input.dim(2), w = input.dim(3);
  const std::size_t oh = pool_extent(h, g.window_h, g.stride_h, g.pad_h, "max_pool2d");
  const std::size_t ow = pool_extent(w, g.window_w, g.stride_w, g.pad_w, "max_pool2d");
  std::vector<T> out(n * c * oh * ow);
  std::vector<std::size_t> argmax(out.size());
  auto xv = input.values();
  using Index = std::ptrdiff_t;
#pragma omp parallel for schedule(static) if (out.size() > (1 << 14))
  for (std::size_t plane = 0; plane < n * c; ++plane) {
    const std::size_t base = plane * h * w;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        T best = -std::numeric_limits<T>::infinity();
        std::size_t best_at = base;
        bool found = false;
        for (std::size_t i = 0; i < g.window_h; ++i) {
          const Index iy = Index(oy * g.stride_h + i) - Index(g.pad_h);
          if (iy < 0 || iy >= Index(h)) continue;
          for (std::size_t j = 0; j < g.window_w; ++j) {
            const Index ix = Index(ox * g.stride_w + j) - Index(g.pad_w);
            if (ix < 0 || ix >= Index(w)) continue;
            const std::size_t at = base + std::size_t(iy) * w + std::size_t(ix);
            if (!found || xv[at] > best) {
              best = xv[at];
              best_at = at;
              found = true;
            }
          }
        }
        const std::size_t o = (plane * oh + oy) * ow + ox;
        out[o] = best;
        argmax[o] = best_at;
      }
    }
  }
  return BasicTensor<T>::from_op(
      Shape{n, c, oh, ow}, std::move(out), {input},
      [argmax = std::move(argmax)](Node<T>& node) {
        auto& g = node.parents[0]->grad_buffer();
        for (std::size_t o = 0; o < argmax.size(); ++o) g[argmax[o]] += node.grad[o];
      });
}

template <typename T>
BasicTensor<T> avg_pool2d(const BasicTensor<T>& input, const PoolGeometry& g) {
  require_rank(input.shape(), 4, "avg_pool2d");
  const std::size_t n = input.dim(0), c = input.dim(1);
  const std::size_t h = input.dim(2), w = input.dim(3);
  const std::size_t oh = pool_extent(h, g.window_h, g.stride_h, g.pad_h, "avg_pool2d");
  const std::size_t ow = pool_extent(w, g.window_w, g.stride_w, g.pad_w, "avg_pool2d");
  const T inv_area = T(1) / T(g.window_h * g.window_w);
  std::vector<T> out(n * c * oh * ow, T(0));
  auto xv = input.values();
  using Index = std::ptrdiff_t;
  auto for_each_tap = [g, h, w, oh, ow](std::size_t plane, auto&& fn) {
    const std::size_t base = plane * h * w;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        const std::size_t o = (plane * oh + oy) * ow + ox;
        for (std::size_t i = 0; i < g.window_h; ++i) {
          const Index iy = Index(oy * g.stride_h + i) - Index(g.pad_h);
          if (iy < 0 || iy >= Index(h)) continue;
          for (std::size_t j = 0; j < g.window_w; ++j) {
            const Index ix = Index(ox * g.stride_w + j) - Index(g.pad_w);
            if (ix < 0 || ix >= Index(w)) continue;
            fn(o, base + std::size_t(iy) * w + std::size_t(ix));
          }
        }
      }
    }
  };
  for (std::size_t plane = 0; plane < n * c; ++plane) {
    for_each_tap(plane, [&](std::size_t o, std::size_t at) { out[o] += xv[at]; });
  }
  for (auto& v : out) v *= inv_area;
  return BasicTensor<T>::from_op(
      Shape{n, c, oh, ow}, std::move(out), {input},
      [for_each_tap, inv_area, planes = n * c](Node<T>& node) {
        auto& g = node.parents[0]->grad_buffer();
        for (std::size_t plane = 0; plane < planes; ++plane) {
          for_each_tap(plane, [&](std::size_t o, std::size_t at) {
            g[at] += node.grad[o] * inv_area;
          });
        }
      });
}

template <typename T>
BasicTensor<T> global_pool(const BasicTensor<T>& input, PoolKind kind) {
  require_rank(input.shape(), 4, "global_pool");
  const std::size_t n = input.dim(0), c = input.dim(1);
  const std::size_t area = input.dim(2) * input.dim(3);
  if (area == 0) throw ShapeError("global_pool: empty spatial extent");
  auto xv = input.values();
  std::vector<T> out(n * c);
  std::vector<std::size_t> argmax(kind == PoolKind::kMax ? n * c : 0);
  for (std::size_t plane = 0; plane < n * c; ++plane) {
    const T* x = xv.data() + plane * area;
    if (kind == PoolKind::kMax) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < area; ++i) {
        if (x[i] > x[best]) best = i;
      }
      out[plane] = x[best];
      argmax[plane] = plane * area + best;
    } else {
      T acc = T(0);
      for (std::size_t i = 0; i < area; ++i) acc += x[i];
      out[plane] = acc / T(area);
    }
  }
  return BasicTensor<T>::from_op(
      Shape{n, c, 1, 1}, std::move(out), {input},
      [kind, area, argmax = std::move(argmax)](Node<T>& node) {
        auto& g = node.parents[0]->grad_buffer();
        if (kind == PoolKind::kMax) {
          for (std::size_t p = 0; p < argmax.size(); ++p) g[argmax[p]] += node.grad[p];
          return;
        }
        const T inv = T(1) / T(area);
        for (std::size_t p = 0; p < node.grad.size(); ++p) {
          const T share = node.grad[p] * inv;
          for (std::size_t i = 0; i < area; ++i) g[p * area + i] += share;
        }
      });
}

template <typename T>
BasicTensor<T> batch_norm2d(const BasicTensor<T>& input,
                            BasicBatchNormState<T>& state, Mode mode) {
  require_rank(input.shape(), 4, "batch_norm2d");
  const std::size_t n = input.dim(0), c = input.dim(1);
  const std::size_t area = input.dim(2) * input.dim(3);
  if (n == 0) throw ShapeError("batch_norm2d: batch of size 0");
  if (state.channels() != c || state.beta.numel() != c ||
      state.running_mean.numel() != c || state.running_var.numel() != c) {
    throw ShapeError("batch_norm2d: state has " +
                     std::to_string(state.channels()) + " channels, input " +
                     std::to_string(c));
  }
  const std::size_t count = n * area;
  auto xv = input.values();
  auto gamma = state.gamma.values();
  auto beta = state.beta.values();
  std::vector<T> out(xv.size());
  std::vector<T> xhat(xv.size());
  std::vector<T> inv_std(c);
  std::vector<T> batch_mean(c), batch_var(c);

#pragma omp parallel for schedule(static) if (xv.size() > (1 << 14))
  for (std::size_t ch = 0; ch < c; ++ch) {
    double mu, var;
    if (mode == Mode::kTrain) {
      double acc = 0.0;
      for (std::size_t b = 0; b < n; ++b) {
        const T* x = xv.data() + (b * c + ch) * area;
        for (std::size_t i = 0; i < area; ++i) acc += x[i];
      }
      mu = acc / double(count);
      double sq = 0.0;
      for (std::size_t b = 0; b < n; ++b) {
        const T* x = xv.data() + (b * c + ch) * area;
        for (std::size_t i = 0; i < area; ++i) {
          const double d = x[i] - mu;
          sq += d * d;
        }
      }
      var = sq / double(count);
    } else {
      mu = state.running_mean.values()[ch];
      var = state.running_var.values()[ch];
    }
    batch_mean[ch] = T(mu);
    batch_var[ch] = T(var);
    const double is = 1.0 / std::sqrt(var + double(state.eps));
    inv_std[ch] = T(is);
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t off = (b * c + ch) * area;
      for (std::size_t i = 0; i < area; ++i) {
        const T xh = T((xv[off + i] - mu) * is);
        xhat[off + i] = xh;
        out[off + i] = gamma[ch] * xh + beta[ch];
      }
    }
  }

  if (mode == Mode::kTrain) {
    auto rm = state.running_mean.mutable_values();
    auto rv = state.running_var.mutable_values();
    const T m = state.momentum;
    const T unbias = count > 1 ? T(double(count) / double(count - 1)) : T(1);
    for (std::size_t ch = 0; ch < c; ++ch) {
      rm[ch] = (T(1) - m) * rm[ch] + m * batch_mean[ch];
      rv[ch] = (T(1) - m) * rv[ch] + m * batch_var[ch] * unbias;
    }
  }

  return BasicTensor<T>::from_op(
      input.shape(), std::move(out), {input, state.gamma, state.beta},
      [n, c, area, count, mode, xhat = std::move(xhat),
       inv_std = std::move(inv_std)](Node<T>& node) {
        auto& in = *node.parents[0];
        auto& gm = *node.parents[1];
        auto& bt = *node.parents[2];
        const auto& dy = node.grad;
        for (std::size_t ch = 0; ch < c; ++ch) {
          double sum_dy = 0.0, sum_dy_xhat = 0.0;
          for (std::size_t b = 0; b < n; ++b) {
            const std::size_t off = (b * c + ch) * area;
            for (std::size_t i = 0; i < area; ++i) {
              sum_dy += dy[off + i];
              sum_dy_xhat += double(dy[off + i]) * xhat[off + i];
            }
          }
          if (gm.requires_grad) gm.grad_buffer()[ch] += T(sum_dy_xhat);
          if (bt.requires_grad) bt.grad_buffer()[ch] += T(sum_dy);
          if (!in.requires_grad) continue;
          auto& dx = in.grad_buffer();
          const double g = gm.values[ch];
          const double is = inv_std[ch];
          for (std::size_t b = 0; b < n; ++b) {
            const std::size_t off = (b * c + ch) * area;
            for (std::size_t i = 0; i < area; ++i) {
              if (mode == Mode::kTrain) {
                dx[off + i] += T(g * is / double(count) *
                                 (double(count) * dy[off + i] - sum_dy -
                                  xhat[off + i] * sum_dy_xhat));
              } else {
                dx[off + i] += T(g * is * dy[off + i]);
              }
            }
          }
        }
      });
}

template <typename T>
BasicTensor<T> affine(const BasicTensor<T>& input, const BasicTensor<T>& weight,
                      const BasicTensor<T>& bias) {
  require_rank(input.shape(), 2, "affine input");
  require_rank(weight.shape(), 2, "affine weight");
  const std::size_t n = input.dim(0), f = input.dim(1), k = weight.dim(1);
  if (weight.dim(0) != f) {
    throw ShapeError("affine: input " + shape_to_string(input.shape()) +
                     " incompatible with weight " +
                     shape_to_string(weight.shape()));
  }
  if (bias.shape() != Shape{k}) {
    throw ShapeError("affine: bias shape " + shape_to_string(bias.shape()) +
                     " for " + std::to_string(k) + " outputs");
  }
  std::vector<T> out(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(bias.values().begin(), bias.values().end(), out.begin() + i * k);
  }
  kernels::gemm(kernels::Transpose::kNo, kernels::Transpose::kNo, n, k, f, T(1),
                input.values().data(), f, weight.values().data(), k, T(1),
                out.data(), k);
  return BasicTensor<T>::from_op(
      Shape{n, k}, std::move(out), {input, weight, bias},
      [n, f, k](Node<T>& node) {
        auto& x = *node.parents[0];
        auto& w = *node.parents[1];
        auto& b = *node.parents[2];
        using kernels::Transpose;
        if (x.requires_grad) {
          kernels::gemm(Transpose::kNo, Transpose::kYes, n, f, k, T(1),
                        node.grad.data(), k, w.values.data(), k, T(1),
                        x.grad_buffer().data(), f);
        }
        if (w.requires_grad) {
          kernels::gemm(Transpose::kYes, Transpose::kNo, f, k, n, T(1),
                        x.values.data(), f, node.grad.data(), k, T(1),
                        w.grad_buffer().data(), k);
        }
        if (b.requires_grad) {
          auto& gb = b.grad_buffer();
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < k; ++j) gb[j] += node.grad[i * k + j];
          }
        }
      });
}

template <typename T>
BasicTensor<T> channel_concat(std::span<const BasicTensor<T>> inputs) {
  if (inputs.empty()) throw ShapeError("channel_concat: no inputs");
  for (const auto& t : inputs) require_rank(t.shape(), 4, "channel_concat");
  const std::size_t n = inputs[0].dim(0);
  const std::size_t h = inputs[0].dim(2), w = inputs[0].dim(3);
  const std::size_t area = h * w;
  std::vector<std::size_t> channels;
  std::size_t total = 0;
  for (const auto& t : inputs) {
    if (t.dim(0) != n || t.dim(2) != h || t.dim(3) != w) {
      throw ShapeError("channel_concat: " + shape_to_string(t.shape()) +
                       " does not match " + shape_to_string(inputs[0].shape()) +
                       " outside the channel axis");
    }
    channels.push_back(t.dim(1));
    total += t.dim(1);
  }
  std::vector<T> out(n * total * area);
  for (std::size_t b = 0; b < n; ++b) {
    std::size_t offset = 0;
    for (std::size_t t = 0; t < inputs.size(); ++t) {
      auto src = inputs[t].values().subspan(b * channels[t] * area, channels[t] * area);
      std::copy(src.begin(), src.end(), out.begin() + (b * total + offset) * area);
      offset += channels[t];
    }
  }
  std::vector<BasicTensor<T>> parents(inputs.begin(), inputs.end());
  return BasicTensor<T>::from_op(
      Shape{n, total, h, w}, std::move(out), std::move(parents),
      [n, total, area, channels = std::move(channels)](Node<T>& node) {
        std::size_t offset = 0;
        for (std::size_t t = 0; t < channels.size(); ++t) {
          auto& parent = *node.parents[t];
          if (parent.requires_grad) {
            auto& g = parent.grad_buffer();
            for (std::size_t b = 0; b < n; ++b) {
              const T* src = node.grad.data() + (b * total + offset) * area;
              T* dst = g.data() + b * channels[t] * area;
              for (std::size_t i = 0; i < channels[t] * area; ++i) dst[i] += src[i];
            }
          }
          offset += channels[t];
        }
      });
}

template <typename T>
BasicTensor<T> cross_entropy_from_logits(const BasicTensor<T>& logits,
                                         std::span<const int> labels) {
  require_rank(logits.shape(), 2, "cross_entropy_from_logits");
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  if (labels.size() != n) {
    throw ShapeError("cross_entropy_from_logits: " + std::to_string(labels.size()) +
                     " labels for batch of " + std::to_string(n));
  }
  if (n == 0) throw ShapeError("cross_entropy_from_logits: empty batch");
  auto xv = logits.values();
  std::vector<T> probs(n * k);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || std::size_t(labels[i]) >= k) {
      throw ShapeError("cross_entropy_from_logits: label " +
                       std::to_string(labels[i]) + " outside [0, " +
                       std::to_string(k) + ")");
    }
    const T* row = xv.data() + i * k;
    const double peak = *std::max_element(row, row + k);
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) z += std::exp(double(row[j]) - peak);
    const double log_z = peak + std::log(z);
    for (std::size_t j = 0; j < k; ++j) {
      probs[i * k + j] = T(std::exp(double(row[j]) - log_z));
    }
    total += log_z - double(row[labels[i]]);
  }
  std::vector<int> targets(labels.begin(), labels.end());
  return BasicTensor<T>::from_op(
      Shape{}, {T(total / double(n))}, {logits},
      [n, k, probs = std::move(probs), targets = std::move(targets)](Node<T>& node) {
        auto& g = node.parents[0]->grad_buffer();
        const T scale_factor = node.grad[0] / T(n);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < k; ++j) {
            const T indicator = std::size_t(targets[i]) == j ? T(1) : T(0);
            g[i * k + j] += scale_factor * (probs[i * k + j] - indicator);
          }
        }
      });
}

template <typename T>
std::vector<int> argmax_rows(const BasicTensor<T>& logits) {
  require_rank(logits.shape(), 2, "argmax_rows");
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  std::vector<int> out(n);
  auto xv = logits.values();
  for (std::size_t i = 0; i < n; ++i) {
    const T* row = xv.data() + i * k;
    out[i] = int(std::max_element(row, row + k) - row);
  }
  return out;
}

#define SPECNET_INSTANTIATE_OPS(T)                                                   \
  template struct BasicBatchNormState<T>;                                            \
  template BasicTensor<T> add(const BasicTensor<T>&, const BasicTensor<T>&);         \
  template BasicTensor<T> mul(const BasicTensor<T>&, const BasicTensor<T>&);         \
  template BasicTensor<T> scale(const BasicTensor<T>&, T);                           \
  template BasicTensor<T> relu(const BasicTensor<T>&);                               \
  template BasicTensor<T> sum(const BasicTensor<T>&);                                \
  template BasicTensor<T> mean(const BasicTensor<T>&);                               \
  template BasicTensor<T> reshape(const BasicTensor<T>&, Shape);                     \
  template BasicTensor<T> flatten(const BasicTensor<T>&);                            \
  template BasicTensor<T> conv2d(const BasicTensor<T>&, const BasicTensor<T>&,       \
                                 const BasicTensor<T>&, const ConvGeometry&);        \
  template BasicTensor<T> max_pool2d(const BasicTensor<T>&, const PoolGeometry&);    \
  template BasicTensor<T> avg_pool2d(const BasicTensor<T>&, const PoolGeometry&);    \
  template BasicTensor<T> global_pool(const BasicTensor<T>&, PoolKind);              \
  template BasicTensor<T> batch_norm2d(const BasicTensor<T>&,                        \
                                       BasicBatchNormState<T>&, Mode);               \
  template BasicTensor<T> affine(const BasicTensor<T>&, const BasicTensor<T>&,       \
                                 const BasicTensor<T>&);                             \
  template BasicTensor<T> channel_concat(std::span<const BasicTensor<T>>);           \
  template BasicTensor<T> cross_entropy_from_logits(const BasicTensor<T>&,           \
                                                    std::span<const int>);           \
  template std::vector<int> argmax_rows(const BasicTensor<T>&);

SPECNET_INSTANTIATE_OPS(float)
SPECNET_INSTANTIATE_OPS(double)

#undef SPECNET_INSTANTIATE_OPS

}  // namespace specnet
