// Copyright 2026 The djf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DJF_CORE_CONV_HPP
#define DJF_CORE_CONV_HPP

#include <algorithm>
#include <cstddef>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/tensor.hpp"

namespace djf {

/// Border policy for conv2d. `same` zero-pads so output spatial dims equal
/// the input's; `valid` uses no padding (requires input >= kernel).
enum class PaddingMode { same, valid };

/// One convolution layer: square kernels, weights in (out, in, row, col)
/// row-major order, one bias per output channel.
template <class S>
struct ConvLayerParamsT {
    std::size_t out_channels = 0;
    std::size_t in_channels = 0;
    std::size_t kernel_size = 0;
    std::vector<S> weights;
    std::vector<S> biases;
};

using ConvLayerParams = ConvLayerParamsT<float>;
using ConvLayerParamsD = ConvLayerParamsT<double>;

template <class S>
void validate_layer(const ConvLayerParamsT<S>& layer) {
    if (layer.out_channels == 0 || layer.in_channels == 0 || layer.kernel_size == 0) {
        throw ConfigError("conv layer: channel counts and kernel size must be positive");
    }
    const std::size_t k = layer.kernel_size;
    if (layer.weights.size() != layer.out_channels * layer.in_channels * k * k) {
        throw ConfigError("conv layer: weights length " + std::to_string(layer.weights.size()) +
                          " does not match " + std::to_string(layer.out_channels) + "x" +
                          std::to_string(layer.in_channels) + "x" + std::to_string(k) + "x" +
                          std::to_string(k));
    }
    if (layer.biases.size() != layer.out_channels) {
        throw ConfigError("conv layer: biases length does not match out_channels");
    }
}

namespace detail {

// C[o][j] = bias[o] + sum_k A[o][k] * B[k][j] over columns [j0, j1).
// The k loop is strictly sequential per output element, so results are
// identical to a scalar reference regardless of blocking or thread count.
template <class S>
void gemm_bias(const S* A, std::size_t lda, const S* B, std::size_t ldb, const S* bias, S* C,
               std::size_t ldc, std::size_t out_c, std::size_t K, std::size_t j0,
               std::size_t j1) {
    constexpr std::size_t OB = 4;
    constexpr std::size_t PB = 16;
    for (std::size_t o = 0; o < out_c; o += OB) {
        const std::size_t ob = std::min(OB, out_c - o);
        for (std::size_t j = j0; j < j1; j += PB) {
            const std::size_t pb = std::min(PB, j1 - j);
            if (ob == OB && pb == PB) {
                S acc[OB][PB] = {};
                for (std::size_t kk = 0; kk < K; ++kk) {
                    const S* brow = B + kk * ldb + j;
                    const S a0 = A[(o + 0) * lda + kk];
                    const S a1 = A[(o + 1) * lda + kk];
                    const S a2 = A[(o + 2) * lda + kk];
                    const S a3 = A[(o + 3) * lda + kk];
                    for (std::size_t l = 0; l < PB; ++l) {
                        const S b = brow[l];
                        acc[0][l] += a0 * b;
                        acc[1][l] += a1 * b;
                        acc[2][l] += a2 * b;
                        acc[3][l] += a3 * b;
                    }
                }
                for (std::size_t i = 0; i < OB; ++i) {
                    const S bi = bias ? bias[o + i] : S(0);
                    S* crow = C + (o + i) * ldc + j;
                    for (std::size_t l = 0; l < PB; ++l) crow[l] = acc[i][l] + bi;
                }
            } else {
                for (std::size_t i = 0; i < ob; ++i) {
                    const S* arow = A + (o + i) * lda;
                    const S bi = bias ? bias[o + i] : S(0);
                    for (std::size_t l = 0; l < pb; ++l) {
                        S acc = S(0);
                        for (std::size_t kk = 0; kk < K; ++kk) acc += arow[kk] * B[kk * ldb + j + l];
                        C[(o + i) * ldc + j + l] = acc + bi;
                    }
                }
            }
        }
    }
}

// Fills the im2col panel for output rows [y0, y1): row (ic*k+kr)*k+kc of B
// holds input[ic][y+kr-pad_top][x+kc-pad_left] for every output pixel (y, x)
// in the band, zero outside the image. Column order matches the output's
// row-major pixel order; the K axis matches the weight layout, which pins the
// per-element accumulation order to (in, row, col).
template <class S>
void im2col_band(const TensorT<S>& input, std::size_t kernel, std::ptrdiff_t pad_top,
                 std::ptrdiff_t pad_left, std::size_t out_w, std::size_t y0, std::size_t y1,
                 S* B) {
    const std::size_t in_h = input.height();
    const std::size_t in_w = input.width();
    const std::size_t band_w = (y1 - y0) * out_w;
    const std::ptrdiff_t w = static_cast<std::ptrdiff_t>(in_w);
    std::size_t r = 0;
    for (std::size_t ic = 0; ic < input.channels(); ++ic) {
        const S* src_c = input.channel(ic);
        for (std::size_t kr = 0; kr < kernel; ++kr) {
            for (std::size_t kc = 0; kc < kernel; ++kc, ++r) {
                S* dst_row = B + r * band_w;
                const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(kc) - pad_left;
                const std::ptrdiff_t x_lo =
                    std::clamp<std::ptrdiff_t>(-dx, 0, static_cast<std::ptrdiff_t>(out_w));
                const std::ptrdiff_t x_hi =
                    std::clamp<std::ptrdiff_t>(w - dx, 0, static_cast<std::ptrdiff_t>(out_w));
                for (std::size_t y = y0; y < y1; ++y) {
                    S* dst = dst_row + (y - y0) * out_w;
                    const std::ptrdiff_t sy =
                        static_cast<std::ptrdiff_t>(y + kr) - pad_top;
                    if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(in_h) || x_lo >= x_hi) {
                        std::fill(dst, dst + out_w, S(0));
                        continue;
                    }
                    const S* src = src_c + static_cast<std::size_t>(sy) * in_w;
                    std::fill(dst, dst + x_lo, S(0));
                    std::memcpy(dst + x_lo, src + x_lo + dx,
                                static_cast<std::size_t>(x_hi - x_lo) * sizeof(S));
                    std::fill(dst + x_hi, dst + static_cast<std::ptrdiff_t>(out_w), S(0));
                }
            }
        }
    }
}

// Row band sized so one im2col panel stays cache/memory friendly.
inline std::size_t conv_band_rows(std::size_t K, std::size_t out_w, std::size_t out_h,
                                  std::size_t elem_size) {
    const std::size_t budget = std::size_t(512) << 10;  // bytes per panel
    std::size_t rows = budget / std::max<std::size_t>(1, K * out_w * elem_size);
    return std::clamp<std::size_t>(rows, 1, out_h);
}

// Cross-correlation with explicit top/left zero-pad offsets; the output size
// is given by the caller. Shared by the forward op and the input-gradient
// path of the backward op.
template <class S>
TensorT<S> conv2d_offset(const TensorT<S>& input, const ConvLayerParamsT<S>& layer,
                         std::ptrdiff_t pad_top, std::ptrdiff_t pad_left, std::size_t out_h,
                         std::size_t out_w, int threads) {
    const std::size_t k = layer.kernel_size;
    const std::size_t K = layer.in_channels * k * k;
    TensorT<S> out(layer.out_channels, out_h, out_w);
    const std::size_t out_px = out_h * out_w;

    if (k == 1) {
        // 1x1 kernels need no patch gathering: the input already is the
        // K x pixels matrix.
        const std::size_t band = conv_band_rows(K, out_w, out_h, sizeof(S));
        const std::size_t num_bands = (out_h + band - 1) / band;
        parallel_blocks(num_bands, threads, [&](std::size_t b) {
            const std::size_t y0 = b * band;
            const std::size_t y1 = std::min(out_h, y0 + band);
            gemm_bias(layer.weights.data(), K, input.data(), input.pixels(),
                      layer.biases.data(), out.data(), out_px, layer.out_channels, K,
                      y0 * out_w, y1 * out_w);
        });
        return out;
    }

    const std::size_t band = conv_band_rows(K, out_w, out_h, sizeof(S));
    const std::size_t num_bands = (out_h + band - 1) / band;
    // One uninitialized scratch panel per worker, reused across its bands;
    // im2col overwrites every element, padding included.
    const int workers = parallel_workers(num_bands, threads);
    std::vector<std::unique_ptr<S[]>> panels(static_cast<std::size_t>(workers));
    parallel_blocks_ws(num_bands, threads, [&](std::size_t b, int worker) {
        auto& panel = panels[static_cast<std::size_t>(worker)];
        if (!panel) panel.reset(new S[K * band * out_w]);
        const std::size_t y0 = b * band;
        const std::size_t y1 = std::min(out_h, y0 + band);
        const std::size_t band_w = (y1 - y0) * out_w;
        im2col_band(input, k, pad_top, pad_left, out_w, y0, y1, panel.get());
        // Write straight into the output at the band's pixel offset.
        gemm_bias(layer.weights.data(), K, panel.get(), band_w, layer.biases.data(),
                  out.data() + y0 * out_w, out_px, layer.out_channels, K, 0, band_w);
    });
    return out;
}

template <class S>
void forward_dims(const TensorT<S>& input, const ConvLayerParamsT<S>& layer, PaddingMode pad,
                  std::size_t& out_h, std::size_t& out_w, std::ptrdiff_t& pad_top,
                  std::ptrdiff_t& pad_left) {
    const std::size_t k = layer.kernel_size;
    if (pad == PaddingMode::same) {
        out_h = input.height();
        out_w = input.width();
        pad_top = static_cast<std::ptrdiff_t>((k - 1) / 2);
        pad_left = pad_top;
    } else {
        if (input.height() < k || input.width() < k) {
            throw ShapeError("conv2d: input " + input.shape_str() +
                             " smaller than kernel size " + std::to_string(k) +
                             " in valid mode");
        }
        out_h = input.height() - k + 1;
        out_w = input.width() - k + 1;
        pad_top = 0;
        pad_left = 0;
    }
}

}  // namespace detail

/// Cross-correlation of `input` with the layer's kernels plus bias.
/// Accumulation per output element runs in (in_channel, row, col) order and
/// is independent of the worker count.
template <class S>
TensorT<S> conv2d_forward(const TensorT<S>& input, const ConvLayerParamsT<S>& layer,
                          PaddingMode pad, int threads = 1) {
    validate_layer(layer);
    if (input.channels() != layer.in_channels) {
        throw ShapeError("conv2d_forward: input has " + std::to_string(input.channels()) +
                         " channels, layer expects " + std::to_string(layer.in_channels));
    }
    std::size_t out_h = 0, out_w = 0;
    std::ptrdiff_t pt = 0, pl = 0;
    detail::forward_dims(input, layer, pad, out_h, out_w, pt, pl);
    return detail::conv2d_offset(input, layer, pt, pl, out_h, out_w, threads);
}

/// Gradients of conv2d_forward with respect to input, weights, and biases.
template <class S>
struct ConvGradsT {
    TensorT<S> input;
    std::vector<S> weights;
    std::vector<S> biases;
};

template <class S>
ConvGradsT<S> conv2d_backward(const TensorT<S>& input, const ConvLayerParamsT<S>& layer,
                              PaddingMode pad, const TensorT<S>& grad_output, int threads = 1) {
    validate_layer(layer);
    if (input.channels() != layer.in_channels) {
        throw ShapeError("conv2d_backward: input has " + std::to_string(input.channels()) +
                         " channels, layer expects " + std::to_string(layer.in_channels));
    }
    std::size_t out_h = 0, out_w = 0;
    std::ptrdiff_t pt = 0, pl = 0;
    detail::forward_dims(input, layer, pad, out_h, out_w, pt, pl);
    if (grad_output.channels() != layer.out_channels || grad_output.height() != out_h ||
        grad_output.width() != out_w) {
        throw ShapeError("conv2d_backward: grad_output " + grad_output.shape_str() +
                         " does not match forward output " + std::to_string(layer.out_channels) +
                         "x" + std::to_string(out_h) + "x" + std::to_string(out_w));
    }

    const std::size_t k = layer.kernel_size;
    const std::size_t K = layer.in_channels * k * k;
    ConvGradsT<S> grads;
    grads.weights.assign(layer.weights.size(), S(0));
    grads.biases.assign(layer.out_channels, S(0));

    // Bias gradient: plain spatial sum per output channel.
    parallel_blocks(layer.out_channels, threads, [&](std::size_t o) {
        const S* g = grad_output.channel(o);
        S acc = S(0);
        for (std::size_t j = 0; j < grad_output.pixels(); ++j) acc += g[j];
        grads.biases[o] = acc;
    });

    // Weight gradient: grad_w[o][kk] = sum_j grad_out[o][j] * patch[kk][j].
    // Bands run sequentially and columns ascend within a band, so each
    // element accumulates in a fixed order for any thread count.
    if (k == 1) {
        parallel_blocks(layer.out_channels, threads, [&](std::size_t o) {
            const S* g = grad_output.channel(o);
            for (std::size_t kk = 0; kk < K; ++kk) {
                const S* b = input.channel(kk);
                S acc = S(0);
                for (std::size_t j = 0; j < grad_output.pixels(); ++j) acc += g[j] * b[j];
                grads.weights[o * K + kk] = acc;
            }
        });
    } else {
        const std::size_t band = detail::conv_band_rows(K, out_w, out_h, sizeof(S));
        std::vector<S> panel;
        for (std::size_t y0 = 0; y0 < out_h; y0 += band) {
            const std::size_t y1 = std::min(out_h, y0 + band);
            const std::size_t band_w = (y1 - y0) * out_w;
            panel.resize(K * band_w);
            detail::im2col_band(input, k, pt, pl, out_w, y0, y1, panel.data());
            parallel_blocks(layer.out_channels, threads, [&](std::size_t o) {
                const S* g = grad_output.channel(o) + y0 * out_w;
                S* gw = grads.weights.data() + o * K;
                for (std::size_t kk = 0; kk < K; ++kk) {
                    const S* b = panel.data() + kk * band_w;
                    S acc = S(0);
                    for (std::size_t j = 0; j < band_w; ++j) acc += g[j] * b[j];
                    gw[kk] += acc;
                }
            });
        }
    }

    // Input gradient: correlation of grad_output with the spatially flipped,
    // in/out-transposed kernels at the complementary padding.
    ConvLayerParamsT<S> flipped;
    flipped.out_channels = layer.in_channels;
    flipped.in_channels = layer.out_channels;
    flipped.kernel_size = k;
    flipped.weights.resize(layer.weights.size());
    flipped.biases.assign(layer.in_channels, S(0));
    for (std::size_t o = 0; o < layer.out_channels; ++o) {
        for (std::size_t ic = 0; ic < layer.in_channels; ++ic) {
            for (std::size_t kr = 0; kr < k; ++kr) {
                for (std::size_t kc = 0; kc < k; ++kc) {
                    flipped.weights[((ic * layer.out_channels + o) * k + (k - 1 - kr)) * k +
                                    (k - 1 - kc)] =
                        layer.weights[((o * layer.in_channels + ic) * k + kr) * k + kc];
                }
            }
        }
    }
    const std::ptrdiff_t flip_pt = static_cast<std::ptrdiff_t>(k) - 1 - pt;
    const std::ptrdiff_t flip_pl = static_cast<std::ptrdiff_t>(k) - 1 - pl;
    grads.input = detail::conv2d_offset(grad_output, flipped, flip_pt, flip_pl, input.height(),
                                        input.width(), threads);
    return grads;
}

/// Elementwise max(x, 0).
template <class S>
TensorT<S> relu_forward(const TensorT<S>& input) {
    TensorT<S> out(input.channels(), input.height(), input.width());
    const S* src = input.data();
    S* dst = out.data();
    for (std::size_t i = 0; i < input.size(); ++i) dst[i] = src[i] > S(0) ? src[i] : S(0);
    return out;
}

/// Passes grad_output where the forward input was strictly positive; the
/// subgradient at exactly zero is zero.
template <class S>
TensorT<S> relu_backward(const TensorT<S>& input, const TensorT<S>& grad_output) {
    require_same_shape(input, grad_output, "relu_backward");
    TensorT<S> out(input.channels(), input.height(), input.width());
    const S* x = input.data();
    const S* g = grad_output.data();
    S* dst = out.data();
    for (std::size_t i = 0; i < input.size(); ++i) dst[i] = x[i] > S(0) ? g[i] : S(0);
    return out;
}

}  // namespace djf

#endif  // DJF_CORE_CONV_HPP
