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

#include "core/filters.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace djf {

namespace {

// Keys cubic kernel, a = -0.5.
double cubic_weight(double t) {
    t = std::abs(t);
    if (t <= 1.0) return (1.5 * t - 2.5) * t * t + 1.0;
    if (t < 2.0) return ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0;
    return 0.0;
}

struct CubicTaps {
    std::vector<std::size_t> idx;  // 4 clamped source indices per output coord
    std::vector<double> w;         // 4 weights per output coord
};

CubicTaps cubic_taps(std::size_t in_dim, std::size_t out_dim) {
    CubicTaps taps;
    taps.idx.resize(out_dim * 4);
    taps.w.resize(out_dim * 4);
    const double scale = static_cast<double>(out_dim) / static_cast<double>(in_dim);
    for (std::size_t d = 0; d < out_dim; ++d) {
        const double src = (static_cast<double>(d) + 0.5) / scale - 0.5;
        const double base = std::floor(src);
        const double t = src - base;
        for (int m = -1; m <= 2; ++m) {
            const std::ptrdiff_t raw = static_cast<std::ptrdiff_t>(base) + m;
            const std::size_t clamped = static_cast<std::size_t>(
                std::clamp<std::ptrdiff_t>(raw, 0, static_cast<std::ptrdiff_t>(in_dim) - 1));
            taps.idx[d * 4 + (m + 1)] = clamped;
            taps.w[d * 4 + (m + 1)] = cubic_weight(t - m);
        }
    }
    return taps;
}

std::size_t clamp_index(std::ptrdiff_t v, std::size_t n) {
    return static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(v, 0, static_cast<std::ptrdiff_t>(n) - 1));
}

// Replicate-border box mean on a double image.
std::vector<double> box_mean_image(const std::vector<double>& src, std::size_t h, std::size_t w,
                                   int radius) {
    const double inv = 1.0 / ((2.0 * radius + 1.0) * (2.0 * radius + 1.0));
    std::vector<double> row_sum(h * w);
    for (std::size_t y = 0; y < h; ++y) {
        const double* s = src.data() + y * w;
        double* d = row_sum.data() + y * w;
        double acc = 0.0;
        for (int dx = -radius; dx <= radius; ++dx) acc += s[clamp_index(dx, w)];
        d[0] = acc;
        for (std::size_t x = 1; x < w; ++x) {
            acc += s[clamp_index(static_cast<std::ptrdiff_t>(x) + radius, w)];
            acc -= s[clamp_index(static_cast<std::ptrdiff_t>(x) - 1 - radius, w)];
            d[x] = acc;
        }
    }
    std::vector<double> out(h * w);
    for (std::size_t x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int dy = -radius; dy <= radius; ++dy) acc += row_sum[clamp_index(dy, h) * w + x];
        out[x] = acc * inv;
        for (std::size_t y = 1; y < h; ++y) {
            acc += row_sum[clamp_index(static_cast<std::ptrdiff_t>(y) + radius, h) * w + x];
            acc -= row_sum[clamp_index(static_cast<std::ptrdiff_t>(y) - 1 - radius, h) * w + x];
            out[y * w + x] = acc * inv;
        }
    }
    return out;
}

}  // namespace

Tensor nearest_downsample(const Tensor& img, int scale) {
    if (scale < 1) throw ConfigError("nearest_downsample: scale must be >= 1");
    const std::size_t s = static_cast<std::size_t>(scale);
    if (img.height() % s != 0 || img.width() % s != 0) {
        throw ShapeError("nearest_downsample: dims " + img.shape_str() +
                         " not divisible by scale " + std::to_string(scale));
    }
    Tensor out(img.channels(), img.height() / s, img.width() / s);
    for (std::size_t c = 0; c < img.channels(); ++c) {
        for (std::size_t y = 0; y < out.height(); ++y) {
            for (std::size_t x = 0; x < out.width(); ++x) {
                out.at(c, y, x) = img.at(c, y * s, x * s);
            }
        }
    }
    return out;
}

Tensor bicubic_resize(const Tensor& img, std::size_t out_h, std::size_t out_w) {
    if (out_h < 1 || out_w < 1) throw ConfigError("bicubic_resize: output dims must be >= 1");
    if (img.empty()) throw ShapeError("bicubic_resize: empty input");
    const CubicTaps tx = cubic_taps(img.width(), out_w);
    const CubicTaps ty = cubic_taps(img.height(), out_h);
    Tensor out(img.channels(), out_h, out_w);
    std::vector<double> tmp(img.height() * out_w);
    for (std::size_t c = 0; c < img.channels(); ++c) {
        const float* src = img.channel(c);
        for (std::size_t y = 0; y < img.height(); ++y) {
            const float* srow = src + y * img.width();
            double* trow = tmp.data() + y * out_w;
            for (std::size_t x = 0; x < out_w; ++x) {
                const std::size_t* ix = &tx.idx[x * 4];
                const double* wx = &tx.w[x * 4];
                trow[x] = wx[0] * srow[ix[0]] + wx[1] * srow[ix[1]] + wx[2] * srow[ix[2]] +
                          wx[3] * srow[ix[3]];
            }
        }
        float* dst = out.channel(c);
        for (std::size_t y = 0; y < out_h; ++y) {
            const std::size_t* iy = &ty.idx[y * 4];
            const double* wy = &ty.w[y * 4];
            for (std::size_t x = 0; x < out_w; ++x) {
                const double v = wy[0] * tmp[iy[0] * out_w + x] + wy[1] * tmp[iy[1] * out_w + x] +
                                 wy[2] * tmp[iy[2] * out_w + x] + wy[3] * tmp[iy[3] * out_w + x];
                dst[y * out_w + x] = static_cast<float>(v);
            }
        }
    }
    return out;
}

Tensor joint_bilateral_upsample(const Tensor& low, const Tensor& guidance, const JBUParams& p) {
    if (p.sigma_spatial <= 0 || p.sigma_range <= 0 || p.window_radius <= 0) {
        throw ConfigError("joint_bilateral_upsample: parameters must be positive");
    }
    if (low.empty() || guidance.empty()) throw ShapeError("joint_bilateral_upsample: empty input");
    if (guidance.height() % low.height() != 0 || guidance.width() % low.width() != 0 ||
        guidance.height() / low.height() != guidance.width() / low.width()) {
        throw ShapeError("joint_bilateral_upsample: guidance " + guidance.shape_str() +
                         " is not an integer multiple of low " + low.shape_str());
    }
    const std::size_t s = guidance.height() / low.height();
    const int r = p.window_radius;
    const int win = 2 * r + 1;
    const double inv_2ss = 1.0 / (2.0 * p.sigma_spatial * p.sigma_spatial);
    const double inv_2sr = 1.0 / (2.0 * p.sigma_range * p.sigma_range);

    // Spatial weights depend only on the output pixel's phase inside its
    // scale x scale cell and the window offset.
    std::vector<double> spatial(s * s * static_cast<std::size_t>(win) * win);
    for (std::size_t py = 0; py < s; ++py) {
        for (std::size_t px = 0; px < s; ++px) {
            double* cell = spatial.data() + (py * s + px) * win * win;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const double oy = static_cast<double>(py) / static_cast<double>(s) - dy;
                    const double ox = static_cast<double>(px) / static_cast<double>(s) - dx;
                    cell[(dy + r) * win + (dx + r)] = std::exp(-(oy * oy + ox * ox) * inv_2ss);
                }
            }
        }
    }

    Tensor out(low.channels(), guidance.height(), guidance.width());
    std::vector<double> acc(low.channels());
    std::vector<double> gq(guidance.channels());
    for (std::size_t y = 0; y < guidance.height(); ++y) {
        const std::size_t cy = y / s;
        const std::size_t py = y % s;
        for (std::size_t x = 0; x < guidance.width(); ++x) {
            const std::size_t cx = x / s;
            const std::size_t px = x % s;
            const double* cell = spatial.data() + (py * s + px) * win * win;
            for (std::size_t ch = 0; ch < guidance.channels(); ++ch) gq[ch] = guidance.at(ch, y, x);
            std::fill(acc.begin(), acc.end(), 0.0);
            double norm = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                const std::ptrdiff_t ly_raw = static_cast<std::ptrdiff_t>(cy) + dy;
                const std::size_t ly = clamp_index(ly_raw, low.height());
                const std::size_t hy = clamp_index(ly_raw * static_cast<std::ptrdiff_t>(s),
                                                   guidance.height());
                for (int dx = -r; dx <= r; ++dx) {
                    const std::ptrdiff_t lx_raw = static_cast<std::ptrdiff_t>(cx) + dx;
                    const std::size_t lx = clamp_index(lx_raw, low.width());
                    const std::size_t hx = clamp_index(lx_raw * static_cast<std::ptrdiff_t>(s),
                                                       guidance.width());
                    double dist2 = 0.0;
                    for (std::size_t ch = 0; ch < guidance.channels(); ++ch) {
                        const double d = gq[ch] - guidance.at(ch, hy, hx);
                        dist2 += d * d;
                    }
                    const double wgt =
                        cell[(dy + r) * win + (dx + r)] * std::exp(-dist2 * inv_2sr);
                    norm += wgt;
                    for (std::size_t ch = 0; ch < low.channels(); ++ch) {
                        acc[ch] += wgt * low.at(ch, ly, lx);
                    }
                }
            }
            for (std::size_t ch = 0; ch < low.channels(); ++ch) {
                out.at(ch, y, x) = static_cast<float>(acc[ch] / norm);
            }
        }
    }
    return out;
}

Tensor guided_filter(const Tensor& target, const Tensor& guidance, const GFParams& p) {
    if (p.radius < 1) throw ConfigError("guided_filter: radius must be >= 1");
    if (!(p.epsilon > 0)) throw ConfigError("guided_filter: epsilon must be > 0");
    if (target.channels() != 1 || guidance.channels() != 1) {
        throw ShapeError("guided_filter: expects single-channel target and guidance");
    }
    require_same_shape(target, guidance, "guided_filter");

    const std::size_t h = target.height();
    const std::size_t w = target.width();
    const std::size_t n = h * w;
    std::vector<double> g(n), t(n), gg(n), gt(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = guidance.data()[i];
        t[i] = target.data()[i];
        gg[i] = g[i] * g[i];
        gt[i] = g[i] * t[i];
    }
    const std::vector<double> mg = box_mean_image(g, h, w, p.radius);
    const std::vector<double> mt = box_mean_image(t, h, w, p.radius);
    const std::vector<double> mgg = box_mean_image(gg, h, w, p.radius);
    const std::vector<double> mgt = box_mean_image(gt, h, w, p.radius);

    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double var = mgg[i] - mg[i] * mg[i];
        const double cov = mgt[i] - mg[i] * mt[i];
        a[i] = cov / (var + p.epsilon);
        b[i] = mt[i] - a[i] * mg[i];
    }
    const std::vector<double> ma = box_mean_image(a, h, w, p.radius);
    const std::vector<double> mb = box_mean_image(b, h, w, p.radius);

    Tensor out(1, h, w);
    for (std::size_t i = 0; i < n; ++i) {
        out.data()[i] = static_cast<float>(ma[i] * g[i] + mb[i]);
    }
    return out;
}

Tensor box_mean(const Tensor& img, int radius) {
    if (radius < 1) throw ConfigError("box_mean: radius must be >= 1");
    Tensor out(img.channels(), img.height(), img.width());
    std::vector<double> src(img.pixels());
    for (std::size_t c = 0; c < img.channels(); ++c) {
        const float* s = img.channel(c);
        for (std::size_t i = 0; i < src.size(); ++i) src[i] = s[i];
        const std::vector<double> m = box_mean_image(src, img.height(), img.width(), radius);
        float* d = out.channel(c);
        for (std::size_t i = 0; i < m.size(); ++i) d[i] = static_cast<float>(m[i]);
    }
    return out;
}

Tensor luminance(const Tensor& img) {
    if (img.channels() == 1) return img;
    if (img.channels() != 3) {
        throw ShapeError("luminance: expects 1 or 3 channels, got " + img.shape_str());
    }
    Tensor out(1, img.height(), img.width());
    const float* r = img.channel(0);
    const float* g = img.channel(1);
    const float* b = img.channel(2);
    float* d = out.data();
    for (std::size_t i = 0; i < img.pixels(); ++i) {
        d[i] = 0.299f * r[i] + 0.587f * g[i] + 0.114f * b[i];
    }
    return out;
}

}  // namespace djf
