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

#ifndef DJF_CORE_TENSOR_HPP
#define DJF_CORE_TENSOR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace djf {

/// Dense rank-3 array of samples in channel-major, row-major order.
/// This single layout is shared by every operator, oracle, and file format
/// in the library.
template <class S>
class TensorT {
public:
    using value_type = S;

    TensorT() = default;

    TensorT(std::size_t channels, std::size_t height, std::size_t width, S fill = S(0))
        : channels_(channels), height_(height), width_(width),
          data_(channels * height * width, fill) {}

    TensorT(std::size_t channels, std::size_t height, std::size_t width, std::vector<S> data)
        : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
        if (data_.size() != channels_ * height_ * width_) {
            throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                             " does not match " + std::to_string(channels_) + "x" +
                             std::to_string(height_) + "x" + std::to_string(width_));
        }
    }

    std::size_t channels() const { return channels_; }
    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t size() const { return data_.size(); }
    std::size_t pixels() const { return height_ * width_; }
    bool empty() const { return data_.empty(); }

    S* data() { return data_.data(); }
    const S* data() const { return data_.data(); }
    std::vector<S>& vec() { return data_; }
    const std::vector<S>& vec() const { return data_; }

    S& at(std::size_t c, std::size_t y, std::size_t x) {
        return data_[(c * height_ + y) * width_ + x];
    }
    S at(std::size_t c, std::size_t y, std::size_t x) const {
        return data_[(c * height_ + y) * width_ + x];
    }

    S* channel(std::size_t c) { return data_.data() + c * height_ * width_; }
    const S* channel(std::size_t c) const { return data_.data() + c * height_ * width_; }

    bool same_shape(const TensorT& o) const {
        return channels_ == o.channels_ && height_ == o.height_ && width_ == o.width_;
    }

    std::string shape_str() const {
        return std::to_string(channels_) + "x" + std::to_string(height_) + "x" +
               std::to_string(width_);
    }

    bool all_finite() const {
        for (S v : data_) {
            if (!std::isfinite(static_cast<double>(v))) return false;
        }
        return true;
    }

private:
    std::size_t channels_ = 0;
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<S> data_;
};

using Tensor = TensorT<float>;
using TensorD = TensorT<double>;

template <class S>
void require_same_shape(const TensorT<S>& a, const TensorT<S>& b, const char* where) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(where) + ": shape mismatch " + a.shape_str() + " vs " +
                         b.shape_str());
    }
}

/// Channel-wise concatenation, first tensor's channels leading.
template <class S>
TensorT<S> concat_channels(const TensorT<S>& a, const TensorT<S>& b) {
    if (a.height() != b.height() || a.width() != b.width()) {
        throw ShapeError("concat_channels: spatial mismatch " + a.shape_str() + " vs " +
                         b.shape_str());
    }
    TensorT<S> out(a.channels() + b.channels(), a.height(), a.width());
    std::copy(a.data(), a.data() + a.size(), out.data());
    std::copy(b.data(), b.data() + b.size(), out.data() + a.size());
    return out;
}

/// Single-channel view copy of one channel.
template <class S>
TensorT<S> extract_channel(const TensorT<S>& t, std::size_t c) {
    if (c >= t.channels()) {
        throw ShapeError("extract_channel: channel " + std::to_string(c) + " out of range for " +
                         t.shape_str());
    }
    TensorT<S> out(1, t.height(), t.width());
    std::copy(t.channel(c), t.channel(c) + t.pixels(), out.data());
    return out;
}

}  // namespace djf

#endif  // DJF_CORE_TENSOR_HPP
