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

#include "core/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

#include "core/error.hpp"

namespace djf {

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in, const std::string& path) {
    std::string tok;
    for (;;) {
        const int c = in.get();
        if (c == EOF) {
            if (!tok.empty()) return tok;
            throw FormatError(path + ": truncated header");
        }
        if (c == '#') {
            while (in.good() && in.get() != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
}

unsigned parse_uint(const std::string& tok, const std::string& path, const char* what) {
    unsigned v = 0;
    for (char c : tok) {
        if (c < '0' || c > '9') {
            throw FormatError(path + ": malformed " + what + " '" + tok + "'");
        }
        v = v * 10 + static_cast<unsigned>(c - '0');
        if (v > 1u << 30) throw FormatError(path + ": " + what + " out of range");
    }
    return v;
}

}  // namespace

Tensor read_image(const std::string& path, int* maxval_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");

    const std::string magic = next_token(in, path);
    std::size_t channels = 0;
    if (magic == "P5") {
        channels = 1;
    } else if (magic == "P6") {
        channels = 3;
    } else {
        throw FormatError(path + ": unsupported magic '" + magic + "' (want P5 or P6)");
    }
    const unsigned width = parse_uint(next_token(in, path), path, "width");
    const unsigned height = parse_uint(next_token(in, path), path, "height");
    const unsigned maxval = parse_uint(next_token(in, path), path, "maxval");
    if (width == 0 || height == 0) throw FormatError(path + ": zero image dimension");
    if (maxval == 0 || maxval > 65535) {
        throw FormatError(path + ": unsupported maxval " + std::to_string(maxval));
    }
    // The single whitespace byte after maxval was consumed by next_token.

    const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
    const std::size_t pixels = static_cast<std::size_t>(width) * height;
    const std::size_t payload = pixels * channels * bytes_per_sample;
    std::vector<std::uint8_t> raw(payload);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(payload));
    if (static_cast<std::size_t>(in.gcount()) != payload) {
        throw FormatError(path + ": truncated payload (expected " + std::to_string(payload) +
                          " bytes)");
    }

    Tensor img(channels, height, width);
    const float inv = 1.0f / static_cast<float>(maxval);
    for (std::size_t i = 0; i < pixels; ++i) {
        for (std::size_t c = 0; c < channels; ++c) {
            const std::size_t s = (i * channels + c) * bytes_per_sample;
            unsigned v = raw[s];
            if (bytes_per_sample == 2) v = (v << 8) | raw[s + 1];
            img.data()[c * pixels + i] = static_cast<float>(v) * inv;
        }
    }
    if (maxval_out) *maxval_out = static_cast<int>(maxval);
    return img;
}

void write_image(const std::string& path, const Tensor& img, int maxval) {
    if (img.channels() != 1 && img.channels() != 3) {
        throw ShapeError("write_image: " + img.shape_str() + " (want 1 or 3 channels)");
    }
    if (maxval < 1 || maxval > 65535) {
        throw ConfigError("write_image: maxval " + std::to_string(maxval) + " out of range");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << (img.channels() == 1 ? "P5" : "P6") << "\n"
        << img.width() << " " << img.height() << "\n"
        << maxval << "\n";

    const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
    const std::size_t pixels = img.pixels();
    std::vector<std::uint8_t> raw(pixels * img.channels() * bytes_per_sample);
    const float scale = static_cast<float>(maxval);
    for (std::size_t i = 0; i < pixels; ++i) {
        for (std::size_t c = 0; c < img.channels(); ++c) {
            const float v = std::clamp(img.data()[c * pixels + i], 0.0f, 1.0f);
            const unsigned q = static_cast<unsigned>(std::lround(v * scale));
            const std::size_t s = (i * img.channels() + c) * bytes_per_sample;
            if (bytes_per_sample == 2) {
                raw[s] = static_cast<std::uint8_t>(q >> 8);
                raw[s + 1] = static_cast<std::uint8_t>(q & 0xff);
            } else {
                raw[s] = static_cast<std::uint8_t>(q);
            }
        }
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("short write to '" + path + "'");
}

}  // namespace djf
