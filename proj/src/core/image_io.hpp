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

#ifndef DJF_CORE_IMAGE_IO_HPP
#define DJF_CORE_IMAGE_IO_HPP

#include <string>

#include "core/tensor.hpp"

namespace djf {

/// Reads a binary PGM (P5, one channel) or PPM (P6, three channels) image.
/// Samples are normalized to [0,1] by the header's maxval; 16-bit samples use
/// the Netpbm most-significant-byte-first convention. Header comments ('#')
/// are tolerated. `maxval_out`, when non-null, receives the file's maxval.
Tensor read_image(const std::string& path, int* maxval_out = nullptr);

/// Writes a 1-channel tensor as P5 or a 3-channel tensor as P6, quantizing
/// round(clamp(v, 0, 1) * maxval); maxval selects 8- vs 16-bit storage.
void write_image(const std::string& path, const Tensor& img, int maxval = 255);

}  // namespace djf

#endif  // DJF_CORE_IMAGE_IO_HPP
