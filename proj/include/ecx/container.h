// Copyright 2026 The ecx Authors.
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

#ifndef ECX_CONTAINER_H_
#define ECX_CONTAINER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ecx/frame.h"
#include "ecx/tensor.h"

namespace ecx {

// Tensor container layout (all little-endian):
//   "FTC1" | rank: u32 | dims: rank x u64 | payload: prod(dims) x f32
// Values are narrowed to float32 on save and widened on load.
inline constexpr char kContainerMagic[4] = {'F', 'T', 'C', '1'};
inline constexpr std::uint32_t kMaxContainerRank = 8;

std::vector<std::uint8_t> EncodeTensor(const Tensor& t);
// Throws FormatError with a distinct code for bad magic, truncation,
// unsupported rank and trailing bytes.
Tensor DecodeTensor(std::span<const std::uint8_t> bytes);

void SaveTensor(const std::string& path, const Tensor& t);
Tensor LoadTensor(const std::string& path);

// Videos are stored as [T, H, W, C] tensors of pixel values in [0, 255].
Tensor VideoToTensor(const Video& video);
// Values are rounded and clamped to bytes. Throws InputError unless the
// tensor is rank 4.
Video VideoFromTensor(const Tensor& t, std::size_t patch);
Video LoadVideo(const std::string& path, std::size_t patch);

}  // namespace ecx

#endif  // ECX_CONTAINER_H_
