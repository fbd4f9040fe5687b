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

#ifndef ECX_FRAME_H_
#define ECX_FRAME_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ecx {

// Geometry of raw video frames. Pixels are stored row-major as
// height x width x channels bytes.
struct FrameSpec {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 3;
  std::size_t patch = 16;

  std::size_t frame_bytes() const { return height * width * channels; }
  std::size_t grid_h() const { return height / patch; }
  std::size_t grid_w() const { return width / patch; }
  std::size_t patches() const { return grid_h() * grid_w(); }

  // Throws InputError unless dims are positive, channels is 1 or 3 and the
  // patch size divides both height and width.
  void Validate() const;

  friend bool operator==(const FrameSpec&, const FrameSpec&) = default;
};

using Frame = std::vector<std::uint8_t>;

struct Video {
  FrameSpec spec;
  std::vector<Frame> frames;
};

}  // namespace ecx

#endif  // ECX_FRAME_H_
