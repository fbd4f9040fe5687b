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

#ifndef ECX_VISION_LANGUAGE_H_
#define ECX_VISION_LANGUAGE_H_

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "ecx/frame.h"
#include "ecx/tensor.h"

namespace ecx {

// Maps one frame to an [N x D] patch embedding, N = (H/p) * (W/p).
// Implementations must not keep per-call state unless they report
// concurrent_safe() == false, in which case frames are encoded serially.
class FrameEncoder {
 public:
  virtual ~FrameEncoder() = default;
  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  virtual bool concurrent_safe() const { return true; }
  virtual Tensor Encode(std::span<const std::uint8_t> frame,
                        const FrameSpec& spec) const = 0;
};

// Reference encoder with no learned weights. For every patch it takes all
// byte values in the patch (every channel) scaled to [0,1] and computes
// [mean, population variance, min, max], repeating that 4-vector cyclically
// to fill `dim` columns. Patches are ordered row-major over the patch grid.
class PatchStatsEncoder : public FrameEncoder {
 public:
  explicit PatchStatsEncoder(std::size_t dim);
  std::string name() const override { return "patch-stats"; }
  std::size_t dim() const override { return dim_; }
  Tensor Encode(std::span<const std::uint8_t> frame,
                const FrameSpec& spec) const override;

 private:
  std::size_t dim_;
};

// Encoders by registered name; throws InputError for unknown names.
std::unique_ptr<FrameEncoder> MakeFrameEncoder(std::string_view name,
                                               std::size_t dim);

// Frame-level embeddings X of shape [T, N, D].
class VideoEmbedding {
 public:
  explicit VideoEmbedding(Tensor values);

  std::size_t frames() const { return values_.shape()[0]; }
  std::size_t patches() const { return values_.shape()[1]; }
  std::size_t dim() const { return values_.shape()[2]; }
  const Tensor& values() const { return values_; }

 private:
  Tensor values_;
};

// R = [R_t ; R_s], shape [(T + N), D].
struct FusedRepresentation {
  Tensor values;
  std::size_t t_rows = 0;
  std::size_t s_rows = 0;
};

// Q_v, shape [(T + N), K].
struct VideoTokens {
  Tensor values;
  std::size_t rows() const { return values.shape()[0]; }
  std::size_t width() const { return values.shape()[1]; }
};

VideoEmbedding EncodeFrames(std::span<const Frame> frames,
                            const FrameSpec& spec,
                            const FrameEncoder& encoder);

// Row t is the mean over the N patch embeddings of frame t. [T x D]
Tensor TemporalPool(const VideoEmbedding& x);
// Row n is the mean over the T frames of patch n. [N x D]
Tensor SpatialPool(const VideoEmbedding& x);

FusedRepresentation Fuse(const Tensor& rt, const Tensor& rs);
std::pair<Tensor, Tensor> SplitFused(const FusedRepresentation& r);

// Q_v = R * g with g of shape [D x K].
VideoTokens ProjectTokens(const FusedRepresentation& r, const Tensor& g);

// Untrained projection: uniform(-0.1, 0.1) from `seed`.
Tensor RandomProjection(std::size_t dim, std::size_t width,
                        unsigned long long seed);

// Full chain: encode, pool both ways, fuse, project.
VideoTokens VideoToTokens(std::span<const Frame> frames, const FrameSpec& spec,
                          const FrameEncoder& encoder, const Tensor& g);

}  // namespace ecx

#endif  // ECX_VISION_LANGUAGE_H_
