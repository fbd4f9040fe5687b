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

#include "ecx/vision_language.h"

#include <algorithm>
#include <future>
#include <thread>

#include "ecx/errors.h"

namespace ecx {

void FrameSpec::Validate() const {
  if (height == 0 || width == 0 || patch == 0) {
    throw InputError("frame spec dimensions must be positive");
  }
  if (channels != 1 && channels != 3) {
    throw InputError("frame channels must be 1 or 3, got " +
                     std::to_string(channels));
  }
  if (height % patch != 0 || width % patch != 0) {
    throw InputError("patch size " + std::to_string(patch) +
                     " does not divide frame " + std::to_string(height) + "x" +
                     std::to_string(width));
  }
}

PatchStatsEncoder::PatchStatsEncoder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw ContractError("encoder width must be positive");
}

Tensor PatchStatsEncoder::Encode(std::span<const std::uint8_t> frame,
                                 const FrameSpec& spec) const {
  const std::size_t gh = spec.grid_h(), gw = spec.grid_w();
  const std::size_t p = spec.patch, c = spec.channels;
  const double count = static_cast<double>(p * p * c);
  std::vector<double> out;
  out.reserve(gh * gw * dim_);
  for (std::size_t py = 0; py < gh; ++py) {
    for (std::size_t px = 0; px < gw; ++px) {
      double sum = 0, lo = 1, hi = 0;
      for (std::size_t y = py * p; y < (py + 1) * p; ++y) {
        const std::uint8_t* row = frame.data() + (y * spec.width + px * p) * c;
        for (std::size_t i = 0; i < p * c; ++i) {
          const double v = row[i] / 255.0;
          sum += v;
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      const double mean = sum / count;
      double sq = 0;
      for (std::size_t y = py * p; y < (py + 1) * p; ++y) {
        const std::uint8_t* row = frame.data() + (y * spec.width + px * p) * c;
        for (std::size_t i = 0; i < p * c; ++i) {
          const double d = row[i] / 255.0 - mean;
          sq += d * d;
        }
      }
      const double stats[4] = {mean, sq / count, lo, hi};
      for (std::size_t d = 0; d < dim_; ++d) out.push_back(stats[d % 4]);
    }
  }
  return Tensor({gh * gw, dim_}, std::move(out));
}

std::unique_ptr<FrameEncoder> MakeFrameEncoder(std::string_view name,
                                               std::size_t dim) {
  if (name == "patch-stats") return std::make_unique<PatchStatsEncoder>(dim);
  throw InputError("unknown frame encoder '" + std::string(name) + "'");
}

VideoEmbedding::VideoEmbedding(Tensor values) : values_(std::move(values)) {
  if (values_.rank() != 3 || values_.size() == 0) {
    throw ContractError("video embedding must be a non-empty [T,N,D] tensor, got " +
                        ShapeString(values_.shape()));
  }
}

VideoEmbedding EncodeFrames(std::span<const Frame> frames,
                            const FrameSpec& spec,
                            const FrameEncoder& encoder) {
  spec.Validate();
  if (frames.empty()) throw InputError("video has no frames");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].size() != spec.frame_bytes()) {
      throw InputError("frame " + std::to_string(i) + " has " +
                       std::to_string(frames[i].size()) + " bytes, expected " +
                       std::to_string(spec.frame_bytes()));
    }
  }
  const std::size_t n = spec.patches(), d = encoder.dim();
  std::vector<Tensor> encoded(frames.size());
  auto encode_one = [&](std::size_t i) {
    Tensor e = encoder.Encode(frames[i], spec);
    if (e.shape() != Shape{n, d}) {
      throw BackendError("encoder '" + encoder.name() + "' returned shape " +
                         ShapeString(e.shape()) + ", expected " +
                         ShapeString({n, d}));
    }
    encoded[i] = std::move(e);
  };

  const std::size_t workers = std::min<std::size_t>(
      frames.size(), std::max(1u, std::thread::hardware_concurrency()));
  if (!encoder.concurrent_safe() || workers <= 1) {
    for (std::size_t i = 0; i < frames.size(); ++i) encode_one(i);
  } else {
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < frames.size(); i += workers) encode_one(i);
      }));
    }
    for (auto& job : jobs) job.get();
  }

  std::vector<double> data;
  data.reserve(frames.size() * n * d);
  for (const Tensor& e : encoded) {
    data.insert(data.end(), e.data().begin(), e.data().end());
  }
  return VideoEmbedding(Tensor({frames.size(), n, d}, std::move(data)));
}

Tensor TemporalPool(const VideoEmbedding& x) {
  return MeanAxis(x.values(), 1);
}

Tensor SpatialPool(const VideoEmbedding& x) {
  return MeanAxis(x.values(), 0);
}

FusedRepresentation Fuse(const Tensor& rt, const Tensor& rs) {
  if (rt.rank() != 2 || rs.rank() != 2) {
    throw ContractError("fuse expects rank-2 inputs");
  }
  if (rt.shape()[0] == 0 || rs.shape()[0] == 0) {
    throw ContractError("fuse requires at least one temporal and one spatial row");
  }
  if (rt.shape()[1] != rs.shape()[1]) {
    throw ContractError("fuse width mismatch: " + ShapeString(rt.shape()) +
                        " vs " + ShapeString(rs.shape()));
  }
  return {ConcatAxis0(rt, rs), rt.shape()[0], rs.shape()[0]};
}

std::pair<Tensor, Tensor> SplitFused(const FusedRepresentation& r) {
  return SplitAxis0(r.values, r.t_rows);
}

VideoTokens ProjectTokens(const FusedRepresentation& r, const Tensor& g) {
  return {MatMul(r.values, g)};
}

Tensor RandomProjection(std::size_t dim, std::size_t width,
                        unsigned long long seed) {
  return SeededUniform({dim, width}, -0.1, 0.1, seed);
}

VideoTokens VideoToTokens(std::span<const Frame> frames, const FrameSpec& spec,
                          const FrameEncoder& encoder, const Tensor& g) {
  VideoEmbedding x = EncodeFrames(frames, spec, encoder);
  return ProjectTokens(Fuse(TemporalPool(x), SpatialPool(x)), g);
}

}  // namespace ecx
