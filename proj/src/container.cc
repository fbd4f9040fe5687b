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

#include "ecx/container.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

#include "ecx/errors.h"

namespace ecx {

const char* FormatErrorCodeName(FormatErrorCode code) {
  switch (code) {
    case FormatErrorCode::kBadMagic:
      return "bad_magic";
    case FormatErrorCode::kTruncated:
      return "truncated";
    case FormatErrorCode::kBadRank:
      return "bad_rank";
    case FormatErrorCode::kLengthMismatch:
      return "length_mismatch";
    case FormatErrorCode::kIo:
      return "io";
  }
  return "unknown";
}

namespace {

template <typename T>
void PutLe(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * b)));
  }
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T GetLe(const char* what) {
    if (bytes_.size() - pos_ < sizeof(T)) {
      throw FormatError(FormatErrorCode::kTruncated, pos_,
                        std::string("truncated ") + what + " at byte " +
                            std::to_string(pos_));
    }
    T value = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
      value |= static_cast<T>(bytes_[pos_ + b]) << (8 * b);
    }
    pos_ += sizeof(T);
    return value;
  }

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> EncodeTensor(const Tensor& t) {
  if (t.rank() == 0 || t.rank() > kMaxContainerRank) {
    throw ContractError("container rank must be 1..8, got " +
                        std::to_string(t.rank()));
  }
  std::vector<std::uint8_t> out(std::begin(kContainerMagic),
                                std::end(kContainerMagic));
  out.reserve(8 + 8 * t.rank() + 4 * t.size());
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
  for (std::size_t d : t.shape()) PutLe<std::uint64_t>(out, d);
  for (double v : t.data()) {
    PutLe<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

Tensor DecodeTensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) {
    throw FormatError(FormatErrorCode::kTruncated, 0, "truncated magic");
  }
  if (!std::equal(std::begin(kContainerMagic), std::end(kContainerMagic),
                  bytes.begin())) {
    throw FormatError(FormatErrorCode::kBadMagic, 0,
                      "bad magic, expected FTC1");
  }
  Reader in(bytes.subspan(4));
  const auto rank = in.GetLe<std::uint32_t>("rank");
  if (rank == 0 || rank > kMaxContainerRank) {
    throw FormatError(FormatErrorCode::kBadRank, 4,
                      "unsupported rank " + std::to_string(rank));
  }
  Shape shape;
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const auto d = in.GetLe<std::uint64_t>("dims");
    if (d != 0 && count > std::numeric_limits<std::uint64_t>::max() / 4 / d) {
      throw FormatError(FormatErrorCode::kLengthMismatch, 4 + in.pos(),
                        "dims overflow the payload size");
    }
    count *= d;
    shape.push_back(static_cast<std::size_t>(d));
  }
  const std::size_t payload_start = 4 + in.pos();
  if (in.remaining() < count * 4) {
    throw FormatError(FormatErrorCode::kTruncated, bytes.size(),
                      "truncated payload: expected " + std::to_string(count * 4) +
                          " bytes after offset " + std::to_string(payload_start) +
                          ", found " + std::to_string(in.remaining()));
  }
  if (in.remaining() > count * 4) {
    throw FormatError(FormatErrorCode::kLengthMismatch, payload_start + count * 4,
                      std::to_string(in.remaining() - count * 4) +
                          " trailing bytes after payload");
  }
  std::vector<double> data(static_cast<std::size_t>(count));
  for (double& v : data) {
    v = std::bit_cast<float>(in.GetLe<std::uint32_t>("payload"));
  }
  return Tensor(std::move(shape), std::move(data));
}

void SaveTensor(const std::string& path, const Tensor& t) {
  const std::vector<std::uint8_t> bytes = EncodeTensor(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError(FormatErrorCode::kIo, 0, "cannot write " + path);
}

Tensor LoadTensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatErrorCode::kIo, 0, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return DecodeTensor(bytes);
  } catch (const FormatError& e) {
    throw FormatError(e.code(), e.offset(), path + ": " + e.what());
  }
}

Tensor VideoToTensor(const Video& video) {
  const FrameSpec& s = video.spec;
  std::vector<double> data;
  data.reserve(video.frames.size() * s.frame_bytes());
  for (const Frame& f : video.frames) {
    if (f.size() != s.frame_bytes()) throw InputError("frame size mismatch");
    data.insert(data.end(), f.begin(), f.end());
  }
  return Tensor({video.frames.size(), s.height, s.width, s.channels},
                std::move(data));
}

Video VideoFromTensor(const Tensor& t, std::size_t patch) {
  if (t.rank() != 4) {
    throw InputError("video container must be [T,H,W,C], got " +
                     ShapeString(t.shape()));
  }
  Video video;
  video.spec = {t.shape()[1], t.shape()[2], t.shape()[3], patch};
  const std::size_t per_frame = video.spec.frame_bytes();
  for (std::size_t f = 0; f < t.shape()[0]; ++f) {
    Frame frame(per_frame);
    for (std::size_t i = 0; i < per_frame; ++i) {
      const double v = t[f * per_frame + i];
      frame[i] = static_cast<std::uint8_t>(
          std::clamp(std::isfinite(v) ? std::round(v) : 0.0, 0.0, 255.0));
    }
    video.frames.push_back(std::move(frame));
  }
  return video;
}

Video LoadVideo(const std::string& path, std::size_t patch) {
  return VideoFromTensor(LoadTensor(path), patch);
}

}  // namespace ecx
