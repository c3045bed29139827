#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "paac/tensor.hpp"

namespace paac {

/// Raw image, row-major height x width x channels, bytes in 0..255.
struct Frame {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;

  Frame() = default;
  Frame(int w, int h, int c, std::uint8_t fill = 0)
      : width(w), height(h), channels(c),
        pixels(static_cast<std::size_t>(w) * h * c, fill) {}

  std::uint8_t& at(int y, int x, int c) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int y, int x, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  bool operator==(const Frame&) const = default;
};

inline constexpr int kRawFrameWidth = 160;
inline constexpr int kRawFrameHeight = 210;
inline constexpr int kProcessedSize = 84;
inline constexpr int kFrameStackDepth = 4;

// The pipeline is specified in exact integer arithmetic so any two correct
// implementations agree byte for byte:
//   luma      = (299*R + 587*G + 114*B + 500) / 1000        (Rec.601, half-up)
//   downscale = box filter; with coordinates scaled by the destination size
//     both grids have integer cell edges, every source/destination overlap
//     is an exact integer area, and each output byte is the weighted sum
//     rounded half-up.

/// Rec.601 luma of one pixel, rounded half-up.
inline std::uint8_t luma_byte(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>(
      (299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

/// Per-pixel max of the two latest raw frames, grayscale via Rec.601 luma,
/// then area-average downscale from 210x160x3 to 84x84x1.
Frame preprocess_frame_pair(const Frame& f1, const Frame& f2);

/// Area-average downscale of a single-channel frame to dst_w x dst_h using
/// the exact integer box filter described above.
Frame downscale_area(const Frame& gray, int dst_w, int dst_h);

/// History of the last `depth` processed frames, oldest first. A reset
/// fills the stack with copies of the first frame.
class FrameStack {
 public:
  explicit FrameStack(int depth = kFrameStackDepth) : depth_(depth) {}

  void reset(const Frame& first);
  void push(const Frame& f);

  int depth() const { return depth_; }
  const std::deque<Frame>& frames() const { return frames_; }

  /// Pixels of all frames oldest-to-newest, scaled to [0, 1].
  void flatten_to(std::span<real> out) const;
  std::size_t flat_size() const;

 private:
  int depth_;
  std::deque<Frame> frames_;
};

}  // namespace paac
