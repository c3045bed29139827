#include "paac/preprocess.hpp"

#include <algorithm>
#include <string>

namespace paac {

namespace {

void check_raw(const Frame& f, const char* which) {
  if (f.width != kRawFrameWidth || f.height != kRawFrameHeight || f.channels != 3)
    throw ConfigError(std::string("preprocess: ") + which + " is " +
                      std::to_string(f.height) + "x" + std::to_string(f.width) +
                      "x" + std::to_string(f.channels) + ", expected 210x160x3");
}

}  // namespace

Frame downscale_area(const Frame& gray, int dst_w, int dst_h) {
  if (gray.channels != 1) throw ConfigError("downscale_area: single channel only");
  const int src_w = gray.width, src_h = gray.height;

  // Scale y coordinates by dst_h and x by dst_w: source row sy spans
  // [sy*dst_h, sy*dst_h + dst_h), destination row dy spans
  // [dy*src_h, (dy+1)*src_h). All edges are integers, so overlaps are exact.
  Frame out(dst_w, dst_h, 1);
  const std::uint64_t cell_area =
      static_cast<std::uint64_t>(src_h) * static_cast<std::uint64_t>(src_w);

  // Horizontal pass: per source row, accumulate into dst_w column bins
  // weighted by x-overlap (units of 1/dst_w source pixels).
  std::vector<std::uint64_t> row_bins(static_cast<std::size_t>(src_h) * dst_w, 0);
  for (int sy = 0; sy < src_h; ++sy) {
    std::uint64_t* bins = row_bins.data() + static_cast<std::size_t>(sy) * dst_w;
    for (int sx = 0; sx < src_w; ++sx) {
      const long long s0 = static_cast<long long>(sx) * dst_w;
      const long long s1 = s0 + dst_w;
      int dx = static_cast<int>(s0 / src_w);
      for (; dx < dst_w; ++dx) {
        const long long d0 = static_cast<long long>(dx) * src_w;
        const long long d1 = d0 + src_w;
        const long long overlap = std::min(s1, d1) - std::max(s0, d0);
        if (overlap <= 0) break;
        bins[dx] += static_cast<std::uint64_t>(overlap) * gray.at(sy, sx, 0);
      }
    }
  }

  // Vertical pass: combine row bins with y-overlap weights, then round.
  for (int dy = 0; dy < dst_h; ++dy) {
    const long long d0 = static_cast<long long>(dy) * src_h;
    const long long d1 = d0 + src_h;
    for (int dx = 0; dx < dst_w; ++dx) {
      std::uint64_t acc = 0;
      int sy = static_cast<int>(d0 / dst_h);
      for (; sy < src_h; ++sy) {
        const long long s0 = static_cast<long long>(sy) * dst_h;
        const long long s1 = s0 + dst_h;
        const long long overlap = std::min(s1, d1) - std::max(s0, d0);
        if (overlap <= 0) break;
        acc += static_cast<std::uint64_t>(overlap) *
               row_bins[static_cast<std::size_t>(sy) * dst_w + dx];
      }
      out.at(dy, dx, 0) =
          static_cast<std::uint8_t>((acc + cell_area / 2) / cell_area);
    }
  }
  return out;
}

Frame preprocess_frame_pair(const Frame& f1, const Frame& f2) {
  check_raw(f1, "first frame");
  check_raw(f2, "second frame");

  Frame gray(kRawFrameWidth, kRawFrameHeight, 1);
  for (int y = 0; y < kRawFrameHeight; ++y) {
    for (int x = 0; x < kRawFrameWidth; ++x) {
      const std::uint8_t r = std::max(f1.at(y, x, 0), f2.at(y, x, 0));
      const std::uint8_t g = std::max(f1.at(y, x, 1), f2.at(y, x, 1));
      const std::uint8_t b = std::max(f1.at(y, x, 2), f2.at(y, x, 2));
      gray.at(y, x, 0) = luma_byte(r, g, b);
    }
  }
  return downscale_area(gray, kProcessedSize, kProcessedSize);
}

void FrameStack::reset(const Frame& first) {
  frames_.clear();
  for (int i = 0; i < depth_; ++i) frames_.push_back(first);
}

void FrameStack::push(const Frame& f) {
  if (static_cast<int>(frames_.size()) != depth_)
    throw ContractError("FrameStack::push before reset");
  frames_.pop_front();
  frames_.push_back(f);
}

std::size_t FrameStack::flat_size() const {
  std::size_t n = 0;
  for (const Frame& f : frames_) n += f.pixels.size();
  return n;
}

void FrameStack::flatten_to(std::span<real> out) const {
  if (out.size() != flat_size())
    throw ConfigError("FrameStack::flatten_to: bad output size");
  std::size_t i = 0;
  for (const Frame& f : frames_)
    for (std::uint8_t p : f.pixels) out[i++] = real(p) / real(255);
}

}  // namespace paac
