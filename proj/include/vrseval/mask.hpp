// Copyright 2026 The vrseval Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

// Mask and box primitives.
//
// Masks are run-length encoded in column-major pixel order with a leading
// background run (the COCO convention), so counts produced by pycocotools
// can be read verbatim. Boxes are half-open: [x1, x2) x [y1, y2).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vrseval/error.hpp"
#include "vrseval/parallel.hpp"

namespace vrs {

struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }

  bool valid() const {
    return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
           std::isfinite(y2) && x1 <= x2 && y1 <= y2;
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

inline BBox make_box(double x1, double y1, double x2, double y2) {
  BBox box{x1, y1, x2, y2};
  if (!box.valid()) {
    fail(ErrorKind::kInvalidArgument,
         "invalid box [" + std::to_string(x1) + ", " + std::to_string(y1) + ", " +
             std::to_string(x2) + ", " + std::to_string(y2) + "]");
  }
  return box;
}

/// Dense binary mask stored column-major: pixel (x, y) lives at x * height + y.
class Bitmap {
 public:
  Bitmap() = default;
  Bitmap(int height, int width) : height_(height), width_(width) {
    if (height <= 0 || width <= 0) {
      fail(ErrorKind::kDimension, "bitmap dimensions must be positive, got " +
                                      std::to_string(height) + "x" + std::to_string(width));
    }
    data_.assign(static_cast<std::size_t>(height) * width, 0);
  }

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }

  std::uint8_t at(int x, int y) const { return data_[index(x, y)]; }
  void set(int x, int y, bool value = true) { data_[index(x, y)] = value ? 1 : 0; }

  std::span<const std::uint8_t> pixels() const { return data_; }
  std::span<std::uint8_t> pixels() { return data_; }

  friend bool operator==(const Bitmap&, const Bitmap&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(x) * height_ + static_cast<std::size_t>(y);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Run-length encoded mask. Runs alternate background/foreground, starting
/// with a (possibly empty) background run.
class RleMask {
 public:
  using Count = std::uint32_t;

  RleMask() = default;

  /// Validates and adopts externally supplied counts.
  static RleMask from_counts(int height, int width, std::vector<Count> counts) {
    if (height <= 0 || width <= 0) {
      fail(ErrorKind::kDimension, "mask dimensions must be positive, got " +
                                      std::to_string(height) + "x" + std::to_string(width));
    }
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] == 0 && i != 0 && i + 1 != counts.size()) {
        fail(ErrorKind::kCorruptMask, "zero-length run at position " + std::to_string(i));
      }
      total += counts[i];
    }
    const std::uint64_t expected = static_cast<std::uint64_t>(height) * width;
    if (total != expected) {
      fail(ErrorKind::kCorruptMask, "run lengths sum to " + std::to_string(total) +
                                        ", expected " + std::to_string(expected));
    }
    // Normalize: drop a trailing empty run so equal masks compare equal.
    if (counts.size() > 1 && counts.back() == 0) counts.pop_back();
    RleMask mask;
    mask.height_ = height;
    mask.width_ = width;
    mask.counts_ = std::move(counts);
    return mask;
  }

  /// All-background mask.
  static RleMask zeros(int height, int width) {
    return from_counts(height, width,
                       {static_cast<Count>(static_cast<std::uint64_t>(height) * width)});
  }

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(height_) * width_; }
  std::span<const Count> counts() const { return counts_; }

  std::uint64_t area() const {
    std::uint64_t a = 0;
    for (std::size_t i = 1; i < counts_.size(); i += 2) a += counts_[i];
    return a;
  }
  bool empty() const { return area() == 0; }

  bool same_shape(const RleMask& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const RleMask&, const RleMask&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<Count> counts_;
};

inline RleMask rle_encode(const Bitmap& bitmap) {
  if (bitmap.height() <= 0 || bitmap.width() <= 0) {
    fail(ErrorKind::kDimension, "cannot encode a zero-area bitmap");
  }
  std::vector<RleMask::Count> counts;
  std::uint8_t current = 0;
  RleMask::Count run = 0;
  for (std::uint8_t px : bitmap.pixels()) {
    const std::uint8_t v = px ? 1 : 0;
    if (v != current) {
      counts.push_back(run);
      run = 0;
      current = v;
    }
    ++run;
  }
  counts.push_back(run);
  return RleMask::from_counts(bitmap.height(), bitmap.width(), std::move(counts));
}

inline Bitmap rle_decode(const RleMask& mask) {
  Bitmap out(mask.height(), mask.width());
  std::uint64_t total = 0;
  for (auto c : mask.counts()) total += c;
  if (total != mask.pixel_count()) {
    fail(ErrorKind::kCorruptMask, "run lengths do not cover the mask extent");
  }
  auto pixels = out.pixels();
  std::size_t pos = 0;
  bool value = false;
  for (auto c : mask.counts()) {
    if (value) std::fill_n(pixels.begin() + static_cast<std::ptrdiff_t>(pos), c, 1);
    pos += c;
    value = !value;
  }
  return out;
}

/// Intersection area of two masks of equal shape, by merging runs.
inline std::uint64_t mask_intersection(const RleMask& a, const RleMask& b) {
  if (!a.same_shape(b)) {
    fail(ErrorKind::kDimension, "mask size mismatch: " + std::to_string(a.height()) + "x" +
                                    std::to_string(a.width()) + " vs " +
                                    std::to_string(b.height()) + "x" + std::to_string(b.width()));
  }
  const auto ca = a.counts();
  const auto cb = b.counts();
  std::size_t ia = 0, ib = 0;
  std::uint64_t ra = ca.empty() ? 0 : ca[0];
  std::uint64_t rb = cb.empty() ? 0 : cb[0];
  bool va = false, vb = false;
  std::uint64_t inter = 0;
  while (ia < ca.size() && ib < cb.size()) {
    const std::uint64_t step = std::min(ra, rb);
    if (va && vb) inter += step;
    ra -= step;
    rb -= step;
    if (ra == 0) {
      if (++ia < ca.size()) ra = ca[ia];
      va = !va;
    }
    if (rb == 0) {
      if (++ib < cb.size()) rb = cb[ib];
      vb = !vb;
    }
  }
  return inter;
}

/// |a n b| / |a u b|; 0 when both masks are empty.
inline double mask_iou(const RleMask& a, const RleMask& b) {
  const std::uint64_t inter = mask_intersection(a, b);
  const std::uint64_t uni = a.area() + b.area() - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Area-based IoU of half-open boxes. Degenerate boxes (zero area) never
/// overlap anything, including an identical degenerate box.
inline double box_iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

/// Tight half-open box around the foreground pixels.
inline BBox mask_to_box(const RleMask& mask) {
  const auto counts = mask.counts();
  const std::uint64_t h = static_cast<std::uint64_t>(mask.height());
  std::uint64_t pos = 0;
  std::uint64_t xmin = UINT64_MAX, xmax = 0, ymin = UINT64_MAX, ymax = 0;
  bool any = false;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::uint64_t c = counts[i];
    if (i % 2 == 1 && c > 0) {
      any = true;
      const std::uint64_t first = pos;
      const std::uint64_t last = pos + c - 1;
      const std::uint64_t x0 = first / h, x1 = last / h;
      xmin = std::min(xmin, x0);
      xmax = std::max(xmax, x1);
      if (x1 > x0) {
        // A run that crosses a column boundary touches the last row of x0
        // and the first row of x1.
        ymin = 0;
        ymax = h - 1;
      } else {
        ymin = std::min(ymin, first % h);
        ymax = std::max(ymax, last % h);
      }
    }
    pos += c;
  }
  if (!any) fail(ErrorKind::kEmptyMask, "cannot box an empty mask");
  return BBox{static_cast<double>(xmin), static_cast<double>(ymin),
              static_cast<double>(xmax + 1), static_cast<double>(ymax + 1)};
}

/// Rasterizes a box: pixel (x, y) is foreground when its center lies in the
/// half-open box. Integer boxes therefore cover exactly their area.
inline RleMask box_to_mask(const BBox& box, int height, int width) {
  if (height <= 0 || width <= 0) fail(ErrorKind::kDimension, "mask dimensions must be positive");
  auto span_of = [](double lo, double hi, int limit) {
    // first pixel p with p + 0.5 >= lo, last with p + 0.5 < hi
    int first = static_cast<int>(std::ceil(lo - 0.5));
    int end = static_cast<int>(std::ceil(hi - 0.5));
    first = std::clamp(first, 0, limit);
    end = std::clamp(end, 0, limit);
    return std::pair<int, int>{first, std::max(first, end)};
  };
  const auto [x0, x1] = span_of(box.x1, box.x2, width);
  const auto [y0, y1] = span_of(box.y1, box.y2, height);
  std::vector<RleMask::Count> counts;
  if (x0 == x1 || y0 == y1) return RleMask::zeros(height, width);
  const auto h = static_cast<RleMask::Count>(height);
  const auto run = static_cast<RleMask::Count>(y1 - y0);
  counts.push_back(static_cast<RleMask::Count>(x0) * h + static_cast<RleMask::Count>(y0));
  for (int x = x0; x < x1; ++x) {
    counts.push_back(run);
    if (x + 1 < x1) counts.push_back(h - run);
  }
  const std::uint64_t used = static_cast<std::uint64_t>(x1 - 1) * h + static_cast<std::uint64_t>(y1);
  counts.push_back(static_cast<RleMask::Count>(static_cast<std::uint64_t>(height) * width - used));
  // Full-height columns produce zero-length gaps; merge adjacent runs.
  std::vector<RleMask::Count> merged;
  merged.push_back(counts[0]);
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] == 0 && i + 1 < counts.size()) {
      merged.back() += counts[i + 1];
      ++i;
    } else {
      merged.push_back(counts[i]);
    }
  }
  return RleMask::from_counts(height, width, std::move(merged));
}

/// Row-major (prediction x ground truth) IoU table.
struct IoUMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

inline IoUMatrix iou_matrix(std::span<const RleMask> preds, std::span<const RleMask> gts,
                            unsigned threads = 1) {
  IoUMatrix m{preds.size(), gts.size(), std::vector<double>(preds.size() * gts.size(), 0.0)};
  parallel_for(preds.size(), threads, [&](std::size_t r) {
    for (std::size_t c = 0; c < gts.size(); ++c) m.values[r * m.cols + c] = mask_iou(preds[r], gts[c]);
  });
  return m;
}

/// Greedy suppression in input order: a mask is dropped when its IoU with
/// an earlier retained mask exceeds the threshold. Returns retained indices.
inline std::vector<std::size_t> nms_dedup(std::span<const RleMask> masks, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    fail(ErrorKind::kInvalidArgument, "nms threshold must lie in (0, 1]");
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    bool suppressed = false;
    for (std::size_t k : kept) {
      if (mask_iou(masks[i], masks[k]) > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(i);
  }
  return kept;
}

}  // namespace vrs
