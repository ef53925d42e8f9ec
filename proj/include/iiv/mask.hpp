// Copyright 2026 The iiv Authors
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

#ifndef IIV__MASK_HPP_
#define IIV__MASK_HPP_

#include <vector>

#include <Eigen/Core>

#include "iiv/image.hpp"

namespace iiv
{

/// Binary mark mask; bits(y, x) is true where the user marked the pixel.
struct MarkMask
{
  using Bits = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Bits bits;

  MarkMask() = default;
  MarkMask(Index width, Index height) : bits(Bits::Constant(height, width, false)) {}
  explicit MarkMask(Bits b) : bits(std::move(b)) {}

  Index width() const { return bits.cols(); }
  Index height() const { return bits.rows(); }
  Index count() const { return bits.count(); }
  bool empty() const { return !bits.any(); }

  bool operator==(const MarkMask & other) const
  {
    return bits.rows() == other.bits.rows() && bits.cols() == other.bits.cols() &&
           (bits == other.bits).all();
  }
};

enum class StrokeMode { Draw, Erase };

struct StrokePoint
{
  double x = 0.0;
  double y = 0.0;
};

/// Brush polyline. Pixel (x, y) has its center at integer coordinates (x, y).
struct Stroke
{
  std::vector<StrokePoint> points;
  double radius = 8.0;
  StrokeMode mode = StrokeMode::Draw;
};

/// Minimum pixel count for a connected component to count as a mark.
inline constexpr Index kMinMarkPixels = 20;

/// Checks the user-facing stroke constraints: at least one point and
/// radius in [1, min(width, height) / 2]. Throws Error(InvalidStroke).
void validate_stroke(const Stroke & stroke, Index width, Index height);

/// Sets every pixel whose center lies within `radius` of the stroke polyline.
/// Throws Error(InvalidStroke) on an empty point list or non-positive radius.
MarkMask rasterize_stroke(const Stroke & stroke, Index width, Index height);

/// N v Na
MarkMask mask_add(const MarkMask & current, const MarkMask & addition);

/// N ^ !Na
MarkMask mask_subtract(const MarkMask & current, const MarkMask & removal);

/// Rasterizes `stroke` and applies it to `current` by its mode.
MarkMask apply_stroke(const MarkMask & current, const Stroke & stroke);

/// 8-connected components of the marked pixels, dropping those smaller than
/// kMinMarkPixels. Ordered by the raster position of each component's first pixel.
std::vector<MarkMask> connected_marks(const MarkMask & mask);

}  // namespace iiv

#endif  // IIV__MASK_HPP_
