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

#include "iiv/mask.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "iiv/error.hpp"

namespace iiv
{

namespace
{

void require_same_shape(const MarkMask & a, const MarkMask & b)
{
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(
      ErrorKind::DimensionMismatch, "mask sizes differ: " + std::to_string(a.width()) + "x" +
                                      std::to_string(a.height()) + " vs " +
                                      std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
}

double squared_distance_to_segment(double px, double py, const StrokePoint & a, const StrokePoint & b)
{
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp(((px - a.x) * dx + (py - a.y) * dy) / len2, 0.0, 1.0);
  }
  const double ex = px - (a.x + t * dx);
  const double ey = py - (a.y + t * dy);
  return ex * ex + ey * ey;
}

// Stamps one capsule (a disk when a == b) clipped to the mask bounds.
void stamp_capsule(MarkMask::Bits & bits, const StrokePoint & a, const StrokePoint & b, double radius)
{
  const double r2 = radius * radius;
  const Index x0 = std::max<Index>(0, static_cast<Index>(std::ceil(std::min(a.x, b.x) - radius)));
  const Index x1 =
    std::min<Index>(bits.cols() - 1, static_cast<Index>(std::floor(std::max(a.x, b.x) + radius)));
  const Index y0 = std::max<Index>(0, static_cast<Index>(std::ceil(std::min(a.y, b.y) - radius)));
  const Index y1 =
    std::min<Index>(bits.rows() - 1, static_cast<Index>(std::floor(std::max(a.y, b.y) + radius)));
  for (Index y = y0; y <= y1; ++y) {
    for (Index x = x0; x <= x1; ++x) {
      if (squared_distance_to_segment(double(x), double(y), a, b) <= r2) {
        bits(y, x) = true;
      }
    }
  }
}

}  // namespace

void validate_stroke(const Stroke & stroke, Index width, Index height)
{
  if (stroke.points.empty()) {
    throw Error(ErrorKind::InvalidStroke, "stroke has no points");
  }
  const double max_radius = static_cast<double>(std::min(width, height)) / 2.0;
  if (!(stroke.radius >= 1.0) || stroke.radius > max_radius) {
    throw Error(
      ErrorKind::InvalidStroke, "stroke radius " + std::to_string(stroke.radius) +
                                  " outside [1, " + std::to_string(max_radius) + "]");
  }
  for (const auto & p : stroke.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorKind::InvalidStroke, "stroke point is not finite");
    }
  }
}

MarkMask rasterize_stroke(const Stroke & stroke, Index width, Index height)
{
  if (stroke.points.empty()) {
    throw Error(ErrorKind::InvalidStroke, "stroke has no points");
  }
  if (!(stroke.radius > 0.0)) {
    throw Error(ErrorKind::InvalidStroke, "stroke radius must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::InvalidInput, "mask dimensions must be positive");
  }
  MarkMask mask(width, height);
  const auto & pts = stroke.points;
  if (pts.size() == 1) {
    stamp_capsule(mask.bits, pts.front(), pts.front(), stroke.radius);
  }
  for (size_t i = 1; i < pts.size(); ++i) {
    stamp_capsule(mask.bits, pts[i - 1], pts[i], stroke.radius);
  }
  return mask;
}

MarkMask mask_add(const MarkMask & current, const MarkMask & addition)
{
  require_same_shape(current, addition);
  return MarkMask(current.bits || addition.bits);
}

MarkMask mask_subtract(const MarkMask & current, const MarkMask & removal)
{
  require_same_shape(current, removal);
  return MarkMask(current.bits && !removal.bits);
}

MarkMask apply_stroke(const MarkMask & current, const Stroke & stroke)
{
  const MarkMask stamp = rasterize_stroke(stroke, current.width(), current.height());
  return stroke.mode == StrokeMode::Draw ? mask_add(current, stamp) : mask_subtract(current, stamp);
}

std::vector<MarkMask> connected_marks(const MarkMask & mask)
{
  const Index w = mask.width();
  const Index h = mask.height();
  std::vector<MarkMask> marks;
  MarkMask::Bits visited = MarkMask::Bits::Constant(h, w, false);
  std::vector<Index> stack;
  std::vector<Index> component;

  for (Index start = 0; start < w * h; ++start) {
    const Index sy = start / w;
    const Index sx = start % w;
    if (!mask.bits(sy, sx) || visited(sy, sx)) {
      continue;
    }
    component.clear();
    stack.assign(1, start);
    visited(sy, sx) = true;
    while (!stack.empty()) {
      const Index cur = stack.back();
      stack.pop_back();
      component.push_back(cur);
      const Index cy = cur / w;
      const Index cx = cur % w;
      for (Index dy = -1; dy <= 1; ++dy) {
        for (Index dx = -1; dx <= 1; ++dx) {
          const Index nx = cx + dx;
          const Index ny = cy + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
            continue;
          }
          if (mask.bits(ny, nx) && !visited(ny, nx)) {
            visited(ny, nx) = true;
            stack.push_back(ny * w + nx);
          }
        }
      }
    }
    if (static_cast<Index>(component.size()) < kMinMarkPixels) {
      continue;
    }
    MarkMask mark(w, h);
    for (const Index p : component) {
      mark.bits(p / w, p % w) = true;
    }
    marks.push_back(std::move(mark));
  }
  return marks;
}

}  // namespace iiv
