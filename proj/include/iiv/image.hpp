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

#ifndef IIV__IMAGE_HPP_
#define IIV__IMAGE_HPP_

#include <Eigen/Core>

namespace iiv
{

using Index = Eigen::Index;

/// Dense H x W image with a fixed number of channels per pixel.
///
/// Pixels are stored one per row in raster order (index = y * width + x), so
/// whole-image operations can be written as Eigen array expressions over
/// `pixels` and per-pixel loops can be split into contiguous row ranges.
template <typename Scalar, int Channels>
struct PixelImage
{
  static constexpr int channels = Channels;
  using Pixels = Eigen::Array<
    Scalar, Eigen::Dynamic, Channels, Channels == 1 ? Eigen::ColMajor : Eigen::RowMajor>;

  Index width = 0;
  Index height = 0;
  Pixels pixels;

  PixelImage() = default;
  PixelImage(Index w, Index h) : width(w), height(h), pixels(w * h, Channels) {}
  PixelImage(Index w, Index h, const Scalar & fill)
  : width(w), height(h), pixels(Pixels::Constant(w * h, Channels, fill))
  {
  }

  Index size() const { return width * height; }
  Index index(Index x, Index y) const { return y * width + x; }

  auto pixel(Index x, Index y) { return pixels.row(index(x, y)); }
  auto pixel(Index x, Index y) const { return pixels.row(index(x, y)); }

  bool same_shape(Index w, Index h) const { return width == w && height == h; }
  template <typename S, int C>
  bool same_shape(const PixelImage<S, C> & other) const
  {
    return same_shape(other.width, other.height);
  }
};

template <typename Scalar>
using RgbImageT = PixelImage<Scalar, 3>;

/// Linear-light RGB, every channel in [0,1].
using RgbImage = RgbImageT<double>;

/// Per-pixel 2D log chromaticity plane coordinates.
using ChromaImage = PixelImage<double, 2>;

/// Per-pixel scalar, e.g. a raw or display-normalized 1D invariant.
using ScalarField = PixelImage<double, 1>;

}  // namespace iiv

#endif  // IIV__IMAGE_HPP_
