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

#ifndef IIV__IMAGE_IO_HPP_
#define IIV__IMAGE_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "iiv/image.hpp"
#include "iiv/mask.hpp"

namespace iiv
{

/// How decoded [0,1] values are mapped to linear light.
struct LoadOptions
{
  /// v <- v^gamma; nullopt keeps values as stored.
  std::optional<double> gamma = 2.2;

  static LoadOptions linear() { return LoadOptions{std::nullopt}; }
};

using Bytes = std::vector<std::uint8_t>;

/// Display scale applied to L1 chromaticity images so (1/3,1/3,1/3) maps to white.
inline constexpr double kChromaDisplayScale = 3.0;

Bytes read_file(const std::filesystem::path & path);
void write_file(const std::filesystem::path & path, std::span<const std::uint8_t> bytes);

/// Decodes PNG (8/16-bit; gray, palette and alpha are expanded to RGB, alpha
/// dropped) or binary PPM (P6) to [0,1] values without any transfer function.
RgbImage decode_image(std::span<const std::uint8_t> bytes);

/// Applies opts.gamma and clamps to [0,1].
RgbImage linearize(RgbImage image, const LoadOptions & opts);

/// Inverse of linearize for display: v <- v^(1/gamma).
RgbImage encode_gamma(RgbImage image, const LoadOptions & opts);

RgbImage decode_image(std::span<const std::uint8_t> bytes, const LoadOptions & opts);
RgbImage load_image(const std::filesystem::path & path, const LoadOptions & opts = {});

/// Any nonzero channel marks the pixel.
MarkMask decode_mask(std::span<const std::uint8_t> bytes);
MarkMask load_mask(const std::filesystem::path & path);

/// round-half-up of 255 * clamp(v, 0, 1).
std::uint8_t quantize8(double v);

Bytes encode_png_gray(const ScalarField & field);
/// Each channel is multiplied by `scale`, clamped and quantized to 8 bits.
Bytes encode_png_rgb(const RgbImage & image, double scale = 1.0);
Bytes encode_png_rgb16(const RgbImage & image);
Bytes encode_png_mask(const MarkMask & mask);

void save_gray(const std::filesystem::path & path, const ScalarField & field);
void save_rgb(const std::filesystem::path & path, const RgbImage & image, double scale = 1.0);
/// L1 chromaticity image at kChromaDisplayScale.
void save_chroma(const std::filesystem::path & path, const RgbImage & chroma_l1);
void save_mask(const std::filesystem::path & path, const MarkMask & mask);

}  // namespace iiv

#endif  // IIV__IMAGE_IO_HPP_
