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

#include "iiv/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "iiv/error.hpp"

namespace iiv
{

namespace
{

struct RawImage
{
  Index width = 0;
  Index height = 0;
  std::vector<std::uint16_t> samples;  // interleaved RGB
  std::uint32_t maxval = 255;
};

struct MemoryReader
{
  std::span<const std::uint8_t> data;
  size_t offset = 0;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t length)
{
  auto * reader = static_cast<MemoryReader *>(png_get_io_ptr(png));
  if (reader->offset + length > reader->data.size()) {
    png_error(png, "unexpected end of PNG data");
  }
  std::memcpy(out, reader->data.data() + reader->offset, length);
  reader->offset += length;
}

void write_to_vector(png_structp png, png_bytep data, png_size_t length)
{
  auto * out = static_cast<Bytes *>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_noop(png_structp) {}

void warn_silent(png_structp, png_const_charp) {}

RawImage decode_png(std::span<const std::uint8_t> bytes)
{
  RawImage raw;
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> buffer;
  MemoryReader reader{bytes, 0};

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, warn_silent);
  if (!png) {
    throw Error(ErrorKind::Io, "cannot allocate PNG reader");
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorKind::Io, "cannot allocate PNG info");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::InvalidInput, "corrupt or truncated PNG");
  }
  png_set_read_fn(png, &reader, read_from_memory);
  png_set_user_limits(png, 1u << 15, 1u << 15);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_palette_to_rgb(png);
  }
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  if (color_type & PNG_COLOR_MASK_ALPHA) {
    png_set_strip_alpha(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
  }
  const bool sixteen = bit_depth == 16;
  if (sixteen) {
    png_set_swap(png);  // little-endian host order
  }
  png_read_update_info(png, info);
  const size_t row_bytes = png_get_rowbytes(png, info);

  buffer.resize(row_bytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    rows[y] = buffer.data() + y * row_bytes;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  raw.width = width;
  raw.height = height;
  raw.maxval = sixteen ? 65535 : 255;
  raw.samples.resize(size_t(width) * height * 3);
  for (size_t i = 0; i < raw.samples.size(); ++i) {
    if (sixteen) {
      std::uint16_t v;
      std::memcpy(&v, buffer.data() + 2 * i, 2);
      raw.samples[i] = v;
    } else {
      raw.samples[i] = buffer[i];
    }
  }
  return raw;
}

RawImage decode_ppm(std::span<const std::uint8_t> bytes)
{
  size_t pos = 2;
  auto fail = [](const std::string & why) -> RawImage {
    throw Error(ErrorKind::InvalidInput, "bad PPM: " + why);
  };
  auto next_int = [&]() -> long {
    // whitespace and '#' comments between header fields
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') {
          ++pos;
        }
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    long value = 0;
    size_t digits = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos]) && digits < 9) {
      value = value * 10 + (bytes[pos] - '0');
      ++pos;
      ++digits;
    }
    return digits == 0 ? -1 : value;
  };
  const long width = next_int();
  const long height = next_int();
  const long maxval = next_int();
  if (width < 0 || height < 0 || maxval < 0) {
    return fail("malformed header");
  }
  if (maxval < 1 || maxval > 65535) {
    return fail("maxval out of range");
  }
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    return fail("missing separator after header");
  }
  ++pos;
  RawImage raw;
  raw.width = width;
  raw.height = height;
  raw.maxval = static_cast<std::uint32_t>(maxval);
  const size_t count = size_t(width) * size_t(height) * 3;
  const size_t bytes_per = maxval > 255 ? 2 : 1;
  if (bytes.size() - pos < count * bytes_per) {
    return fail("truncated pixel data");
  }
  raw.samples.resize(count);
  for (size_t i = 0; i < count; ++i) {
    if (bytes_per == 2) {
      raw.samples[i] = static_cast<std::uint16_t>((bytes[pos + 2 * i] << 8) | bytes[pos + 2 * i + 1]);
    } else {
      raw.samples[i] = bytes[pos + i];
    }
  }
  return raw;
}

bool is_png(std::span<const std::uint8_t> bytes)
{
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

bool is_ppm(std::span<const std::uint8_t> bytes)
{
  return bytes.size() >= 3 && bytes[0] == 'P' && bytes[1] == '6' && std::isspace(bytes[2]);
}

RawImage decode_raw(std::span<const std::uint8_t> bytes)
{
  RawImage raw;
  if (is_png(bytes)) {
    raw = decode_png(bytes);
  } else if (is_ppm(bytes)) {
    raw = decode_ppm(bytes);
  } else {
    throw Error(ErrorKind::InvalidInput, "unsupported image format (expected PNG or binary PPM)");
  }
  if (raw.width <= 0 || raw.height <= 0) {
    throw Error(ErrorKind::InvalidInput, "image has zero width or height");
  }
  return raw;
}

enum class PngLayout { Gray, Rgb };

Bytes encode_png(Index width, Index height, PngLayout layout, int bit_depth, const std::vector<std::uint8_t> & data)
{
  Bytes out;
  const int channels = layout == PngLayout::Gray ? 1 : 3;
  const size_t row_bytes = size_t(width) * channels * (bit_depth / 8);
  std::vector<png_bytep> rows(static_cast<size_t>(height));
  for (Index y = 0; y < height; ++y) {
    rows[static_cast<size_t>(y)] = const_cast<png_bytep>(data.data() + size_t(y) * row_bytes);
  }

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, warn_silent);
  if (!png) {
    throw Error(ErrorKind::Io, "cannot allocate PNG writer");
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorKind::Io, "cannot allocate PNG info");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::Io, "PNG encoding failed");
  }
  png_set_write_fn(png, &out, write_to_vector, flush_noop);
  png_set_IHDR(
    png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
    layout == PngLayout::Gray ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
    PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) {
    png_set_swap(png);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace

Bytes read_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open " + path.string());
  }
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path & path, std::span<const std::uint8_t> bytes)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write " + path.string());
  }
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorKind::Io, "write failed for " + path.string());
  }
}

RgbImage decode_image(std::span<const std::uint8_t> bytes)
{
  const RawImage raw = decode_raw(bytes);
  RgbImage image(raw.width, raw.height);
  const double scale = 1.0 / double(raw.maxval);
  for (Index i = 0; i < image.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      image.pixels(i, c) = std::min(1.0, raw.samples[size_t(i) * 3 + size_t(c)] * scale);
    }
  }
  return image;
}

RgbImage linearize(RgbImage image, const LoadOptions & opts)
{
  if (opts.gamma) {
    if (!(*opts.gamma > 0.0)) {
      throw Error(ErrorKind::InvalidInput, "gamma must be positive");
    }
    image.pixels = image.pixels.max(0.0).pow(*opts.gamma);
  }
  image.pixels = image.pixels.max(0.0).min(1.0);
  return image;
}

RgbImage encode_gamma(RgbImage image, const LoadOptions & opts)
{
  if (opts.gamma) {
    if (!(*opts.gamma > 0.0)) {
      throw Error(ErrorKind::InvalidInput, "gamma must be positive");
    }
    image.pixels = image.pixels.max(0.0).pow(1.0 / *opts.gamma);
  }
  image.pixels = image.pixels.max(0.0).min(1.0);
  return image;
}

RgbImage decode_image(std::span<const std::uint8_t> bytes, const LoadOptions & opts)
{
  return linearize(decode_image(bytes), opts);
}

RgbImage load_image(const std::filesystem::path & path, const LoadOptions & opts)
{
  return decode_image(read_file(path), opts);
}

MarkMask decode_mask(std::span<const std::uint8_t> bytes)
{
  const RawImage raw = decode_raw(bytes);
  MarkMask mask(raw.width, raw.height);
  for (Index y = 0; y < raw.height; ++y) {
    for (Index x = 0; x < raw.width; ++x) {
      const size_t i = (size_t(y) * size_t(raw.width) + size_t(x)) * 3;
      mask.bits(y, x) = raw.samples[i] != 0 || raw.samples[i + 1] != 0 || raw.samples[i + 2] != 0;
    }
  }
  return mask;
}

MarkMask load_mask(const std::filesystem::path & path) { return decode_mask(read_file(path)); }

std::uint8_t quantize8(double v)
{
  if (!(v > 0.0)) {
    return 0;
  }
  return static_cast<std::uint8_t>(std::min(255.0, std::floor(255.0 * std::min(v, 1.0) + 0.5)));
}

Bytes encode_png_gray(const ScalarField & field)
{
  std::vector<std::uint8_t> data(static_cast<size_t>(field.size()));
  for (Index i = 0; i < field.size(); ++i) {
    data[static_cast<size_t>(i)] = quantize8(field.pixels[i]);
  }
  return encode_png(field.width, field.height, PngLayout::Gray, 8, data);
}

Bytes encode_png_rgb(const RgbImage & image, double scale)
{
  std::vector<std::uint8_t> data(static_cast<size_t>(image.size()) * 3);
  for (Index i = 0; i < image.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      data[size_t(i) * 3 + size_t(c)] = quantize8(scale * image.pixels(i, c));
    }
  }
  return encode_png(image.width, image.height, PngLayout::Rgb, 8, data);
}

Bytes encode_png_rgb16(const RgbImage & image)
{
  std::vector<std::uint8_t> data(static_cast<size_t>(image.size()) * 6);
  for (Index i = 0; i < image.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      const double v = std::clamp(image.pixels(i, c), 0.0, 1.0);
      const auto q = static_cast<std::uint16_t>(std::floor(65535.0 * v + 0.5));
      std::memcpy(data.data() + (size_t(i) * 3 + size_t(c)) * 2, &q, 2);
    }
  }
  return encode_png(image.width, image.height, PngLayout::Rgb, 16, data);
}

Bytes encode_png_mask(const MarkMask & mask)
{
  std::vector<std::uint8_t> data(static_cast<size_t>(mask.width() * mask.height()));
  for (Index y = 0; y < mask.height(); ++y) {
    for (Index x = 0; x < mask.width(); ++x) {
      data[size_t(y * mask.width() + x)] = mask.bits(y, x) ? 255 : 0;
    }
  }
  return encode_png(mask.width(), mask.height(), PngLayout::Gray, 8, data);
}

void save_gray(const std::filesystem::path & path, const ScalarField & field)
{
  write_file(path, encode_png_gray(field));
}

void save_rgb(const std::filesystem::path & path, const RgbImage & image, double scale)
{
  write_file(path, encode_png_rgb(image, scale));
}

void save_chroma(const std::filesystem::path & path, const RgbImage & chroma_l1)
{
  save_rgb(path, chroma_l1, kChromaDisplayScale);
}

void save_mask(const std::filesystem::path & path, const MarkMask & mask)
{
  write_file(path, encode_png_mask(mask));
}

}  // namespace iiv
