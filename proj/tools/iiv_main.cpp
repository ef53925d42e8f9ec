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

// Command-line front end: `iiv derive` and `iiv mask`.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "iiv/error.hpp"
#include "iiv/image_io.hpp"
#include "iiv/invariant.hpp"
#include "iiv/json_io.hpp"
#include "iiv/parallel.hpp"

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitGuidance = 3;

struct DeriveArgs
{
  std::string image;
  std::string mask;
  std::string strokes;
  double gamma = 2.2;
  bool linear = false;
  std::optional<std::uint64_t> seed;
  std::string out_1d;
  std::string out_chroma;
  std::string dump_estimate;
  unsigned threads = 1;
};

struct MaskArgs
{
  iiv::Index width = 0;
  iiv::Index height = 0;
  std::string strokes;
  std::string out;
};

int run_derive(const DeriveArgs & args)
{
  iiv::set_thread_count(args.threads);
  iiv::LoadOptions opts;
  opts.gamma = args.linear ? std::nullopt : std::optional<double>(args.gamma);
  const iiv::RgbImage image = iiv::load_image(args.image, opts);

  iiv::MarkMask mask;
  if (!args.mask.empty()) {
    mask = iiv::load_mask(args.mask);
    if (mask.width() != image.width || mask.height() != image.height) {
      throw iiv::Error(iiv::ErrorKind::DimensionMismatch, "mask size does not match image size");
    }
  } else {
    mask = iiv::replay_strokes(iiv::load_strokes(args.strokes), image.width, image.height);
  }

  const iiv::Derivation result = iiv::derive(image, mask, args.seed);
  iiv::save_gray(args.out_1d, result.outputs.gray_1d);
  iiv::save_chroma(args.out_chroma, result.outputs.chroma_l1);
  if (!args.dump_estimate.empty()) {
    std::ofstream out(args.dump_estimate);
    if (!out) {
      throw iiv::Error(iiv::ErrorKind::Io, "cannot write " + args.dump_estimate);
    }
    out << iiv::estimate_to_json(result.estimate, result.marks.size()).dump(2) << '\n';
  }
  return kExitOk;
}

int run_mask(const MaskArgs & args)
{
  if (args.width <= 0 || args.height <= 0) {
    throw iiv::Error(iiv::ErrorKind::InvalidInput, "width and height must be positive");
  }
  const iiv::MarkMask mask =
    iiv::replay_strokes(iiv::load_strokes(args.strokes), args.width, args.height);
  iiv::save_mask(args.out, mask);
  return kExitOk;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Illumination-invariant images from user-marked shadows"};
  app.require_subcommand(1);

  DeriveArgs derive_args;
  auto * derive = app.add_subcommand("derive", "derive the 1D invariant and L1 chromaticity images");
  derive->add_option("--image", derive_args.image, "input PNG or binary PPM")->required();
  auto * mask_opt = derive->add_option("--mask", derive_args.mask, "mark mask PNG (nonzero = marked)");
  auto * strokes_opt = derive->add_option("--strokes", derive_args.strokes, "strokes JSON");
  mask_opt->excludes(strokes_opt);
  auto * gamma_opt = derive->add_option("--gamma", derive_args.gamma, "display gamma to undo (default 2.2)")
                       ->check(CLI::PositiveNumber);
  derive->add_flag("--linear", derive_args.linear, "input is already linear")->excludes(gamma_opt);
  derive->add_option("--seed", derive_args.seed, "k-means seed (default: derived from the mark)");
  derive->add_option("--out-1d", derive_args.out_1d, "output 1D invariant PNG")->required();
  derive->add_option("--out-chroma", derive_args.out_chroma, "output L1 chromaticity PNG")->required();
  derive->add_option("--dump-estimate", derive_args.dump_estimate, "write the estimate as JSON");
  derive->add_option("--threads", derive_args.threads, "worker threads for per-pixel stages")
    ->check(CLI::Range(1u, 256u));

  MaskArgs mask_args;
  auto * mask = app.add_subcommand("mask", "rasterize strokes to a mask PNG");
  mask->add_option("--width", mask_args.width)->required();
  mask->add_option("--height", mask_args.height)->required();
  mask->add_option("--strokes", mask_args.strokes, "strokes JSON")->required();
  mask->add_option("--out", mask_args.out, "output mask PNG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*derive) {
      if (derive_args.mask.empty() == derive_args.strokes.empty()) {
        std::cerr << "derive: exactly one of --mask or --strokes is required\n";
        return kExitInput;
      }
      return run_derive(derive_args);
    }
    return run_mask(mask_args);
  } catch (const iiv::Error & e) {
    std::cerr << "error: " << e.what() << '\n';
    return iiv::is_guidance_error(e.kind()) ? kExitGuidance : kExitInput;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}
