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

#ifndef IIV__INVARIANT_HPP_
#define IIV__INVARIANT_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "iiv/chroma.hpp"
#include "iiv/error.hpp"
#include "iiv/image.hpp"
#include "iiv/mark_analysis.hpp"
#include "iiv/mask.hpp"

namespace iiv
{

/// Minimum |C_lit - C_shadow| in log chromaticity units for a usable mark.
inline constexpr double kMinIlluminationContrast = 1e-3;

struct IlluminationEstimate
{
  Eigen::Vector2d c_lit = Eigen::Vector2d::Zero();
  Eigen::Vector2d c_shadow = Eigen::Vector2d::Zero();
  /// Unit illumination direction.
  Eigen::Vector2d p_illum = Eigen::Vector2d::UnitX();
  /// Unit projection direction, orthogonal to p_illum.
  Eigen::Vector2d p_invariant = Eigen::Vector2d::UnitY();

  double contrast() const { return (c_lit - c_shadow).norm(); }
};

struct InvariantOutputs
{
  /// 1D invariant image mapped to [0,1] for display.
  ScalarField gray_1d;
  /// L1-normalized chromaticity; each pixel positive and summing to 1.
  RgbImage chroma_l1;
};

/// (c_lit - c_shadow) / |c_lit - c_shadow|.
/// Throws Error(NoIlluminationContrast) when the difference is below kMinIlluminationContrast.
Eigen::Vector2d illumination_direction(const Eigen::Vector2d & c_lit, const Eigen::Vector2d & c_shadow);

/// [[0, -1], [1, 0]] * p_illum.
inline Eigen::Vector2d invariant_vector(const Eigen::Vector2d & p_illum)
{
  return Eigen::Vector2d(-p_illum.y(), p_illum.x());
}

/// Estimate for one mark from its lit/shadow medians.
IlluminationEstimate estimate_from_pair(
  const LitShadowPair & pair, const PlaneBasis<double> & basis = PlaneBasis<double>::standard());

/// Contrast-weighted average of sign-aligned illumination directions.
/// Throws Error(NoMarks) for an empty list.
IlluminationEstimate combine_marks(std::span<const IlluminationEstimate> estimates);

/// Raw per-pixel chi . p_invariant.
ScalarField project_1d(const ChromaImage & chroma, const Eigen::Vector2d & p_invariant);

/// Linear-interpolated percentile (p in [0,1]) of ascending-sorted values.
double sorted_percentile(std::span<const double> sorted, double p);

/// Clips at the 1st/99th percentile and maps affinely onto [0,1].
/// A field with no spread between those percentiles maps to 0.5.
ScalarField display_normalize(const ScalarField & field);

/// Per-pixel mean of the three linear channels.
ScalarField brightness(const RgbImage & image);

/// Offset along p_illum used to put light back into the L1 image: median of
/// chi . p_illum over the brightest 1% of pixels.
double light_offset(const ChromaImage & chroma, const Eigen::Vector2d & p_illum, const ScalarField & brightness);

/// Collapses every pixel onto the invariant line at the light offset, lifts back
/// to log chromaticity, exponentiates and L1-normalizes.
RgbImage l1_chroma_image(
  const ChromaImage & chroma, const IlluminationEstimate & estimate, const ScalarField & brightness,
  const PlaneBasis<double> & basis = PlaneBasis<double>::standard());

/// Analysis of one connected mark. Exactly one of `estimate` / `error` is set.
struct MarkReport
{
  int index = 0;
  MarkAnalysis analysis;
  std::optional<IlluminationEstimate> estimate;
  std::optional<Error> error;
};

/// Runs mark analysis on every connected mark of `mask`; per-mark failures are
/// recorded, not thrown. With no seed each mark seeds from its own coordinates.
std::vector<MarkReport> analyze_marks(
  const RgbImage & image, const MarkMask & mask, std::optional<std::uint64_t> seed = std::nullopt,
  const PlaneBasis<double> & basis = PlaneBasis<double>::standard());

struct Derivation
{
  IlluminationEstimate estimate;
  InvariantOutputs outputs;
  /// Un-normalized 1D invariant values.
  ScalarField raw_1d;
  std::vector<MarkReport> marks;
};

/// 1D projection, display normalization and L1 image for a known estimate.
Derivation render(
  const RgbImage & image, const ChromaImage & chroma, const IlluminationEstimate & estimate,
  const PlaneBasis<double> & basis = PlaneBasis<double>::standard());

/// Full pipeline. Throws Error(NoMarks) when the mask has no usable mark and the
/// first per-mark error (tagged with its mark index) otherwise.
Derivation derive(
  const RgbImage & image, const MarkMask & mask, std::optional<std::uint64_t> seed = std::nullopt);

/// As above with a precomputed image_to_chroma(image).
Derivation derive(
  const RgbImage & image, const ChromaImage & chroma, const MarkMask & mask,
  std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace iiv

#endif  // IIV__INVARIANT_HPP_
