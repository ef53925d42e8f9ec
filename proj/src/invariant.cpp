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

#include "iiv/invariant.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "iiv/parallel.hpp"

namespace iiv
{

Eigen::Vector2d illumination_direction(const Eigen::Vector2d & c_lit, const Eigen::Vector2d & c_shadow)
{
  const Eigen::Vector2d diff = c_lit - c_shadow;
  const double norm = diff.norm();
  if (!(norm >= kMinIlluminationContrast)) {
    throw Error(ErrorKind::NoIlluminationContrast, "mark does not span an illumination change");
  }
  return diff / norm;
}

IlluminationEstimate estimate_from_pair(const LitShadowPair & pair, const PlaneBasis<double> & basis)
{
  IlluminationEstimate est;
  est.c_lit = rgb_to_chroma2(pair.lit_rgb, basis);
  est.c_shadow = rgb_to_chroma2(pair.shadow_rgb, basis);
  est.p_illum = illumination_direction(est.c_lit, est.c_shadow);
  est.p_invariant = invariant_vector(est.p_illum);
  return est;
}

IlluminationEstimate combine_marks(std::span<const IlluminationEstimate> estimates)
{
  if (estimates.empty()) {
    throw Error(ErrorKind::NoMarks, "no marks to combine");
  }
  if (estimates.size() == 1) {
    return estimates.front();
  }
  const Eigen::Vector2d reference = estimates.front().p_illum;
  Eigen::Vector2d direction = Eigen::Vector2d::Zero();
  Eigen::Vector2d c_lit = Eigen::Vector2d::Zero();
  Eigen::Vector2d c_shadow = Eigen::Vector2d::Zero();
  double total_weight = 0.0;
  for (const auto & est : estimates) {
    const double weight = est.contrast();
    const double sign = est.p_illum.dot(reference) < 0.0 ? -1.0 : 1.0;
    direction += weight * sign * est.p_illum;
    c_lit += weight * est.c_lit;
    c_shadow += weight * est.c_shadow;
    total_weight += weight;
  }
  IlluminationEstimate out;
  out.c_lit = c_lit / total_weight;
  out.c_shadow = c_shadow / total_weight;
  out.p_illum = direction.normalized();
  out.p_invariant = invariant_vector(out.p_illum);
  return out;
}

ScalarField project_1d(const ChromaImage & chroma, const Eigen::Vector2d & p_invariant)
{
  ScalarField field(chroma.width, chroma.height);
  parallel_for(chroma.size(), [&](Index begin, Index end) {
    field.pixels.segment(begin, end - begin) =
      (chroma.pixels.middleRows(begin, end - begin).matrix() * p_invariant).array();
  });
  return field;
}

double sorted_percentile(std::span<const double> sorted, double p)
{
  if (sorted.empty()) {
    return 0.0;
  }
  const double pos = std::clamp(p, 0.0, 1.0) * double(sorted.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - double(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ScalarField display_normalize(const ScalarField & field)
{
  std::vector<double> sorted(field.pixels.data(), field.pixels.data() + field.size());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted_percentile(sorted, 0.01);
  const double hi = sorted_percentile(sorted, 0.99);
  ScalarField out(field.width, field.height);
  if (!(hi > lo)) {
    out.pixels.setConstant(0.5);
    return out;
  }
  out.pixels = ((field.pixels - lo) / (hi - lo)).max(0.0).min(1.0);
  return out;
}

ScalarField brightness(const RgbImage & image)
{
  ScalarField out(image.width, image.height);
  out.pixels = image.pixels.rowwise().mean();
  return out;
}

double light_offset(const ChromaImage & chroma, const Eigen::Vector2d & p_illum, const ScalarField & bright)
{
  const auto n = static_cast<size_t>(chroma.size());
  if (n == 0) {
    return 0.0;
  }
  const size_t count = std::max<size_t>(1, static_cast<size_t>(std::ceil(0.01 * double(n))));
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  // Brightest first; equal brightness resolved by raster index.
  auto brighter = [&bright](Index a, Index b) {
    const double va = bright.pixels[a];
    const double vb = bright.pixels[b];
    return va != vb ? va > vb : a < b;
  };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count - 1), order.end(), brighter);
  std::vector<double> along(count);
  for (size_t i = 0; i < count; ++i) {
    along[i] = chroma.pixels.row(order[i]).matrix().dot(p_illum.transpose());
  }
  std::sort(along.begin(), along.end());
  return sorted_percentile(along, 0.5);
}

RgbImage l1_chroma_image(
  const ChromaImage & chroma, const IlluminationEstimate & estimate, const ScalarField & bright,
  const PlaneBasis<double> & basis)
{
  const Eigen::Vector2d p = estimate.p_illum;
  const double offset = light_offset(chroma, p, bright);
  const Eigen::Matrix<double, 2, 3> lift = basis.matrix().transpose();
  RgbImage out(chroma.width, chroma.height);
  parallel_for(chroma.size(), [&](Index begin, Index end) {
    const Index n = end - begin;
    const auto chi = chroma.pixels.middleRows(begin, n).matrix();
    // Drop each pixel's component along p, then put it back at the light offset.
    const Eigen::VectorXd along = (chi * p).array() - offset;
    const Eigen::Matrix<double, Eigen::Dynamic, 2> collapsed = chi - along * p.transpose();
    Eigen::Array<double, Eigen::Dynamic, 3, Eigen::RowMajor> c = (collapsed * lift).array().exp();
    c.colwise() /= c.rowwise().sum();
    out.pixels.middleRows(begin, n) = c;
  });
  return out;
}

std::vector<MarkReport> analyze_marks(
  const RgbImage & image, const MarkMask & mask, std::optional<std::uint64_t> seed,
  const PlaneBasis<double> & basis)
{
  if (!image.same_shape(mask.width(), mask.height())) {
    throw Error(ErrorKind::DimensionMismatch, "mask and image sizes differ");
  }
  std::vector<MarkReport> reports;
  const std::vector<MarkMask> marks = connected_marks(mask);
  reports.reserve(marks.size());
  for (size_t i = 0; i < marks.size(); ++i) {
    MarkReport report;
    report.index = static_cast<int>(i);
    const MarkedPixels pixels = gather_marked(image, marks[i]);
    report.analysis.pixels = canonical_order(pixels);
    try {
      report.analysis = analyze_mark(pixels, seed.value_or(seed_from_coords(pixels.coords)));
      report.estimate = estimate_from_pair(report.analysis.pair, basis);
    } catch (const Error & e) {
      if (!is_guidance_error(e.kind())) {
        throw;
      }
      report.error = e.with_mark(report.index);
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

Derivation render(
  const RgbImage & image, const ChromaImage & chroma, const IlluminationEstimate & estimate,
  const PlaneBasis<double> & basis)
{
  Derivation out;
  out.estimate = estimate;
  out.raw_1d = project_1d(chroma, estimate.p_invariant);
  out.outputs.gray_1d = display_normalize(out.raw_1d);
  out.outputs.chroma_l1 = l1_chroma_image(chroma, estimate, brightness(image), basis);
  return out;
}

Derivation derive(
  const RgbImage & image, const ChromaImage & chroma, const MarkMask & mask,
  std::optional<std::uint64_t> seed)
{
  if (!image.same_shape(chroma)) {
    throw Error(ErrorKind::DimensionMismatch, "chroma cache does not match image");
  }
  std::vector<MarkReport> reports = analyze_marks(image, mask, seed);
  if (reports.empty()) {
    throw Error(ErrorKind::NoMarks, "mask has no connected mark of at least " +
                                      std::to_string(kMinMarkPixels) + " pixels");
  }
  std::vector<IlluminationEstimate> estimates;
  for (const auto & report : reports) {
    if (report.error) {
      throw *report.error;
    }
    estimates.push_back(*report.estimate);
  }
  Derivation out = render(image, chroma, combine_marks(estimates));
  out.marks = std::move(reports);
  return out;
}

Derivation derive(const RgbImage & image, const MarkMask & mask, std::optional<std::uint64_t> seed)
{
  return derive(image, image_to_chroma(image), mask, seed);
}

}  // namespace iiv
