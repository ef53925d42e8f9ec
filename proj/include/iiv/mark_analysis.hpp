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

#ifndef IIV__MARK_ANALYSIS_HPP_
#define IIV__MARK_ANALYSIS_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "iiv/image.hpp"
#include "iiv/mask.hpp"

namespace iiv
{

/// Coordinates and linear RGB of the pixels of one mark, row-aligned.
struct MarkedPixels
{
  Eigen::Matrix<double, Eigen::Dynamic, 2> coords;
  Eigen::Matrix<double, Eigen::Dynamic, 3> rgb;

  Index size() const { return coords.rows(); }
};

/// Columns (r, g, b, s), all in [0,1]: jointly min-max normalized RGB and the
/// normalized first principal component score of the pixel location.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, 4>;

struct LitShadowPair
{
  Eigen::Vector3d lit_rgb = Eigen::Vector3d::Zero();
  Eigen::Vector3d shadow_rgb = Eigen::Vector3d::Zero();
  Index lit_count = 0;
  Index shadow_count = 0;
  /// Which k-means label ended up as the lit cluster.
  int lit_label = 0;
};

/// Collects the marked pixels of `image` in raster order.
MarkedPixels gather_marked(const RgbImage & image, const MarkMask & mark);

/// Reorders rows by (y, x) so the analysis does not depend on input order.
MarkedPixels canonical_order(const MarkedPixels & marked);

/// Projection of each coordinate onto the leading eigenvector of the 2x2
/// coordinate covariance, min-max normalized to [0,1]. The eigenvector is
/// oriented so its larger-magnitude component is positive.
/// Throws Error(DegenerateMark) when all points coincide.
Eigen::VectorXd pca_first_score(const Eigen::Matrix<double, Eigen::Dynamic, 2> & coords);

/// Throws Error(FlatMark) when every RGB value in the mark is identical.
FeatureMatrix build_features(const MarkedPixels & marked);

/// Result of one seeded k-means run.
struct KMeansRun
{
  std::vector<int> labels;
  Eigen::Matrix<double, 2, 4> centers;
  double objective = 0.0;
  int iterations = 0;
  /// Within-cluster sum of squares after seeding and after each Lloyd step.
  std::vector<double> objective_history;
};

inline constexpr int kKMeansMaxIterations = 100;
inline constexpr int kKMeansRestarts = 5;

/// Single k-means++ seeded Lloyd run with k = 2 and squared Euclidean distance.
KMeansRun kmeans_run(const FeatureMatrix & features, std::uint64_t seed);

/// Best of kKMeansRestarts runs (seeds seed .. seed+4) by objective.
/// Throws Error(FlatMark) with fewer than two distinct rows.
std::vector<int> kmeanspp_2(const FeatureMatrix & features, std::uint64_t seed);

/// Per-cluster robust median RGB; the cluster with the lower mean intensity is
/// the shadow side. Requires both labels to be present.
LitShadowPair extract_lit_shadow(const MarkedPixels & marked, const std::vector<int> & labels);

/// Stable seed derived from the sorted pixel coordinates of a mark.
std::uint64_t seed_from_coords(const Eigen::Matrix<double, Eigen::Dynamic, 2> & coords);

struct MarkAnalysis
{
  MarkedPixels pixels;  // canonical order
  std::vector<int> labels;
  LitShadowPair pair;
};

/// canonical_order, build_features, kmeanspp_2 and extract_lit_shadow in sequence.
MarkAnalysis analyze_mark(const MarkedPixels & marked, std::uint64_t seed);

}  // namespace iiv

#endif  // IIV__MARK_ANALYSIS_HPP_
