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

#include "iiv/mark_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "iiv/error.hpp"

namespace iiv
{

namespace
{

using Coords = Eigen::Matrix<double, Eigen::Dynamic, 2>;

// Uniform double in [0, 1) from the top 53 bits; stable across standard libraries.
double uniform01(std::mt19937_64 & rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double median_in_place(std::vector<double> & values)
{
  const size_t n = values.size();
  const size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (n % 2 == 1) {
    return upper;
  }
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

Eigen::Vector3d channel_median(const Eigen::Matrix<double, Eigen::Dynamic, 3> & rgb, const std::vector<Index> & rows)
{
  Eigen::Vector3d out;
  std::vector<double> values(rows.size());
  for (int c = 0; c < 3; ++c) {
    for (size_t i = 0; i < rows.size(); ++i) {
      values[i] = rgb(rows[i], c);
    }
    out[c] = median_in_place(values);
  }
  return out;
}

// Median with distance-based trimming of outliers.
Eigen::Vector3d robust_median(const Eigen::Matrix<double, Eigen::Dynamic, 3> & rgb, const std::vector<Index> & rows)
{
  const Eigen::Vector3d center = channel_median(rgb, rows);
  std::vector<double> dist(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    dist[i] = (rgb.row(rows[i]).transpose() - center).norm();
  }
  std::vector<double> scratch = dist;
  const double threshold = 2.5 * std::max(median_in_place(scratch), 1e-4);
  std::vector<Index> kept;
  kept.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (dist[i] <= threshold) {
      kept.push_back(rows[i]);
    }
  }
  if (kept.empty()) {
    return center;
  }
  return channel_median(rgb, kept);
}

Eigen::VectorXd squared_distances(const FeatureMatrix & features, const Eigen::Matrix<double, 1, 4> & center)
{
  return (features.rowwise() - center).rowwise().squaredNorm();
}

// Assigns every row to the nearest center (ties to cluster 0). Returns the objective.
double assign(const FeatureMatrix & features, const Eigen::Matrix<double, 2, 4> & centers, std::vector<int> & labels)
{
  const Eigen::VectorXd d0 = squared_distances(features, centers.row(0));
  const Eigen::VectorXd d1 = squared_distances(features, centers.row(1));
  double objective = 0.0;
  for (Index i = 0; i < features.rows(); ++i) {
    const bool second = d1[i] < d0[i];
    labels[static_cast<size_t>(i)] = second ? 1 : 0;
    objective += second ? d1[i] : d0[i];
  }
  return objective;
}

double objective_of(const FeatureMatrix & features, const Eigen::Matrix<double, 2, 4> & centers, const std::vector<int> & labels)
{
  double total = 0.0;
  for (Index i = 0; i < features.rows(); ++i) {
    total += (features.row(i) - centers.row(labels[static_cast<size_t>(i)])).squaredNorm();
  }
  return total;
}

Eigen::Matrix<double, 2, 4> cluster_means(const FeatureMatrix & features, const std::vector<int> & labels, Eigen::Vector2i & counts)
{
  Eigen::Matrix<double, 2, 4> sums = Eigen::Matrix<double, 2, 4>::Zero();
  counts.setZero();
  for (Index i = 0; i < features.rows(); ++i) {
    const int l = labels[static_cast<size_t>(i)];
    sums.row(l) += features.row(i);
    ++counts[l];
  }
  for (int c = 0; c < 2; ++c) {
    if (counts[c] > 0) {
      sums.row(c) /= counts[c];
    }
  }
  return sums;
}

// Moves the point farthest from its center into an empty cluster.
void repair_empty(const FeatureMatrix & features, Eigen::Matrix<double, 2, 4> & centers, std::vector<int> & labels)
{
  Eigen::Vector2i counts = Eigen::Vector2i::Zero();
  for (const int l : labels) {
    ++counts[l];
  }
  for (int empty = 0; empty < 2; ++empty) {
    if (counts[empty] > 0) {
      continue;
    }
    Index farthest = 0;
    double best = -1.0;
    for (Index i = 0; i < features.rows(); ++i) {
      const double d = (features.row(i) - centers.row(labels[static_cast<size_t>(i)])).squaredNorm();
      if (d > best) {
        best = d;
        farthest = i;
      }
    }
    --counts[labels[static_cast<size_t>(farthest)]];
    labels[static_cast<size_t>(farthest)] = empty;
    ++counts[empty];
    centers.row(empty) = features.row(farthest);
  }
}

bool has_two_distinct_rows(const FeatureMatrix & features)
{
  for (Index i = 1; i < features.rows(); ++i) {
    if (features.row(i) != features.row(0)) {
      return true;
    }
  }
  return false;
}

}  // namespace

MarkedPixels gather_marked(const RgbImage & image, const MarkMask & mark)
{
  if (!image.same_shape(mark.width(), mark.height())) {
    throw Error(ErrorKind::DimensionMismatch, "mask and image sizes differ");
  }
  MarkedPixels out;
  const Index n = mark.count();
  out.coords.resize(n, 2);
  out.rgb.resize(n, 3);
  Index row = 0;
  for (Index y = 0; y < mark.height(); ++y) {
    for (Index x = 0; x < mark.width(); ++x) {
      if (mark.bits(y, x)) {
        out.coords.row(row) << double(x), double(y);
        out.rgb.row(row) = image.pixel(x, y).matrix();
        ++row;
      }
    }
  }
  return out;
}

MarkedPixels canonical_order(const MarkedPixels & marked)
{
  std::vector<Index> order(static_cast<size_t>(marked.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (marked.coords(a, 1) != marked.coords(b, 1)) {
      return marked.coords(a, 1) < marked.coords(b, 1);
    }
    return marked.coords(a, 0) < marked.coords(b, 0);
  });
  MarkedPixels out;
  out.coords.resize(marked.size(), 2);
  out.rgb.resize(marked.size(), 3);
  for (Index i = 0; i < marked.size(); ++i) {
    out.coords.row(i) = marked.coords.row(order[static_cast<size_t>(i)]);
    out.rgb.row(i) = marked.rgb.row(order[static_cast<size_t>(i)]);
  }
  return out;
}

Eigen::VectorXd pca_first_score(const Coords & coords)
{
  if (coords.rows() < 2) {
    throw Error(ErrorKind::DegenerateMark, "mark needs at least two distinct pixel locations");
  }
  const Eigen::RowVector2d mean = coords.colwise().mean();
  const Coords centered = coords.rowwise() - mean;
  if ((centered.array() == 0.0).all()) {
    throw Error(ErrorKind::DegenerateMark, "all mark pixels share one location");
  }
  const Eigen::Matrix2d covariance = centered.transpose() * centered / double(coords.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(covariance);
  Eigen::Vector2d axis = solver.eigenvectors().col(1);
  const int major = std::abs(axis.x()) >= std::abs(axis.y()) ? 0 : 1;
  if (axis[major] < 0) {
    axis = -axis;
  }
  Eigen::VectorXd scores = centered * axis;
  const double lo = scores.minCoeff();
  const double span = scores.maxCoeff() - lo;
  if (!(span > 0.0)) {
    throw Error(ErrorKind::DegenerateMark, "mark has no spatial extent along its principal axis");
  }
  return (scores.array() - lo) / span;
}

FeatureMatrix build_features(const MarkedPixels & marked)
{
  FeatureMatrix features(marked.size(), 4);
  const double lo = marked.rgb.minCoeff();
  const double span = marked.rgb.maxCoeff() - lo;
  if (!(span > 0.0)) {
    throw Error(ErrorKind::FlatMark, "mark pixels all have the same color");
  }
  features.leftCols<3>() = (marked.rgb.array() - lo) / span;
  features.col(3) = pca_first_score(marked.coords);
  return features;
}

KMeansRun kmeans_run(const FeatureMatrix & features, std::uint64_t seed)
{
  const Index n = features.rows();
  if (n < 2) {
    throw Error(ErrorKind::FlatMark, "k-means needs at least two rows");
  }
  std::mt19937_64 rng(seed);
  KMeansRun run;

  // k-means++ seeding: uniform first center, second proportional to squared distance.
  const Index first = std::min<Index>(n - 1, static_cast<Index>(uniform01(rng) * double(n)));
  const Eigen::VectorXd d2 = squared_distances(features, features.row(first));
  const double total = d2.sum();
  if (!(total > 0.0)) {
    throw Error(ErrorKind::FlatMark, "mark features have fewer than two distinct rows");
  }
  const double target = uniform01(rng) * total;
  Index second = -1;
  double cumulative = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (d2[i] <= 0.0) {
      continue;
    }
    cumulative += d2[i];
    second = i;
    if (cumulative > target) {
      break;
    }
  }
  run.centers.row(0) = features.row(first);
  run.centers.row(1) = features.row(second);

  run.labels.assign(static_cast<size_t>(n), 0);
  assign(features, run.centers, run.labels);
  repair_empty(features, run.centers, run.labels);
  run.objective_history.push_back(objective_of(features, run.centers, run.labels));

  std::vector<int> next(run.labels.size());
  Eigen::Vector2i counts;
  for (int it = 1; it <= kKMeansMaxIterations; ++it) {
    run.centers = cluster_means(features, run.labels, counts);
    assign(features, run.centers, next);
    repair_empty(features, run.centers, next);
    run.objective_history.push_back(objective_of(features, run.centers, next));
    run.iterations = it;
    const bool converged = next == run.labels;
    run.labels.swap(next);
    if (converged) {
      break;
    }
  }
  run.centers = cluster_means(features, run.labels, counts);
  run.objective = objective_of(features, run.centers, run.labels);
  return run;
}

std::vector<int> kmeanspp_2(const FeatureMatrix & features, std::uint64_t seed)
{
  if (features.rows() < 2 || !has_two_distinct_rows(features)) {
    throw Error(ErrorKind::FlatMark, "mark features have fewer than two distinct rows");
  }
  KMeansRun best = kmeans_run(features, seed);
  for (int r = 1; r < kKMeansRestarts; ++r) {
    KMeansRun candidate = kmeans_run(features, seed + static_cast<std::uint64_t>(r));
    if (candidate.objective < best.objective) {
      best = std::move(candidate);
    }
  }
  return best.labels;
}

LitShadowPair extract_lit_shadow(const MarkedPixels & marked, const std::vector<int> & labels)
{
  if (static_cast<Index>(labels.size()) != marked.size()) {
    throw Error(ErrorKind::InvalidInput, "label count does not match marked pixel count");
  }
  std::vector<Index> rows[2];
  for (size_t i = 0; i < labels.size(); ++i) {
    rows[labels[i] == 0 ? 0 : 1].push_back(static_cast<Index>(i));
  }
  if (rows[0].empty() || rows[1].empty()) {
    throw Error(ErrorKind::InvalidInput, "both clusters must be non-empty");
  }
  const Eigen::Vector3d median0 = robust_median(marked.rgb, rows[0]);
  const Eigen::Vector3d median1 = robust_median(marked.rgb, rows[1]);
  const double mean0 = median0.mean();
  const double mean1 = median1.mean();

  int lit = 0;
  if (mean1 > mean0) {
    lit = 1;
  } else if (mean1 == mean0 && rows[1].size() > rows[0].size()) {
    lit = 1;
  }
  LitShadowPair pair;
  pair.lit_label = lit;
  pair.lit_rgb = lit == 0 ? median0 : median1;
  pair.shadow_rgb = lit == 0 ? median1 : median0;
  pair.lit_count = static_cast<Index>(rows[lit].size());
  pair.shadow_count = static_cast<Index>(rows[1 - lit].size());
  return pair;
}

std::uint64_t seed_from_coords(const Coords & coords)
{
  std::vector<std::pair<long long, long long>> keys(static_cast<size_t>(coords.rows()));
  for (Index i = 0; i < coords.rows(); ++i) {
    keys[static_cast<size_t>(i)] = {std::llround(coords(i, 1)), std::llround(coords(i, 0))};
  }
  std::sort(keys.begin(), keys.end());
  // FNV-1a over the sorted (y, x) pairs.
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&hash](long long v) {
    auto u = static_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      hash ^= (u >> (8 * b)) & 0xffU;
      hash *= 0x100000001b3ULL;
    }
  };
  for (const auto & [y, x] : keys) {
    mix(y);
    mix(x);
  }
  return hash;
}

MarkAnalysis analyze_mark(const MarkedPixels & marked, std::uint64_t seed)
{
  MarkAnalysis out;
  out.pixels = canonical_order(marked);
  const FeatureMatrix features = build_features(out.pixels);
  out.labels = kmeanspp_2(features, seed);
  out.pair = extract_lit_shadow(out.pixels, out.labels);
  return out;
}

}  // namespace iiv
