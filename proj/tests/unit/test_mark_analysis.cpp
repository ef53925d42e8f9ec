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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "iiv/error.hpp"
#include "iiv/mark_analysis.hpp"
#include "synthetic_scene.hpp"

using iiv::FeatureMatrix;
using iiv::Index;
using iiv::MarkedPixels;
using Coords = Eigen::Matrix<double, Eigen::Dynamic, 2>;

namespace
{

MarkedPixels to_marked(const iiv::testing::TwoPopulationMark & mark)
{
  MarkedPixels m;
  m.coords.resize(static_cast<Index>(mark.coords.size()), 2);
  m.rgb.resize(static_cast<Index>(mark.rgb.size()), 3);
  for (size_t i = 0; i < mark.coords.size(); ++i) {
    m.coords.row(Index(i)) = mark.coords[i].transpose();
    m.rgb.row(Index(i)) = mark.rgb[i].transpose();
  }
  return m;
}

// Closed-form leading eigenvector of a symmetric 2x2 matrix.
Eigen::Vector2d closed_form_major_axis(double a, double b, double c)
{
  const double lambda = 0.5 * (a + c) + std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  Eigen::Vector2d v = std::abs(b) > 1e-15 ? Eigen::Vector2d(b, lambda - a)
                      : (a >= c ? Eigen::Vector2d(1, 0) : Eigen::Vector2d(0, 1));
  return v.normalized();
}

FeatureMatrix two_blobs(std::mt19937_64 & rng, int per_blob)
{
  std::normal_distribution<double> noise(0.0, 0.03);
  FeatureMatrix f(2 * per_blob, 4);
  for (int i = 0; i < 2 * per_blob; ++i) {
    const double c = i < per_blob ? 0.2 : 0.8;
    for (int j = 0; j < 4; ++j) {
      f(i, j) = std::clamp(c + noise(rng), 0.0, 1.0);
    }
  }
  return f;
}

bool separates(const std::vector<int> & labels, int per_blob)
{
  for (int i = 0; i < 2 * per_blob; ++i) {
    if (labels[size_t(i)] != labels[i < per_blob ? 0 : size_t(per_blob)]) {
      return false;
    }
  }
  return labels[0] != labels[size_t(per_blob)];
}

}  // namespace

TEST_CASE("pca_first_score")
{
  SUBCASE("collinear points")
  {
    Coords c(3, 2);
    c << 0, 0, 1, 0, 2, 0;
    const Eigen::VectorXd s = iiv::pca_first_score(c);
    CHECK(s[0] == doctest::Approx(0.0));
    CHECK(s[1] == doctest::Approx(0.5));
    CHECK(s[2] == doctest::Approx(1.0));
  }
  SUBCASE("diagonal cloud against the closed-form eigenvector")
  {
    Coords c(4, 2);
    c << 0, 0, 1, 1, 2, 2, 0.1, 0;
    const Coords centered = c.rowwise() - c.colwise().mean();
    const Eigen::Matrix2d cov = centered.transpose() * centered / 3.0;
    Eigen::Vector2d axis = closed_form_major_axis(cov(0, 0), cov(0, 1), cov(1, 1));
    if (axis[std::abs(axis.x()) >= std::abs(axis.y()) ? 0 : 1] < 0) {
      axis = -axis;
    }
    // numpy.linalg.eigh gives (0.69762953, 0.71645868)
    CHECK(axis.x() == doctest::Approx(0.69762953).epsilon(1e-7));
    CHECK(axis.y() == doctest::Approx(0.71645868).epsilon(1e-7));

    Eigen::VectorXd expected = centered * axis;
    expected = (expected.array() - expected.minCoeff()) / (expected.maxCoeff() - expected.minCoeff());
    const Eigen::VectorXd s = iiv::pca_first_score(c);
    CHECK((s - expected).norm() < 1e-12);
    CHECK(s[3] == doctest::Approx(0.02466712).epsilon(1e-6));
    CHECK(s[1] == doctest::Approx(0.5));
  }
  SUBCASE("orientation: larger-magnitude axis component is positive")
  {
    Coords c(3, 2);
    c << 5, 9, 5, 4, 5, 0;  // vertical, listed top-down
    const Eigen::VectorXd s = iiv::pca_first_score(c);
    CHECK(s[0] == doctest::Approx(1.0));
    CHECK(s[2] == doctest::Approx(0.0));
  }
  SUBCASE("normalization contract on random clouds")
  {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int trial = 0; trial < 100; ++trial) {
      Coords c(25, 2);
      for (Index i = 0; i < 25; ++i) {
        c.row(i) << u(rng), 0.3 * u(rng);
      }
      const Eigen::VectorXd s = iiv::pca_first_score(c);
      CHECK(s.minCoeff() == 0.0);
      CHECK(s.maxCoeff() == 1.0);
    }
  }
  SUBCASE("identical points")
  {
    Coords c(5, 2);
    c.rowwise() = Eigen::RowVector2d(3, 3);
    try {
      iiv::pca_first_score(c);
      FAIL("expected DegenerateMark");
    } catch (const iiv::Error & e) {
      CHECK(e.kind() == iiv::ErrorKind::DegenerateMark);
    }
  }
}

TEST_CASE("build_features")
{
  SUBCASE("intensity span maps to [0,1] jointly")
  {
    MarkedPixels m;
    m.coords.resize(3, 2);
    m.coords << 0, 0, 1, 0, 2, 0;
    m.rgb.resize(3, 3);
    m.rgb << 0.2, 0.3, 0.4, 0.5, 0.5, 0.5, 0.8, 0.6, 0.7;
    const FeatureMatrix f = iiv::build_features(m);
    CHECK(f.leftCols<3>().minCoeff() == doctest::Approx(0.0));
    CHECK(f.leftCols<3>().maxCoeff() == doctest::Approx(1.0));
    // one scale for all channels: (0.3 - 0.2) / 0.6
    CHECK(f(0, 1) == doctest::Approx(1.0 / 6.0));
    CHECK(f(0, 3) == doctest::Approx(0.0));
    CHECK(f(2, 3) == doctest::Approx(1.0));
  }
  SUBCASE("two-pixel mark gives opposite corners")
  {
    MarkedPixels m;
    m.coords.resize(2, 2);
    m.coords << 0, 0, 4, 3;
    m.rgb.resize(2, 3);
    m.rgb << 0.1, 0.1, 0.1, 0.9, 0.9, 0.9;
    const FeatureMatrix f = iiv::build_features(m);
    CHECK(f.row(0).norm() == doctest::Approx(0.0));
    CHECK((f.row(1).array() - 1.0).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("bimodal columns for a half-dark half-bright mark")
  {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> jitter(-0.01, 0.01);
    MarkedPixels m;
    m.coords.resize(100, 2);
    m.rgb.resize(100, 3);
    for (Index i = 0; i < 100; ++i) {
      m.coords.row(i) << double(i % 10), double(i / 10);
      const double base = i < 50 ? 0.1 : 0.7;
      m.rgb.row(i) << base + jitter(rng), base + jitter(rng), base + jitter(rng);
    }
    const FeatureMatrix f = iiv::build_features(m);
    CHECK(f.minCoeff() >= 0.0);
    CHECK(f.maxCoeff() <= 1.0);
    for (int c = 0; c < 3; ++c) {
      const Index low = (f.col(c).array() < 0.1).count();
      const Index high = (f.col(c).array() > 0.9).count();
      CHECK(low == 50);
      CHECK(high == 50);
    }
  }
  SUBCASE("flat color")
  {
    MarkedPixels m;
    m.coords.resize(3, 2);
    m.coords << 0, 0, 1, 0, 2, 1;
    m.rgb = Eigen::Matrix<double, Eigen::Dynamic, 3>::Constant(3, 3, 0.4);
    try {
      iiv::build_features(m);
      FAIL("expected FlatMark");
    } catch (const iiv::Error & e) {
      CHECK(e.kind() == iiv::ErrorKind::FlatMark);
    }
  }
}

TEST_CASE("kmeanspp_2")
{
  SUBCASE("well separated blobs split perfectly for every seed")
  {
    std::mt19937_64 rng(4);
    const FeatureMatrix f = two_blobs(rng, 50);
    for (std::uint64_t seed = 0; seed <= 100; ++seed) {
      CHECK(separates(iiv::kmeanspp_2(f, seed), 50));
    }
  }
  SUBCASE("two rows are their own clusters")
  {
    FeatureMatrix f(2, 4);
    f << 0, 0, 0, 0, 1, 1, 1, 1;
    const auto labels = iiv::kmeanspp_2(f, 9);
    CHECK(labels[0] != labels[1]);
  }
  SUBCASE("duplicating every row keeps the partition")
  {
    std::mt19937_64 rng(6);
    const FeatureMatrix f = two_blobs(rng, 20);
    FeatureMatrix doubled(80, 4);
    doubled << f, f;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto a = iiv::kmeanspp_2(f, seed);
      const auto b = iiv::kmeanspp_2(doubled, seed);
      bool same = true;
      for (int i = 0; i < 40; ++i) {
        for (int j = 0; j < 40; ++j) {
          same = same && ((a[size_t(i)] == a[size_t(j)]) == (b[size_t(i)] == b[size_t(j)]));
          same = same && (b[size_t(i)] == b[size_t(i + 40)]);
        }
      }
      CHECK(same);
    }
  }
  SUBCASE("fewer than two distinct rows")
  {
    const FeatureMatrix f = FeatureMatrix::Constant(10, 4, 0.5);
    CHECK_THROWS_AS(iiv::kmeanspp_2(f, 0), iiv::Error);
  }
  SUBCASE("objective never increases across Lloyd iterations")
  {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      FeatureMatrix f(60, 4);
      for (Index i = 0; i < 60; ++i) {
        for (int j = 0; j < 4; ++j) {
          f(i, j) = u(rng);
        }
      }
      const auto run = iiv::kmeans_run(f, std::uint64_t(trial));
      CHECK(run.iterations <= iiv::kKMeansMaxIterations);
      for (size_t k = 1; k < run.objective_history.size(); ++k) {
        CHECK(run.objective_history[k] <= run.objective_history[k - 1] + 1e-12);
      }
    }
  }
  SUBCASE("deterministic for a fixed seed")
  {
    std::mt19937_64 rng(12);
    const FeatureMatrix f = two_blobs(rng, 30);
    CHECK(iiv::kmeanspp_2(f, 77) == iiv::kmeanspp_2(f, 77));
  }
}

TEST_CASE("extract_lit_shadow")
{
  SUBCASE("bright outlier does not move the median")
  {
    MarkedPixels m;
    m.coords = Coords::Zero(20, 2);
    m.rgb.resize(20, 3);
    std::vector<int> labels(20);
    for (Index i = 0; i < 10; ++i) {
      m.rgb.row(i).setConstant(i == 9 ? 0.9 : 0.1);
      labels[size_t(i)] = 0;
    }
    for (Index i = 10; i < 20; ++i) {
      m.rgb.row(i).setConstant(0.95);
      labels[size_t(i)] = 1;
    }
    const auto pair = iiv::extract_lit_shadow(m, labels);
    CHECK((pair.shadow_rgb - Eigen::Vector3d::Constant(0.1)).norm() < 1e-15);
    CHECK(pair.lit_label == 1);
    CHECK(pair.shadow_count == 10);
  }
  SUBCASE("labels follow the lower mean")
  {
    MarkedPixels m;
    m.coords = Coords::Zero(4, 2);
    m.rgb.resize(4, 3);
    m.rgb << 0.7, 0.7, 0.7, 0.7, 0.7, 0.7, 0.2, 0.2, 0.2, 0.2, 0.2, 0.2;
    const auto pair = iiv::extract_lit_shadow(m, {0, 0, 1, 1});
    CHECK(pair.lit_rgb.mean() == doctest::Approx(0.7));
    CHECK(pair.shadow_rgb.mean() == doctest::Approx(0.2));
    const auto swapped = iiv::extract_lit_shadow(m, {1, 1, 0, 0});
    CHECK(swapped.lit_rgb.mean() == doctest::Approx(0.7));
    CHECK(swapped.lit_label == 1);
  }
  SUBCASE("equal means: larger cluster is lit")
  {
    MarkedPixels m;
    m.coords = Coords::Zero(5, 2);
    m.rgb.resize(5, 3);
    m.rgb = Eigen::Matrix<double, Eigen::Dynamic, 3>::Constant(5, 3, 0.4);
    const auto pair = iiv::extract_lit_shadow(m, {0, 0, 1, 1, 1});
    CHECK(pair.lit_label == 1);
    CHECK(pair.lit_count == 3);
  }
  SUBCASE("missing cluster is rejected")
  {
    MarkedPixels m;
    m.coords = Coords::Zero(3, 2);
    m.rgb = Eigen::Matrix<double, Eigen::Dynamic, 3>::Constant(3, 3, 0.2);
    CHECK_THROWS_AS(iiv::extract_lit_shadow(m, {0, 0, 0}), iiv::Error);
  }
  SUBCASE("noisy two-population mark recovers generation truth")
  {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto mark = iiv::testing::make_two_population_mark(seed, 400, 0.6, 0.25, 0.02, 0.05);
      const MarkedPixels m = to_marked(mark);
      const auto analysis = iiv::analyze_mark(m, iiv::seed_from_coords(m.coords));
      CHECK((analysis.pair.lit_rgb.array() - 0.6).abs().maxCoeff() < 0.02);
      CHECK((analysis.pair.shadow_rgb.array() - 0.25).abs().maxCoeff() < 0.02);
      CHECK(analysis.pair.lit_rgb.mean() >= analysis.pair.shadow_rgb.mean());
    }
  }
}

TEST_CASE("analysis ignores pixel order")
{
  std::mt19937_64 rng(31);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto mark = iiv::testing::make_two_population_mark(100 + seed, 300, 0.55, 0.3, 0.03, 0.05);
    const MarkedPixels m = to_marked(mark);
    std::vector<Index> order(size_t(m.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    MarkedPixels shuffled;
    shuffled.coords.resize(m.size(), 2);
    shuffled.rgb.resize(m.size(), 3);
    for (Index i = 0; i < m.size(); ++i) {
      shuffled.coords.row(i) = m.coords.row(order[size_t(i)]);
      shuffled.rgb.row(i) = m.rgb.row(order[size_t(i)]);
    }
    CHECK(iiv::seed_from_coords(m.coords) == iiv::seed_from_coords(shuffled.coords));
    const auto a = iiv::analyze_mark(m, iiv::seed_from_coords(m.coords));
    const auto b = iiv::analyze_mark(shuffled, iiv::seed_from_coords(shuffled.coords));
    CHECK((a.pair.lit_rgb - b.pair.lit_rgb).norm() <= 1e-12);
    CHECK((a.pair.shadow_rgb - b.pair.shadow_rgb).norm() <= 1e-12);
  }
}
