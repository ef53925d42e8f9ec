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

#ifndef IIV__CHROMA_HPP_
#define IIV__CHROMA_HPP_

#include <cmath>

#include <Eigen/Core>

#include "iiv/image.hpp"

namespace iiv
{

/// Channels below this are clamped before taking logs (one 8-bit step).
inline constexpr double kChromaEpsilon = 1.0 / 255.0;

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

/// 3D log geometric-mean chromaticity: (log R/mu, log G/mu, log B/mu), mu = (RGB)^(1/3).
/// Components always sum to zero.
template <typename Scalar>
using LogChroma3 = Vec3<Scalar>;

/// Orthonormal basis of the plane orthogonal to (1,1,1).
template <typename Scalar>
struct PlaneBasis
{
  Vec3<Scalar> u1;
  Vec3<Scalar> u2;

  /// u1 = (1,-1,0)/sqrt2, u2 = (1,1,-2)/sqrt6.
  static PlaneBasis standard()
  {
    using std::sqrt;
    const Scalar s2 = sqrt(Scalar(2));
    const Scalar s6 = sqrt(Scalar(6));
    return {Vec3<Scalar>(1 / s2, -1 / s2, 0), Vec3<Scalar>(1 / s6, 1 / s6, -2 / s6)};
  }

  /// 3x2 matrix [u1 u2]; log chroma rows times this give plane coordinates.
  Eigen::Matrix<Scalar, 3, 2> matrix() const
  {
    Eigen::Matrix<Scalar, 3, 2> m;
    m << u1, u2;
    return m;
  }
};

template <typename Derived>
LogChroma3<typename Derived::Scalar> rgb_to_log_chroma3(const Eigen::DenseBase<Derived> & rgb)
{
  using Scalar = typename Derived::Scalar;
  const Vec3<Scalar> logs =
    rgb.derived().template cast<Scalar>().array().max(Scalar(kChromaEpsilon)).log().matrix();
  // log(c / mu) = log c - mean(log c)
  return (logs.array() - logs.mean()).matrix();
}

template <typename Scalar>
Vec2<Scalar> log_chroma3_to_chroma2(const LogChroma3<Scalar> & rho, const PlaneBasis<Scalar> & basis)
{
  return Vec2<Scalar>(basis.u1.dot(rho), basis.u2.dot(rho));
}

template <typename Scalar>
LogChroma3<Scalar> chroma2_to_log_chroma3(const Vec2<Scalar> & chi, const PlaneBasis<Scalar> & basis)
{
  return chi.x() * basis.u1 + chi.y() * basis.u2;
}

/// Convenience composition for single pixels (e.g. lit/shadow medians).
template <typename Derived>
Vec2<typename Derived::Scalar> rgb_to_chroma2(
  const Eigen::DenseBase<Derived> & rgb,
  const PlaneBasis<typename Derived::Scalar> & basis =
    PlaneBasis<typename Derived::Scalar>::standard())
{
  return log_chroma3_to_chroma2(rgb_to_log_chroma3(rgb), basis);
}

/// Per-pixel rgb_to_log_chroma3 followed by log_chroma3_to_chroma2.
ChromaImage image_to_chroma(
  const RgbImage & image, const PlaneBasis<double> & basis = PlaneBasis<double>::standard());

}  // namespace iiv

#endif  // IIV__CHROMA_HPP_
