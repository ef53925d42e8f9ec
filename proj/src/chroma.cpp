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

#include "iiv/chroma.hpp"

#include "iiv/parallel.hpp"

namespace iiv
{

ChromaImage image_to_chroma(const RgbImage & image, const PlaneBasis<double> & basis)
{
  ChromaImage chroma(image.width, image.height);
  const Eigen::Matrix<double, 3, 2> projection = basis.matrix();
  parallel_for(image.size(), [&](Index begin, Index end) {
    const Index n = end - begin;
    Eigen::Array<double, Eigen::Dynamic, 3, Eigen::RowMajor> logs =
      image.pixels.middleRows(begin, n).max(kChromaEpsilon).log();
    logs.colwise() -= logs.rowwise().mean();
    chroma.pixels.middleRows(begin, n) = (logs.matrix() * projection).array();
  });
  return chroma;
}

}  // namespace iiv
