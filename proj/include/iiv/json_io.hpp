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

#ifndef IIV__JSON_IO_HPP_
#define IIV__JSON_IO_HPP_

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "iiv/invariant.hpp"
#include "iiv/mask.hpp"

namespace iiv
{

// Stroke exchange format:
//   {"strokes": [{"mode": "draw"|"erase", "radius": 8.0, "points": [[x, y], ...]}, ...]}
// A single stroke is the inner object on its own.

/// Throws Error(InvalidStroke) on schema violations.
Stroke stroke_from_json(const nlohmann::json & j);
nlohmann::json stroke_to_json(const Stroke & stroke);

std::vector<Stroke> strokes_from_json(const nlohmann::json & j);
nlohmann::json strokes_to_json(const std::vector<Stroke> & strokes);
std::vector<Stroke> load_strokes(const std::filesystem::path & path);

/// Validates each stroke against the canvas and applies them in order to an empty mask.
MarkMask replay_strokes(const std::vector<Stroke> & strokes, Index width, Index height);

/// {"c_lit", "c_shadow", "p_illum", "p_invariant", "marks"}.
nlohmann::json estimate_to_json(const IlluminationEstimate & estimate, size_t marks);

}  // namespace iiv

#endif  // IIV__JSON_IO_HPP_
