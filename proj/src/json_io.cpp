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

#include "iiv/json_io.hpp"

#include <fstream>

#include "iiv/error.hpp"

namespace iiv
{

namespace
{

nlohmann::json vec2_json(const Eigen::Vector2d & v) { return nlohmann::json::array({v.x(), v.y()}); }

}  // namespace

Stroke stroke_from_json(const nlohmann::json & j)
{
  if (!j.is_object()) {
    throw Error(ErrorKind::InvalidStroke, "stroke must be a JSON object");
  }
  Stroke stroke;
  const auto mode = j.find("mode");
  if (mode == j.end() || !mode->is_string()) {
    throw Error(ErrorKind::InvalidStroke, "stroke.mode must be \"draw\" or \"erase\"");
  }
  if (*mode == "draw") {
    stroke.mode = StrokeMode::Draw;
  } else if (*mode == "erase") {
    stroke.mode = StrokeMode::Erase;
  } else {
    throw Error(ErrorKind::InvalidStroke, "stroke.mode must be \"draw\" or \"erase\"");
  }
  const auto radius = j.find("radius");
  if (radius == j.end() || !radius->is_number()) {
    throw Error(ErrorKind::InvalidStroke, "stroke.radius must be a number");
  }
  stroke.radius = radius->get<double>();
  const auto points = j.find("points");
  if (points == j.end() || !points->is_array()) {
    throw Error(ErrorKind::InvalidStroke, "stroke.points must be an array of [x, y]");
  }
  for (const auto & p : *points) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw Error(ErrorKind::InvalidStroke, "stroke.points must be an array of [x, y]");
    }
    stroke.points.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  if (stroke.points.empty()) {
    throw Error(ErrorKind::InvalidStroke, "stroke has no points");
  }
  return stroke;
}

nlohmann::json stroke_to_json(const Stroke & stroke)
{
  nlohmann::json points = nlohmann::json::array();
  for (const auto & p : stroke.points) {
    points.push_back({p.x, p.y});
  }
  return {
    {"mode", stroke.mode == StrokeMode::Draw ? "draw" : "erase"},
    {"radius", stroke.radius},
    {"points", std::move(points)}};
}

std::vector<Stroke> strokes_from_json(const nlohmann::json & j)
{
  if (!j.is_object() || !j.contains("strokes") || !j["strokes"].is_array()) {
    throw Error(ErrorKind::InvalidStroke, "expected {\"strokes\": [...]}");
  }
  std::vector<Stroke> strokes;
  for (const auto & s : j["strokes"]) {
    strokes.push_back(stroke_from_json(s));
  }
  return strokes;
}

nlohmann::json strokes_to_json(const std::vector<Stroke> & strokes)
{
  nlohmann::json arr = nlohmann::json::array();
  for (const auto & s : strokes) {
    arr.push_back(stroke_to_json(s));
  }
  return {{"strokes", std::move(arr)}};
}

std::vector<Stroke> load_strokes(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception & e) {
    throw Error(ErrorKind::InvalidStroke, std::string("malformed strokes JSON: ") + e.what());
  }
  return strokes_from_json(j);
}

MarkMask replay_strokes(const std::vector<Stroke> & strokes, Index width, Index height)
{
  MarkMask mask(width, height);
  for (const auto & stroke : strokes) {
    validate_stroke(stroke, width, height);
    mask = apply_stroke(mask, stroke);
  }
  return mask;
}

nlohmann::json estimate_to_json(const IlluminationEstimate & estimate, size_t marks)
{
  return {
    {"c_lit", vec2_json(estimate.c_lit)},
    {"c_shadow", vec2_json(estimate.c_shadow)},
    {"p_illum", vec2_json(estimate.p_illum)},
    {"p_invariant", vec2_json(estimate.p_invariant)},
    {"marks", marks}};
}

}  // namespace iiv
