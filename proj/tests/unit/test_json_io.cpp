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

#include <filesystem>
#include <fstream>

#include "iiv/error.hpp"
#include "iiv/json_io.hpp"

using nlohmann::json;

namespace
{

iiv::ErrorKind parse_error(const json & j)
{
  try {
    iiv::stroke_from_json(j);
  } catch (const iiv::Error & e) {
    return e.kind();
  }
  return iiv::ErrorKind::Io;
}

}  // namespace

TEST_CASE("stroke JSON")
{
  const json j = json::parse(R"({"mode": "erase", "radius": 4.5, "points": [[1, 2], [3.5, 4]]})");
  const iiv::Stroke s = iiv::stroke_from_json(j);
  CHECK(s.mode == iiv::StrokeMode::Erase);
  CHECK(s.radius == 4.5);
  REQUIRE(s.points.size() == 2);
  CHECK(s.points[1].x == 3.5);
  CHECK(s.points[1].y == 4.0);
  CHECK(iiv::stroke_to_json(s) == j);

  CHECK(parse_error(json::array()) == iiv::ErrorKind::InvalidStroke);
  CHECK(parse_error(json::parse(R"({"mode": "paint", "radius": 1, "points": [[0, 0]]})")) ==
        iiv::ErrorKind::InvalidStroke);
  CHECK(parse_error(json::parse(R"({"mode": "draw", "radius": "1", "points": [[0, 0]]})")) ==
        iiv::ErrorKind::InvalidStroke);
  CHECK(parse_error(json::parse(R"({"mode": "draw", "radius": 1, "points": []})")) ==
        iiv::ErrorKind::InvalidStroke);
  CHECK(parse_error(json::parse(R"({"mode": "draw", "radius": 1, "points": [[0]]})")) ==
        iiv::ErrorKind::InvalidStroke);
  CHECK(parse_error(json::parse(R"({"radius": 1, "points": [[0, 0]]})")) == iiv::ErrorKind::InvalidStroke);
}

TEST_CASE("stroke files and replay")
{
  const std::vector<iiv::Stroke> strokes{
    {{{5, 5}, {25, 5}}, 3.0, iiv::StrokeMode::Draw},
    {{{15, 5}}, 2.0, iiv::StrokeMode::Erase},
  };
  const json j = iiv::strokes_to_json(strokes);
  const auto back = iiv::strokes_from_json(j);
  REQUIRE(back.size() == 2);
  CHECK(iiv::strokes_to_json(back) == j);

  const auto path = std::filesystem::temp_directory_path() / "iiv_test_strokes.json";
  {
    std::ofstream out(path);
    out << j.dump(2);
  }
  const auto loaded = iiv::load_strokes(path);
  const iiv::MarkMask mask = iiv::replay_strokes(loaded, 32, 12);
  iiv::MarkMask expected(32, 12);
  for (const auto & s : strokes) {
    expected = iiv::apply_stroke(expected, s);
  }
  CHECK(mask == expected);
  CHECK_FALSE(mask.bits(5, 15));
  CHECK(mask.bits(5, 5));

  {
    std::ofstream out(path);
    out << "{\"strokes\": [";
  }
  CHECK_THROWS_AS(iiv::load_strokes(path), iiv::Error);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(iiv::strokes_from_json(json::parse("[]")), iiv::Error);
  // radius beyond half the short side
  CHECK_THROWS_AS(iiv::replay_strokes({{{{1, 1}}, 7.0, iiv::StrokeMode::Draw}}, 32, 12), iiv::Error);
}

TEST_CASE("estimate JSON")
{
  iiv::IlluminationEstimate est;
  est.c_lit = {0.5, 0.25};
  est.c_shadow = {0.1, -0.2};
  est.p_illum = {0.6, 0.8};
  est.p_invariant = {-0.8, 0.6};
  const json j = iiv::estimate_to_json(est, 2);
  CHECK(j["p_illum"] == json::array({0.6, 0.8}));
  CHECK(j["p_invariant"] == json::array({-0.8, 0.6}));
  CHECK(j["c_lit"] == json::array({0.5, 0.25}));
  CHECK(j["c_shadow"][1] == -0.2);
  CHECK(j["marks"] == 2);
}
