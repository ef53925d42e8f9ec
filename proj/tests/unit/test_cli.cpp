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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "iiv/image_io.hpp"
#include "synthetic_scene.hpp"

namespace fs = std::filesystem;

namespace
{

struct Workdir
{
  fs::path root = fs::temp_directory_path() / "iiv_test_cli";
  Workdir() { fs::create_directories(root); }
  ~Workdir() { fs::remove_all(root); }
  std::string operator/(const std::string & name) const { return (root / name).string(); }
};

int run(const std::string & args)
{
  const std::string cmd = std::string(IIV_CLI_PATH) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_text(const std::string & path, const std::string & text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("iiv derive")
{
  Workdir dir;
  iiv::testing::SceneParams params;
  params.width = 96;
  params.height = 96;
  const auto scene = iiv::testing::make_scene(params);
  iiv::write_file(dir / "scene.png", iiv::encode_png_rgb16(scene.image));
  iiv::save_mask(dir / "mask.png", scene.mark);

  const std::string outs = " --out-1d " + (dir / "gray.png") + " --out-chroma " + (dir / "l1.png");
  REQUIRE(run("derive --linear --image " + (dir / "scene.png") + " --mask " + (dir / "mask.png") + outs +
              " --dump-estimate " + (dir / "est.json")) == 0);
  const iiv::RgbImage gray = iiv::load_image(dir / "gray.png", iiv::LoadOptions::linear());
  CHECK(gray.width == 96);
  CHECK(gray.pixels.minCoeff() == 0.0);
  CHECK(gray.pixels.maxCoeff() == 1.0);
  CHECK(fs::exists(dir / "l1.png"));

  std::ifstream in(dir / "est.json");
  const auto est = nlohmann::json::parse(in);
  const Eigen::Vector2d p(est["p_illum"][0].get<double>(), est["p_illum"][1].get<double>());
  CHECK(std::abs(std::abs(p.dot(scene.direction)) - 1.0) < 1e-6);
  CHECK(est["marks"] == 1);

  SUBCASE("strokes input and deterministic output")
  {
    write_text(dir / "strokes.json",
               R"({"strokes": [{"mode": "draw", "radius": 6, "points": [[16, 20], [16, 76]]}]})");
    const std::string a = " --out-1d " + (dir / "a.png") + " --out-chroma " + (dir / "a_l1.png");
    const std::string b = " --out-1d " + (dir / "b.png") + " --out-chroma " + (dir / "b_l1.png");
    const std::string in_args = "derive --linear --image " + (dir / "scene.png") + " --strokes " + (dir / "strokes.json");
    REQUIRE(run(in_args + a) == 0);
    REQUIRE(run(in_args + b + " --threads 3") == 0);
    CHECK(iiv::read_file(dir / "a.png") == iiv::read_file(dir / "b.png"));
    CHECK(iiv::read_file(dir / "a_l1.png") == iiv::read_file(dir / "b_l1.png"));
  }
  SUBCASE("guidance errors exit 3")
  {
    iiv::save_mask(dir / "empty.png", iiv::MarkMask(96, 96));
    CHECK(run("derive --image " + (dir / "scene.png") + " --mask " + (dir / "empty.png") + outs) == 3);
    iiv::MarkMask flat(96, 96);
    flat.bits.block(2, 2, 8, 8).setConstant(true);
    iiv::save_mask(dir / "flat.png", flat);
    CHECK(run("derive --image " + (dir / "scene.png") + " --mask " + (dir / "flat.png") + outs) == 3);
  }
  SUBCASE("input errors exit 2")
  {
    CHECK(run("derive --image " + (dir / "missing.png") + " --mask " + (dir / "mask.png") + outs) == 2);
    CHECK(run("derive --image " + (dir / "scene.png") + outs) == 2);
    CHECK(run("derive --image " + (dir / "scene.png") + " --mask " + (dir / "mask.png") + " --strokes x" + outs) ==
          2);
    CHECK(run("derive --image " + (dir / "scene.png") + " --mask " + (dir / "mask.png") + " --gamma -1" + outs) ==
          2);
    iiv::save_mask(dir / "small.png", iiv::MarkMask(10, 10));
    CHECK(run("derive --image " + (dir / "scene.png") + " --mask " + (dir / "small.png") + outs) == 2);
    write_text(dir / "bad.json", R"({"strokes": [{"mode": "draw", "radius": 100, "points": [[1, 1]]}]})");
    CHECK(run("derive --image " + (dir / "scene.png") + " --strokes " + (dir / "bad.json") + outs) == 2);
    CHECK(run("frobnicate") == 2);
  }
}

TEST_CASE("iiv mask")
{
  Workdir dir;
  write_text(dir / "strokes.json",
             R"({"strokes": [{"mode": "draw", "radius": 1.5, "points": [[2, 5], [7, 5]]}]})");
  REQUIRE(run("mask --width 10 --height 10 --strokes " + (dir / "strokes.json") + " --out " + (dir / "m.png")) == 0);
  CHECK(iiv::load_mask(dir / "m.png").count() == 24);
  CHECK(run("mask --width 0 --height 10 --strokes " + (dir / "strokes.json") + " --out " + (dir / "m.png")) == 2);
}
