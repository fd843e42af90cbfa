// Copyright 2026 The docmask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "docmask/cli.hpp"

using namespace docmask;

namespace {

int dispatch(std::vector<std::string> args) {
  std::vector<const char*> argv{"docmask"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return cmd_dispatch(static_cast<int>(argv.size()), argv.data());
}

std::filesystem::path temp_dir(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("render_overlay layout contract") {
  Rng rng(3);
  Raster page(20, 14);
  for (auto& v : page.data) v = static_cast<uint8_t>(rng.below(256));
  ProbMap heat(20, 14);  // all zero
  BinaryMap mask(20, 14);
  const Raster overlay = render_overlay(page, heat, mask);
  CHECK(overlay.width == 3 * 20 + 2);
  CHECK(overlay.height == 14);
  // middle panel black, right panel uniform fill
  for (int y = 0; y < 14; ++y)
    for (int x = 0; x < 20; ++x) {
      CHECK(overlay.at(x, y) == page.at(x, y));
      CHECK(overlay.at(21 + x, y) == 0);
      CHECK(overlay.at(42 + x, y) == 255);
    }
  const Raster again = render_overlay(page, heat, mask);
  CHECK(again == overlay);

  ProbMap wrong(8, 8);
  CHECK_THROWS_AS(render_overlay(page, wrong, mask), std::invalid_argument);
}

TEST_CASE("unknown subcommands and flags exit with usage errors") {
  CHECK(dispatch({"frobnicate"}) == 1);
  CHECK(dispatch({"synth", "--no-such-flag"}) == 1);
  CHECK(dispatch({}) == 1);
}

TEST_CASE("strict config parsing fails before any work starts") {
  const auto dir = temp_dir("docmask_cfg");
  const std::string path = (dir / "cfg.json").string();
  {
    std::ofstream f(path);
    f << R"({"synth": {"doc_sise": 256}})";
  }
  CHECK(dispatch({"--config", path, "synth", "--n", "1"}) == 2);

  {
    std::ofstream f(path);
    f << R"({"masque": {}})";
  }
  CHECK(dispatch({"--config", path, "synth", "--n", "1"}) == 2);

  {
    std::ofstream f(path);
    f << R"({"mask": {"threshold": 0.6}, "eval": {"denominator": "gt_only"}})";
  }
  const ToolConfig cfg = load_tool_config(path);
  CHECK(cfg.mask.threshold == 0.6);
  CHECK(cfg.eval.denominator == EsDenominator::GtOnly);
  std::filesystem::remove_all(dir);
}

TEST_CASE("synth subcommand writes the dataset and is deterministic") {
  const auto dir = temp_dir("docmask_cli_synth");
  const auto cfg_path = dir / "cfg.json";
  {
    std::ofstream f(cfg_path);
    f << R"({"synth": {"doc_size": 96, "font_size_range": [9, 14],
             "tiles_per_doc_range": [1, 2]}})";
  }
  const std::string out1 = (dir / "a").string(), out2 = (dir / "b").string();
  REQUIRE(dispatch({"--config", cfg_path.string(), "synth", "--n", "3",
                    "--seed", "7", "--out", out1}) == 0);
  REQUIRE(dispatch({"--config", cfg_path.string(), "synth", "--n", "3",
                    "--seed", "7", "--out", out2}) == 0);
  for (const char* name :
       {"img_000000.pgm", "gt_000001.pgm", "ann_000002.json", "manifest.json"})
    CHECK(sha256_file_hex((std::filesystem::path(out1) / name).string()) ==
          sha256_file_hex((std::filesystem::path(out2) / name).string()));
  CHECK(std::filesystem::exists(std::filesystem::path(out1) / "img_000002.pgm"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("eval subcommand scores identity predictions at 1.0") {
  const auto dir = temp_dir("docmask_cli_eval");
  const std::string tsv = (dir / "pred.tsv").string();
  const std::string gt = (dir / "gt.txt").string();
  {
    std::ofstream f(tsv);
    f << "5\t10\t10\t30\t12\t95\thello\n5\t50\t10\t20\t12\t90\tworld\n";
  }
  {
    std::ofstream f(gt);
    f << "10,10,40,10,40,22,10,22,HELLO\n50,10,70,10,70,22,50,22,WORLD\n";
  }
  const std::string report = (dir / "report.json").string();
  REQUIRE(dispatch({"eval", "--pred", tsv, "--gt", gt, "--out", report}) == 0);
  const EvalReport r = read_report(report);
  CHECK(r.f1 == 1.0);
  CHECK(r.mean_edit_score == 1.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("fonts subcommand exports loadable faces") {
  const auto dir = temp_dir("docmask_cli_fonts");
  REQUIRE(dispatch({"fonts", "--export", dir.string()}) == 0);
  FontLibrary lib;
  load_font_dir(lib, dir.string());
  CHECK(lib.faces.size() >= 10);
  std::filesystem::remove_all(dir);
}

TEST_CASE("ocr subcommand emits parseable tsv via the reference engine") {
  const auto dir = temp_dir("docmask_cli_ocr");
  const FontLibrary lib = embedded_fonts();
  const TextTile tile = render_text_tile("cash 99", lib.faces[0], 22, 3);
  const std::string page = (dir / "page.pgm").string();
  write_pgm(tile.image, page);
  const std::string out = (dir / "words.tsv").string();
  REQUIRE(dispatch({"ocr", "--in", page, "--out", out}) == 0);
  const auto words = read_tsv(out);
  CHECK(words.size() >= 1);
  std::filesystem::remove_all(dir);
}
