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

#include "docmask/evalkit.hpp"
#include "docmask/ocr.hpp"
#include "docmask/synthgen.hpp"

using namespace docmask;

namespace {

const FontLibrary& fonts() {
  static const FontLibrary lib = embedded_fonts();
  return lib;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower((unsigned char)c));
  return s;
}

}  // namespace

TEST_CASE("tsv row maps straight into an OcrWord") {
  const auto words = parse_tsv("5\t10\t20\t30\t12\t96\tHELLO\n");
  REQUIRE(words.size() == 1);
  CHECK(words[0].text == "HELLO");
  CHECK(words[0].box == Box(10, 20, 40, 32));
  CHECK(words[0].confidence == Catch::Approx(0.96));
}

TEST_CASE("tsv parsing: empty body, header, skipped and bad rows") {
  CHECK(parse_tsv("").empty());
  CHECK(parse_tsv("level\tleft\ttop\twidth\theight\tconf\ttext\n").empty());
  // empty text rows are skipped
  CHECK(parse_tsv("4\t0\t0\t5\t5\t50\t\n").empty());
  // output size never exceeds the row count
  const std::string three =
      "5\t0\t0\t5\t5\t90\ta\n5\t8\t0\t5\t5\t90\t\n5\t16\t0\t5\t5\t90\tb\n";
  CHECK(parse_tsv(three).size() == 2);

  CHECK_THROWS_WITH(parse_tsv("5\t10\tx2\t30\t12\t96\tHELLO\n"),
                    Catch::Matchers::ContainsSubstring("line 1"));
  CHECK_THROWS_WITH(parse_tsv("5\t1\t2\t3\n"),
                    Catch::Matchers::ContainsSubstring("7 tab-separated"));
  // confidences clamp into [0,1] (engines report -1 for layout rows)
  const auto clamped = parse_tsv("5\t0\t0\t5\t5\t-1\tx\n5\t9\t0\t5\t5\t250\ty\n");
  CHECK(clamped[0].confidence == 0.0);
  CHECK(clamped[1].confidence == 1.0);
}

TEST_CASE("tsv serialization round-trips through the parser") {
  std::vector<OcrWord> words{OcrWord("alpha", Box(3, 4, 20, 16), 0.87),
                             OcrWord("42%", Box(30, 4, 52, 16), 0.55)};
  const auto back = parse_tsv(words_to_tsv(words));
  REQUIRE(back.size() == 2);
  for (size_t i = 0; i < 2; ++i) {
    CHECK(back[i].text == words[i].text);
    CHECK(back[i].box == words[i].box);
    CHECK(back[i].confidence == Catch::Approx(words[i].confidence).margin(0.005));
  }
}

TEST_CASE("external engine contract: command template validation") {
  ExternalEngineConfig bad;
  bad.command_template = "ocr {input}";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.command_template = "ocr {input} > {output}";
  CHECK_NOTHROW(bad.validate());
}

TEST_CASE("run_external runs a stub engine via the shell") {
  const auto dir = std::filesystem::temp_directory_path() / "docmask_ext";
  std::filesystem::create_directories(dir);
  const std::string page = (dir / "page.pgm").string();
  write_pgm(Raster(4, 4, 255), page);

  ExternalEngineConfig cfg;
  SECTION("output file route") {
    cfg.command_template =
        "printf '5\\t1\\t2\\t3\\t4\\t80\\tstub\\n' > {output} # {input}";
    const auto words = run_external(cfg, page);
    REQUIRE(words.size() == 1);
    CHECK(words[0].text == "stub");
    CHECK(words[0].box == Box(1, 2, 4, 6));
  }
  SECTION("stdout route") {
    cfg.command_template =
        "printf '5\\t1\\t2\\t3\\t4\\t80\\tviastdout\\n' && true {input} {output}";
    const auto words = run_external(cfg, page);
    REQUIRE(words.size() == 1);
    CHECK(words[0].text == "viastdout");
  }
  SECTION("nonzero exit is reported") {
    cfg.command_template = "true {input} {output} && exit 3";
    CHECK_THROWS_WITH(run_external(cfg, page),
                      Catch::Matchers::ContainsSubstring("code 3"));
  }
  SECTION("timeouts kill the engine") {
    cfg.command_template = "sleep 5 # {input} {output}";
    cfg.timeout_sec = 0.2;
    CHECK_THROWS_WITH(run_external(cfg, page),
                      Catch::Matchers::ContainsSubstring("timed out"));
  }
  SECTION("missing page file") {
    cfg.command_template = "cat {input} > {output}";
    CHECK_THROWS_WITH(run_external(cfg, (dir / "nope.pgm").string()),
                      Catch::Matchers::ContainsSubstring("no such page"));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("reference model building: counts, tightness, determinism") {
  const auto& face = fonts().faces[0];
  const ReferenceModel m = build_reference_model(face, {16}, "AB");
  CHECK(m.templates.size() == 2);
  for (const auto& t : m.templates) {
    REQUIRE(t.w > 0);
    REQUIRE(t.h > 0);
    int64_t mass = 0, first_row = 0, last_row = 0, first_col = 0, last_col = 0;
    for (int y = 0; y < t.h; ++y)
      for (int x = 0; x < t.w; ++x) {
        if (!t.bits[y * t.w + x]) continue;
        ++mass;
        if (y == 0) ++first_row;
        if (y == t.h - 1) ++last_row;
        if (x == 0) ++first_col;
        if (x == t.w - 1) ++last_col;
      }
    CHECK(mass > 0);
    CHECK(first_row > 0);
    CHECK(last_row > 0);
    CHECK(first_col > 0);
    CHECK(last_col > 0);
  }
  const ReferenceModel m2 = build_reference_model(face, {16}, "AB");
  CHECK(m2.templates.size() == m.templates.size());
  for (size_t i = 0; i < m.templates.size(); ++i)
    CHECK(m.templates[i].bits == m2.templates[i].bits);

  CHECK_THROWS_WITH(build_reference_model(face, {16}, std::string("A\x01B")),
                    Catch::Matchers::ContainsSubstring("missing"));
}

TEST_CASE("reference recognizer: blank page and clean closed loop") {
  const auto& face = fonts().faces[0];
  const ReferenceModel model = build_reference_model(face, {24});
  CHECK(reference_recognize(model, Raster(64, 64, 255)).empty());

  // closed loop: a page rendered with the model's own face at the
  // canonical height must come back verbatim
  const TextTile tile = render_text_tile("CAT", face, 24, 5);
  const auto words = reference_recognize(model, tile.image);
  REQUIRE(words.size() == 1);
  CHECK(lower(words[0].text) == "cat");
  CHECK(words[0].confidence > 0.9);
}

TEST_CASE("reference recognizer is deterministic") {
  const auto& face = fonts().faces[0];
  const ReferenceModel model = build_reference_model(face, {18});
  const TextTile tile = render_text_tile("Total 42", face, 18, 6);
  const auto a = reference_recognize(model, tile.image);
  const auto b = reference_recognize(model, tile.image);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].text == b[i].text);
    CHECK(a[i].box == b[i].box);
    CHECK(a[i].confidence == b[i].confidence);
  }
}

TEST_CASE("closed-loop word accuracy on clean pages stays high") {
  // case-insensitive exact-match rate over a mixed batch; mirrors the
  // protocol's case handling
  const auto& face = fonts().faces[0];
  const ReferenceModel model = build_reference_model(face, {20});
  const char* samples[] = {"sum",    "Report", "invoice", "total",
                           "845",    "2021",   "paid",    "net",
                           "amount", "tax",    "due",     "cash"};
  int hits = 0, total = 0;
  uint64_t seed = 1;
  for (const char* text : samples) {
    const TextTile tile = render_text_tile(text, face, 20, seed++);
    const auto words = reference_recognize(model, tile.image);
    ++total;
    if (words.size() == 1 && lower(words[0].text) == lower(text)) ++hits;
  }
  CHECK(hits >= total - 1);  // >= ~95%
}

TEST_CASE("clutter degrades recognition; masking with GT restores it") {
  const auto& face = fonts().faces[0];
  const ReferenceModel model = build_reference_model(face, {20});

  // clean page with one word
  SynthConfig cfg;
  cfg.bg_white = 1.0;
  cfg.bg_natural = cfg.bg_texture = 0.0;
  cfg.noise_speckle = cfg.noise_binarize = cfg.noise_distort = 0.0;
  cfg.doc_blur = cfg.doc_compress = cfg.doc_downsample = 0.0;
  cfg.rotation_range = 0.0;
  cfg.hard_negative_prob = 0.0;
  cfg.doc_size = 160;
  cfg.font_size_min = cfg.font_size_max = 20;
  cfg.tiles_min = cfg.tiles_max = 2;

  const TextSampler corpus;
  int degraded = 0, restored = 0, tried = 0;
  for (uint64_t seed = 1; seed <= 6; ++seed) {
    const DocumentSample clean = compose_document(cfg, fonts(), corpus, seed);
    if (clean.words.empty()) continue;
    // paste hard-negative fragments onto the clean page
    Raster noisy = clean.image;
    Rng rng(seed * 31);
    for (int k = 0; k < 4; ++k) {
      const Raster frag = render_hard_negative_tile(face, 20, rng.next_u64());
      const int ox = 8 + static_cast<int>(rng.below(100));
      const int oy = 100 + static_cast<int>(rng.below(40));
      for (int y = 0; y < frag.height && oy + y < noisy.height; ++y)
        for (int x = 0; x < frag.width && ox + x < noisy.width; ++x) {
          auto& px = noisy.at(ox + x, oy + y);
          px = std::min(px, frag.at(x, y));
        }
    }
    auto eval_es = [&](const Raster& page) {
      const auto words = reference_recognize(model, page);
      std::vector<Box> pb, gb;
      for (const auto& w : words) pb.push_back(w.box);
      for (const auto& w : clean.words) gb.push_back(w.box);
      return edit_score(match_boxes(pb, gb, 0.5), words, clean.words);
    };
    const double es_clean = eval_es(clean.image);
    const double es_noisy = eval_es(noisy);
    // mask with the ground truth: keep only GT pixels (dilated)
    MaskConfig mcfg;
    const Raster masked = apply_mask(noisy, dilate(clean.gt, 2), mcfg);
    const double es_masked = eval_es(masked);
    ++tried;
    if (es_noisy < es_clean) ++degraded;
    if (es_masked >= es_noisy) ++restored;
  }
  REQUIRE(tried >= 4);
  CHECK(degraded >= tried - 1);  // clutter hurts
  CHECK(restored == tried);      // masking recovers
}
