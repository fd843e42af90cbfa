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

#include "docmask/maskpipe.hpp"
#include "docmask/rng.hpp"

using namespace docmask;

namespace {

ProbMap uniform_map(int w, int h, float v) {
  ProbMap m(w, h);
  std::fill(m.data.begin(), m.data.end(), v);
  return m;
}

}  // namespace

TEST_CASE("heatmap_to_mask thresholding and dilation") {
  MaskConfig cfg;
  CHECK(heatmap_to_mask(uniform_map(8, 8, 0.f), cfg).count_ones() == 0);
  CHECK(heatmap_to_mask(uniform_map(8, 8, 1.f), cfg).count_ones() == 64);

  ProbMap single(9, 9);
  single.at(4, 4) = 0.6f;
  const BinaryMap m = heatmap_to_mask(single, cfg);  // threshold .5, radius 2
  CHECK(m.count_ones() == 25);
  for (int y = 2; y <= 6; ++y)
    for (int x = 2; x <= 6; ++x) CHECK(m.at(x, y) == 1);

  MaskConfig bad;
  bad.threshold = 0.0;
  CHECK_THROWS_AS(heatmap_to_mask(single, bad), std::invalid_argument);
}

TEST_CASE("apply_mask keeps masked pixels, blanks the rest, idempotent") {
  Rng rng(3);
  Raster img(12, 10);
  for (auto& v : img.data) v = static_cast<uint8_t>(rng.below(256));
  BinaryMap mask(12, 10);
  for (auto& v : mask.data) v = rng.bernoulli(0.5) ? 1 : 0;
  MaskConfig cfg;

  const Raster out = apply_mask(img, mask, cfg);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 12; ++x) {
      if (mask.at(x, y))
        CHECK(out.at(x, y) == img.at(x, y));
      else
        CHECK(out.at(x, y) == cfg.fill);
    }
  CHECK(apply_mask(out, mask, cfg) == out);  // idempotence

  BinaryMap ones(12, 10, 1);
  CHECK(apply_mask(img, ones, cfg) == img);
  BinaryMap zeros(12, 10);
  const Raster blank = apply_mask(img, zeros, cfg);
  for (uint8_t v : blank.data) CHECK(v == cfg.fill);

  BinaryMap wrong(5, 5);
  CHECK_THROWS_AS(apply_mask(img, wrong, cfg), std::invalid_argument);
}

TEST_CASE("mask ink is monotone nondecreasing with the dilation radius") {
  Rng rng(8);
  ProbMap hm(24, 24);
  for (auto& v : hm.data) v = static_cast<float>(rng.uniform());
  MaskConfig a, b;
  a.dilation_radius = 1;
  b.dilation_radius = 3;
  const BinaryMap ma = heatmap_to_mask(hm, a);
  const BinaryMap mb = heatmap_to_mask(hm, b);
  for (size_t i = 0; i < ma.data.size(); ++i)
    if (ma.data[i]) CHECK(mb.data[i] == 1);
}

TEST_CASE("boxes_from_mask merges along the baseline and splits lines") {
  MaskConfig cfg;
  cfg.dilation_radius = 0;
  SECTION("empty mask") {
    CHECK(boxes_from_mask(BinaryMap(10, 10), cfg).empty());
  }
  SECTION("two blobs with a small gap merge into one word") {
    BinaryMap m(40, 20);
    for (int y = 5; y < 13; ++y) {
      for (int x = 4; x < 10; ++x) m.at(x, y) = 1;
      for (int x = 13; x < 19; ++x) m.at(x, y) = 1;  // gap 3 < 0.6*8
    }
    const auto boxes = boxes_from_mask(m, cfg);
    REQUIRE(boxes.size() == 1);
    CHECK(boxes[0] == Box(4, 5, 19, 13));
  }
  SECTION("vertically separated blobs stay apart") {
    BinaryMap m(30, 30);
    for (int y = 2; y < 9; ++y)
      for (int x = 2; x < 9; ++x) m.at(x, y) = 1;
    for (int y = 16; y < 23; ++y)
      for (int x = 2; x < 9; ++x) m.at(x, y) = 1;
    CHECK(boxes_from_mask(m, cfg).size() == 2);
  }
  SECTION("blobs past the gap limit stay apart") {
    BinaryMap m(60, 20);
    for (int y = 5; y < 13; ++y) {
      for (int x = 4; x < 10; ++x) m.at(x, y) = 1;
      for (int x = 25; x < 31; ++x) m.at(x, y) = 1;  // gap 15 > 0.6*8
    }
    CHECK(boxes_from_mask(m, cfg).size() == 2);
  }
}

TEST_CASE("boxes_from_mask boxes are non-nested and cover mask pixels") {
  Rng rng(17);
  MaskConfig cfg;
  for (int trial = 0; trial < 10; ++trial) {
    BinaryMap m(48, 48);
    for (int blob = 0; blob < 6; ++blob) {
      const int bw = 2 + static_cast<int>(rng.below(8));
      const int bh = 2 + static_cast<int>(rng.below(8));
      const int x0 = static_cast<int>(rng.below(48 - bw));
      const int y0 = static_cast<int>(rng.below(48 - bh));
      for (int y = y0; y < y0 + bh; ++y)
        for (int x = x0; x < x0 + bw; ++x) m.at(x, y) = 1;
    }
    const auto boxes = boxes_from_mask(m, cfg);
    for (size_t i = 0; i < boxes.size(); ++i) {
      int64_t covered = 0;
      for (int y = boxes[i].y0; y < boxes[i].y1; ++y)
        for (int x = boxes[i].x0; x < boxes[i].x1; ++x)
          covered += m.at(x, y);
      CHECK(covered >= 1);
      for (size_t j = 0; j < boxes.size(); ++j) {
        if (i == j) continue;
        const bool nested = boxes[j].x0 >= boxes[i].x0 &&
                            boxes[j].x1 <= boxes[i].x1 &&
                            boxes[j].y0 >= boxes[i].y0 &&
                            boxes[j].y1 <= boxes[i].y1;
        CHECK_FALSE(nested);
      }
    }
  }
}

TEST_CASE("split_oversized drops line-spanning words and returns regions") {
  MaskConfig cfg;  // oversize factor 3
  // detector boxes: three words on one line, ~14 px wide each
  const std::vector<Box> det{Box(10, 10, 24, 20), Box(30, 10, 44, 20),
                             Box(50, 10, 64, 20)};
  SECTION("no oversized words: identity") {
    std::vector<OcrWord> words{OcrWord("total", Box(10, 10, 24, 20), 0.9)};
    const SplitResult r = split_oversized(words, det, cfg);
    REQUIRE(r.kept.size() == 1);
    CHECK(r.kept[0].text == "total");
    CHECK(r.regions_to_reprocess.empty());
  }
  SECTION("one line-spanning word explodes into three regions") {
    std::vector<OcrWord> words{
        OcrWord("totalamountdue", Box(10, 10, 64, 20), 0.5),
        OcrWord("ok", Box(30, 30, 44, 40), 0.8)};
    const SplitResult r = split_oversized(words, det, cfg);
    REQUIRE(r.kept.size() == 1);
    CHECK(r.kept[0].text == "ok");
    REQUIRE(r.regions_to_reprocess.size() == 3);
    CHECK(r.regions_to_reprocess[0] == det[0]);
    CHECK(r.regions_to_reprocess[1] == det[1]);
    CHECK(r.regions_to_reprocess[2] == det[2]);
  }
  SECTION("oversized word touching no detector box is pure noise") {
    std::vector<OcrWord> words{
        OcrWord("ghost", Box(100, 100, 190, 112), 0.3)};
    const SplitResult r = split_oversized(words, det, cfg);
    CHECK(r.kept.empty());
    CHECK(r.regions_to_reprocess.empty());
  }
  SECTION("empty detector boxes keep everything") {
    std::vector<OcrWord> words{
        OcrWord("anything", Box(0, 0, 500, 500), 0.2)};
    const SplitResult r = split_oversized(words, {}, cfg);
    CHECK(r.kept.size() == 1);
    CHECK(r.regions_to_reprocess.empty());
  }
}

TEST_CASE("split_oversized conservation: kept or split, never both") {
  Rng rng(23);
  MaskConfig cfg;
  std::vector<Box> det;
  for (int i = 0; i < 8; ++i)
    det.push_back(Box(i * 20, 10, i * 20 + 12, 22));
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<OcrWord> words;
    const int n = 1 + static_cast<int>(rng.below(6));
    for (int i = 0; i < n; ++i) {
      const int w = 5 + static_cast<int>(rng.below(120));
      const int h = 5 + static_cast<int>(rng.below(30));
      const int x = static_cast<int>(rng.below(100));
      const int y = static_cast<int>(rng.below(30));
      words.emplace_back("w" + std::to_string(i), Box(x, y, x + w, y + h), 0.5);
    }
    const SplitResult r = split_oversized(words, det, cfg);
    CHECK(r.kept.size() <= words.size());
    // every kept word is one of the inputs, no duplicates
    std::set<std::string> seen;
    for (const auto& k : r.kept) {
      CHECK(seen.insert(k.text).second);
      bool found = false;
      for (const auto& w : words)
        if (w.text == k.text && w.box == k.box) found = true;
      CHECK(found);
    }
  }
}
