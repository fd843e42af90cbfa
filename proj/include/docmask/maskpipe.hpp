// docmask/maskpipe.hpp -- detector heatmap to mask, blanking of non-text
// regions, word-box extraction, and oversized-detection splitting.
//
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

#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "docmask/ocr_types.hpp"
#include "docmask/raster.hpp"

namespace docmask {

struct MaskConfig {
  double threshold = 0.5;     // probability cutoff
  int dilation_radius = 2;    // protects anti-aliased glyph edges
  uint8_t fill = 255;         // blanking value (white paper)
  double word_gap = 0.0;      // px; 0 = auto (0.6 x median component height)
  double oversize_factor = 3.0;

  void validate() const {
    if (threshold <= 0.0 || threshold >= 1.0)
      throw std::invalid_argument("MaskConfig: threshold must be in (0,1)");
    if (dilation_radius < 0)
      throw std::invalid_argument("MaskConfig: dilation_radius must be >= 0");
    if (word_gap < 0)
      throw std::invalid_argument("MaskConfig: word_gap must be >= 0");
    if (oversize_factor <= 1.0)
      throw std::invalid_argument("MaskConfig: oversize_factor must be > 1");
  }
};

inline constexpr double kAutoWordGapFactor = 0.6;

inline BinaryMap heatmap_to_mask(const ProbMap& heatmap, const MaskConfig& cfg) {
  cfg.validate();
  BinaryMap mask(heatmap.width, heatmap.height);
  for (size_t i = 0; i < heatmap.data.size(); ++i)
    mask.data[i] = heatmap.data[i] >= cfg.threshold ? 1 : 0;
  return dilate(mask, cfg.dilation_radius);
}

inline Raster apply_mask(const Raster& image, const BinaryMap& mask,
                         const MaskConfig& cfg) {
  if (image.width != mask.width || image.height != mask.height)
    throw std::invalid_argument("apply_mask: image/mask dimension mismatch");
  Raster out(image.width, image.height);
  for (size_t i = 0; i < image.data.size(); ++i)
    out.data[i] = mask.data[i] ? image.data[i] : cfg.fill;
  return out;
}

namespace detail {

inline bool words_mergeable(const Box& a, const Box& b, double gap_limit) {
  const int gap = std::max(std::max(a.x0, b.x0) - std::min(a.x1, b.x1), 0);
  if (gap > gap_limit) return false;
  const int overlap = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  const int shorter = std::min(a.height(), b.height());
  return overlap * 2 >= shorter;
}

// Merges boxes whose horizontal gap is small and whose vertical overlap is
// at least half the shorter height, repeating until stable.
inline std::vector<Box> merge_word_boxes(std::vector<Box> boxes,
                                         double gap_limit) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < boxes.size() && !changed; ++i)
      for (size_t j = i + 1; j < boxes.size(); ++j)
        if (words_mergeable(boxes[i], boxes[j], gap_limit)) {
          boxes[i] = box_union(boxes[i], boxes[j]);
          boxes.erase(boxes.begin() + static_cast<long>(j));
          changed = true;
          break;
        }
  }
  std::sort(boxes.begin(), boxes.end(), [](const Box& a, const Box& b) {
    if (a.y0 != b.y0) return a.y0 < b.y0;
    return a.x0 < b.x0;
  });
  return boxes;
}

}  // namespace detail

// Connected components merged into word boxes by the gap/overlap rule,
// sorted by (y0, x0).
inline std::vector<Box> boxes_from_mask(const BinaryMap& mask,
                                        const MaskConfig& cfg) {
  cfg.validate();
  const auto comps = connected_components(mask, 8);
  if (comps.empty()) return {};
  double gap = cfg.word_gap;
  if (gap <= 0.0) {
    std::vector<int> heights;
    heights.reserve(comps.size());
    for (const auto& c : comps) heights.push_back(c.box.height());
    std::nth_element(heights.begin(), heights.begin() + heights.size() / 2,
                     heights.end());
    gap = kAutoWordGapFactor * heights[heights.size() / 2];
  }
  std::vector<Box> boxes;
  boxes.reserve(comps.size());
  for (const auto& c : comps) boxes.push_back(c.box);
  return detail::merge_word_boxes(std::move(boxes), gap);
}

struct SplitResult {
  std::vector<OcrWord> kept;
  std::vector<Box> regions_to_reprocess;  // sorted by (y0, x0)
};

// Flags OCR words far wider or taller than the median detector box as
// oversized (whole lines / paragraphs reported as one detection); they are
// dropped from `kept` and replaced by the intersecting detector boxes,
// which the caller re-submits to the engine individually.
inline SplitResult split_oversized(const std::vector<OcrWord>& ocr_words,
                                   const std::vector<Box>& detector_boxes,
                                   const MaskConfig& cfg) {
  cfg.validate();
  SplitResult out;
  if (detector_boxes.empty()) {
    out.kept = ocr_words;
    return out;
  }
  std::vector<int> ws, hs;
  for (const auto& b : detector_boxes) {
    ws.push_back(b.width());
    hs.push_back(b.height());
  }
  std::nth_element(ws.begin(), ws.begin() + ws.size() / 2, ws.end());
  std::nth_element(hs.begin(), hs.begin() + hs.size() / 2, hs.end());
  const double max_w = cfg.oversize_factor * ws[ws.size() / 2];
  const double max_h = cfg.oversize_factor * hs[hs.size() / 2];

  std::set<size_t> region_idx;
  for (const auto& w : ocr_words) {
    if (w.box.width() <= max_w && w.box.height() <= max_h) {
      out.kept.push_back(w);
      continue;
    }
    for (size_t i = 0; i < detector_boxes.size(); ++i)
      if (w.box.intersects(detector_boxes[i])) region_idx.insert(i);
  }
  for (size_t i : region_idx) out.regions_to_reprocess.push_back(detector_boxes[i]);
  std::sort(out.regions_to_reprocess.begin(), out.regions_to_reprocess.end(),
            [](const Box& a, const Box& b) {
              if (a.y0 != b.y0) return a.y0 < b.y0;
              return a.x0 < b.x0;
            });
  return out;
}

}  // namespace docmask
