// docmask/pipeline.hpp -- end-to-end orchestration: detector heatmap,
// masking, OCR with oversized-detection re-processing, and the paired
// masked-vs-unmasked evaluation.
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

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "docmask/evalkit.hpp"
#include "docmask/infer.hpp"
#include "docmask/maskpipe.hpp"
#include "docmask/ocr.hpp"
#include "docmask/synthgen.hpp"

namespace docmask {

// Padding around re-processed regions (white border) before they are
// resubmitted to the engine.
inline constexpr int kReprocessPad = 2;

namespace detail {

inline void sort_reading_order(std::vector<OcrWord>& words) {
  std::sort(words.begin(), words.end(), [](const OcrWord& a, const OcrWord& b) {
    if (a.box.y0 != b.box.y0) return a.box.y0 < b.box.y0;
    return a.box.x0 < b.box.x0;
  });
}

}  // namespace detail

// Crops `region` (clamped, plus a white border) out of the page.
inline Raster crop_region(const Raster& page, const Box& region,
                          int pad = kReprocessPad) {
  const int x0 = std::clamp(region.x0, 0, page.width - 1);
  const int y0 = std::clamp(region.y0, 0, page.height - 1);
  const int x1 = std::clamp(region.x1, x0 + 1, page.width);
  const int y1 = std::clamp(region.y1, y0 + 1, page.height);
  Raster out(x1 - x0 + 2 * pad, y1 - y0 + 2 * pad, 255);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x)
      out.at(pad + x - x0, pad + y - y0) = page.at(x, y);
  return out;
}

// Document-level OCR followed by the oversized-detection post-process:
// words far larger than the median detector box are dropped and their
// intersecting detector boxes re-submitted to the engine individually; the
// region results are spliced back in reading order.
inline std::vector<OcrWord> recognize_with_splitting(
    OcrEngine& engine, const Raster& page, const std::vector<Box>& detector_boxes,
    const MaskConfig& cfg) {
  std::vector<OcrWord> words = engine.recognize(page);
  SplitResult split = split_oversized(words, detector_boxes, cfg);
  std::vector<OcrWord> result = std::move(split.kept);
  for (const Box& region : split.regions_to_reprocess) {
    const Raster crop = crop_region(page, region);
    for (auto w : engine.recognize(crop)) {
      const int ox = region.x0 - kReprocessPad, oy = region.y0 - kReprocessPad;
      w.box = Box(w.box.x0 + ox, w.box.y0 + oy, w.box.x1 + ox, w.box.y1 + oy);
      result.push_back(std::move(w));
    }
  }
  detail::sort_reading_order(result);
  return result;
}

struct PageInputs {
  std::string id;
  Raster image;
  std::vector<WordAnnotation> gt_words;
};

struct PipelineConfigKnobs {
  MaskConfig mask;
  EvalOptions eval;
  int tile = 256;
  int overlap = 32;
};

struct PairedPageResult {
  DocEval unmasked;
  DocEval masked;
  Raster masked_image;
  ProbMap heatmap;
  std::vector<Box> detector_boxes;
  std::vector<OcrWord> unmasked_words;
  std::vector<OcrWord> masked_words;
};

// Runs both arms on one page: plain document-level OCR, and detector ->
// mask -> OCR (with oversized splitting) on the blanked page.
inline PairedPageResult run_paired_page(const UNetParams& detector,
                                        OcrEngine& engine,
                                        const PageInputs& page,
                                        const PipelineConfigKnobs& knobs) {
  PairedPageResult r;
  r.unmasked_words = engine.recognize(page.image);
  r.unmasked = evaluate_document(r.unmasked_words, page.gt_words, knobs.eval,
                                 page.id);
  r.heatmap = predict_page(detector, page.image, knobs.tile, knobs.overlap);
  const BinaryMap mask = heatmap_to_mask(r.heatmap, knobs.mask);
  r.masked_image = apply_mask(page.image, mask, knobs.mask);
  r.detector_boxes = boxes_from_mask(mask, knobs.mask);
  r.masked_words = recognize_with_splitting(engine, r.masked_image,
                                            r.detector_boxes, knobs.mask);
  r.masked = evaluate_document(r.masked_words, page.gt_words, knobs.eval,
                               page.id);
  return r;
}

struct PairedReport {
  EvalReport unmasked;
  EvalReport masked;
  double delta_f1 = 0.0;
  double delta_es = 0.0;
};

inline PairedReport make_paired_report(std::vector<DocEval> unmasked,
                                       std::vector<DocEval> masked,
                                       const EvalOptions& eval) {
  PairedReport r;
  r.unmasked = aggregate_report(std::move(unmasked), eval);
  r.masked = aggregate_report(std::move(masked), eval);
  r.delta_f1 = r.masked.f1 - r.unmasked.f1;
  r.delta_es = r.masked.mean_edit_score - r.unmasked.mean_edit_score;
  return r;
}

inline nlohmann::json paired_report_to_json(const PairedReport& r) {
  return nlohmann::json{{"unmasked", report_to_json(r.unmasked)},
                        {"masked", report_to_json(r.masked)},
                        {"delta", {{"f1", r.delta_f1}, {"edit_score", r.delta_es}}}};
}

// Loads dataset pages (image + annotation) referenced by a manifest.
inline std::vector<PageInputs> load_dataset_pages(const std::string& manifest_path,
                                                  int limit = 0) {
  const DatasetManifest m = read_manifest(manifest_path);
  const auto dir = std::filesystem::path(manifest_path).parent_path();
  std::vector<PageInputs> out;
  for (const auto& e : m.entries) {
    if (limit > 0 && static_cast<int>(out.size()) >= limit) break;
    PageInputs p;
    p.id = e.image;
    p.image = read_pgm((dir / e.image).string());
    p.gt_words = read_annotation((dir / e.ann).string()).words;
    out.push_back(std::move(p));
  }
  return out;
}

// The paired protocol over a dataset: per-document masked and unmasked
// results plus the aggregate delta.
inline PairedReport run_pipeline(const UNetParams& detector, OcrEngine& engine,
                                 const std::vector<PageInputs>& pages,
                                 const PipelineConfigKnobs& knobs) {
  std::vector<DocEval> unmasked, masked;
  for (const auto& page : pages) {
    PairedPageResult r = run_paired_page(detector, engine, page, knobs);
    unmasked.push_back(std::move(r.unmasked));
    masked.push_back(std::move(r.masked));
  }
  return make_paired_report(std::move(unmasked), std::move(masked), knobs.eval);
}

}  // namespace docmask
