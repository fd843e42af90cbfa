// docmask/evalkit.hpp -- measurement protocol: greedy box matching at an
// IOU threshold, detection F1, Levenshtein-based Edit Score, report files.
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
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "docmask/glyphs.hpp"  // WordAnnotation
#include "docmask/ocr_types.hpp"
#include "docmask/raster.hpp"

namespace docmask {

// Minimal insert/delete/substitute count, classic two-row dynamic program.
inline int levenshtein(const std::string& a, const std::string& b) {
  const size_t m = a.size(), n = b.size();
  std::vector<int> prev(n + 1), cur(n + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (size_t i = 1; i <= m; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= n; ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

struct MatchResult {
  struct Pair {
    int pred = 0, gt = 0;
    double iou = 0.0;
  };
  std::vector<Pair> pairs;
  std::vector<int> unmatched_pred;  // false positives
  std::vector<int> unmatched_gt;    // false negatives
};

// Greedy one-to-one matching in descending IOU order; ties broken by lower
// gt index, then lower pred index. Pairs below the threshold are rejected.
inline MatchResult match_boxes(const std::vector<Box>& pred,
                               const std::vector<Box>& gt,
                               double iou_threshold = 0.5) {
  struct Cand {
    double iou;
    int gt, pred;
  };
  std::vector<Cand> cands;
  for (int g = 0; g < static_cast<int>(gt.size()); ++g)
    for (int p = 0; p < static_cast<int>(pred.size()); ++p) {
      const double v = iou(pred[p], gt[g]);
      if (v >= iou_threshold) cands.push_back({v, g, p});
    }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.gt != b.gt) return a.gt < b.gt;
    return a.pred < b.pred;
  });
  MatchResult out;
  std::vector<bool> used_pred(pred.size(), false), used_gt(gt.size(), false);
  for (const auto& c : cands) {
    if (used_pred[c.pred] || used_gt[c.gt]) continue;
    used_pred[c.pred] = true;
    used_gt[c.gt] = true;
    out.pairs.push_back({c.pred, c.gt, c.iou});
  }
  for (int p = 0; p < static_cast<int>(pred.size()); ++p)
    if (!used_pred[p]) out.unmatched_pred.push_back(p);
  for (int g = 0; g < static_cast<int>(gt.size()); ++g)
    if (!used_gt[g]) out.unmatched_gt.push_back(g);
  return out;
}

struct PrecisionRecallF1 {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

// 0/0 counts as 0 throughout.
inline PrecisionRecallF1 detection_f1(int64_t tp, int64_t fp, int64_t fn) {
  PrecisionRecallF1 r;
  r.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  r.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  r.f1 = r.precision + r.recall > 0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

inline PrecisionRecallF1 detection_f1(const MatchResult& m) {
  return detection_f1(static_cast<int64_t>(m.pairs.size()),
                      static_cast<int64_t>(m.unmatched_pred.size()),
                      static_cast<int64_t>(m.unmatched_gt.size()));
}

enum class EsDenominator { GtPlusFp, GtOnly };

struct EvalOptions {
  double iou_threshold = 0.5;
  bool case_insensitive = true;
  EsDenominator denominator = EsDenominator::GtPlusFp;
};

namespace detail {

inline std::string fold_case(const std::string& s, bool fold) {
  if (!fold) return s;
  std::string out = s;
  for (auto& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

// Edit Score: 1 - D/L where D sums Levenshtein distances over matched pairs
// plus full string lengths for false negatives and false positives, and L
// is the total ground-truth length (plus false-positive lengths under the
// default denominator). Clamped to [0,1]; an empty document with no
// predictions scores 1.
inline double edit_score(const MatchResult& m,
                         const std::vector<OcrWord>& pred_words,
                         const std::vector<WordAnnotation>& gt_words,
                         const EvalOptions& opts = {}) {
  int64_t dist = 0, len_gt = 0, len_fp = 0;
  for (const auto& pair : m.pairs)
    dist += levenshtein(
        detail::fold_case(pred_words[pair.pred].text, opts.case_insensitive),
        detail::fold_case(gt_words[pair.gt].text, opts.case_insensitive));
  for (int g : m.unmatched_gt)
    dist += static_cast<int64_t>(gt_words[g].text.size());
  for (int p : m.unmatched_pred) {
    dist += static_cast<int64_t>(pred_words[p].text.size());
    len_fp += static_cast<int64_t>(pred_words[p].text.size());
  }
  for (const auto& w : gt_words) len_gt += static_cast<int64_t>(w.text.size());
  int64_t denom = len_gt;
  if (opts.denominator == EsDenominator::GtPlusFp) denom += len_fp;
  if (denom == 0) return dist == 0 ? 1.0 : 0.0;
  return std::clamp(1.0 - static_cast<double>(dist) / static_cast<double>(denom),
                    0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Reports.

struct DocEval {
  std::string id;
  int64_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  double edit_score = 1.0;
};

struct EvalReport {
  int version = 1;
  nlohmann::json config;
  std::vector<DocEval> documents;
  int64_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;  // micro-averaged
  double mean_edit_score = 1.0;                    // mean over documents
};

inline DocEval evaluate_document(const std::vector<OcrWord>& pred,
                                 const std::vector<WordAnnotation>& gt,
                                 const EvalOptions& opts = {},
                                 const std::string& id = {}) {
  std::vector<Box> pred_boxes, gt_boxes;
  for (const auto& w : pred) pred_boxes.push_back(w.box);
  for (const auto& w : gt) gt_boxes.push_back(w.box);
  const MatchResult m = match_boxes(pred_boxes, gt_boxes, opts.iou_threshold);
  DocEval d;
  d.id = id;
  d.tp = static_cast<int64_t>(m.pairs.size());
  d.fp = static_cast<int64_t>(m.unmatched_pred.size());
  d.fn = static_cast<int64_t>(m.unmatched_gt.size());
  const auto prf = detection_f1(d.tp, d.fp, d.fn);
  d.precision = prf.precision;
  d.recall = prf.recall;
  d.f1 = prf.f1;
  d.edit_score = edit_score(m, pred, gt, opts);
  return d;
}

inline EvalReport aggregate_report(std::vector<DocEval> docs,
                                   const EvalOptions& opts = {}) {
  EvalReport r;
  r.config = nlohmann::json{
      {"iou_threshold", opts.iou_threshold},
      {"case_insensitive", opts.case_insensitive},
      {"denominator",
       opts.denominator == EsDenominator::GtPlusFp ? "gt_plus_fp" : "gt_only"}};
  double es_sum = 0.0;
  for (const auto& d : docs) {
    r.tp += d.tp;
    r.fp += d.fp;
    r.fn += d.fn;
    es_sum += d.edit_score;
  }
  const auto prf = detection_f1(r.tp, r.fp, r.fn);
  r.precision = prf.precision;
  r.recall = prf.recall;
  r.f1 = prf.f1;
  r.mean_edit_score = docs.empty() ? 1.0 : es_sum / docs.size();
  r.documents = std::move(docs);
  return r;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json docs = nlohmann::json::array();
  for (const auto& d : r.documents)
    docs.push_back({{"id", d.id},
                    {"tp", d.tp},
                    {"fp", d.fp},
                    {"fn", d.fn},
                    {"precision", d.precision},
                    {"recall", d.recall},
                    {"f1", d.f1},
                    {"edit_score", d.edit_score}});
  return nlohmann::json{{"version", r.version},
                        {"config", r.config},
                        {"documents", docs},
                        {"aggregate",
                         {{"tp", r.tp},
                          {"fp", r.fp},
                          {"fn", r.fn},
                          {"precision", r.precision},
                          {"recall", r.recall},
                          {"f1", r.f1},
                          {"mean_edit_score", r.mean_edit_score}}}};
}

inline EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  r.version = j.at("version").get<int>();
  r.config = j.at("config");
  for (const auto& d : j.at("documents")) {
    DocEval e;
    e.id = d.at("id").get<std::string>();
    e.tp = d.at("tp").get<int64_t>();
    e.fp = d.at("fp").get<int64_t>();
    e.fn = d.at("fn").get<int64_t>();
    e.precision = d.at("precision").get<double>();
    e.recall = d.at("recall").get<double>();
    e.f1 = d.at("f1").get<double>();
    e.edit_score = d.at("edit_score").get<double>();
    r.documents.push_back(std::move(e));
  }
  const auto& a = j.at("aggregate");
  r.tp = a.at("tp").get<int64_t>();
  r.fp = a.at("fp").get<int64_t>();
  r.fn = a.at("fn").get<int64_t>();
  r.precision = a.at("precision").get<double>();
  r.recall = a.at("recall").get<double>();
  r.f1 = a.at("f1").get<double>();
  r.mean_edit_score = a.at("mean_edit_score").get<double>();
  return r;
}

inline void write_report(const EvalReport& r, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_report: cannot open " + path);
  f << report_to_json(r).dump(1) << "\n";
  if (!f) throw std::runtime_error("write_report: short write to " + path);
}

inline EvalReport read_report(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_report: cannot open " + path);
  return report_from_json(nlohmann::json::parse(f));
}

// ---------------------------------------------------------------------------
// Ground-truth ingestion: receipt-style per-line files, 8 comma-separated
// quadrilateral coordinates collapsed to their bounding box, then the text
// (which may itself contain commas).

inline WordAnnotation parse_quad_gt_line(const std::string& line, int lineno) {
  std::vector<int> coords;
  size_t pos = 0;
  for (int i = 0; i < 8; ++i) {
    const size_t comma = line.find(',', pos);
    if (comma == std::string::npos)
      throw std::runtime_error("quad gt: line " + std::to_string(lineno) +
                               ": expected 8 coordinates");
    try {
      coords.push_back(std::stoi(line.substr(pos, comma - pos)));
    } catch (const std::exception&) {
      throw std::runtime_error("quad gt: line " + std::to_string(lineno) +
                               ": bad coordinate");
    }
    pos = comma + 1;
  }
  std::string text = line.substr(pos);
  while (!text.empty() && (text.back() == '\r' || text.back() == '\n'))
    text.pop_back();
  if (text.empty())
    throw std::runtime_error("quad gt: line " + std::to_string(lineno) +
                             ": empty text");
  const int x0 = std::min({coords[0], coords[2], coords[4], coords[6]});
  const int x1 = std::max({coords[0], coords[2], coords[4], coords[6]});
  const int y0 = std::min({coords[1], coords[3], coords[5], coords[7]});
  const int y1 = std::max({coords[1], coords[3], coords[5], coords[7]});
  WordAnnotation w;
  w.text = text;
  w.box = Box(x0, y0, std::max(x1, x0 + 1), std::max(y1, y0 + 1));
  return w;
}

inline std::vector<WordAnnotation> read_quad_gt(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_quad_gt: cannot open " + path);
  std::vector<WordAnnotation> out;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    std::string stripped = line;
    while (!stripped.empty() &&
           (stripped.back() == '\r' || stripped.back() == '\n'))
      stripped.pop_back();
    if (stripped.empty()) continue;
    out.push_back(parse_quad_gt_line(stripped, lineno));
  }
  return out;
}

}  // namespace docmask
