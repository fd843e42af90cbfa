// docmask/ocr.hpp -- OCR engines behind one interface: an external
// word-level engine driven as a black-box subprocess (TSV wire format),
// and a built-in template-matching reference recognizer that keeps the
// whole pipeline runnable with no external binaries.
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

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "docmask/glyphs.hpp"
#include "docmask/maskpipe.hpp"
#include "docmask/ocr_types.hpp"
#include "docmask/raster.hpp"

namespace docmask {

// ---------------------------------------------------------------------------
// Word-level TSV: level, left, top, width, height, conf (0..100), text.
// An optional header line starting with "level" is tolerated.

inline std::string words_to_tsv(const std::vector<OcrWord>& words) {
  std::string out = "level\tleft\ttop\twidth\theight\tconf\ttext\n";
  for (const auto& w : words) {
    out += "5\t" + std::to_string(w.box.x0) + "\t" + std::to_string(w.box.y0) +
           "\t" + std::to_string(w.box.width()) + "\t" +
           std::to_string(w.box.height()) + "\t" +
           std::to_string(static_cast<int>(std::lround(w.confidence * 100))) +
           "\t" + w.text + "\n";
  }
  return out;
}

inline std::vector<OcrWord> parse_tsv(const std::string& body) {
  std::vector<OcrWord> out;
  std::istringstream in(body);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
      line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("level", 0) == 0) continue;  // header
    std::vector<std::string> fields;
    size_t pos = 0;
    for (int i = 0; i < 6; ++i) {
      const size_t tab = line.find('\t', pos);
      if (tab == std::string::npos)
        throw std::runtime_error("parse_tsv: line " + std::to_string(lineno) +
                                 ": expected 7 tab-separated fields");
      fields.push_back(line.substr(pos, tab - pos));
      pos = tab + 1;
    }
    fields.push_back(line.substr(pos));  // text may contain anything but tabs
    if (fields[6].empty()) continue;     // empty-text rows are skipped
    long geom[4];
    for (int i = 0; i < 4; ++i) {
      try {
        size_t used = 0;
        geom[i] = std::stol(fields[i + 1], &used);
        if (used != fields[i + 1].size()) throw std::invalid_argument("trail");
      } catch (const std::exception&) {
        throw std::runtime_error("parse_tsv: line " + std::to_string(lineno) +
                                 ": non-integer geometry field '" +
                                 fields[i + 1] + "'");
      }
    }
    if (geom[2] < 1 || geom[3] < 1)
      throw std::runtime_error("parse_tsv: line " + std::to_string(lineno) +
                               ": non-positive box dimensions");
    double conf = 0.0;
    try {
      conf = std::stod(fields[5]);
    } catch (const std::exception&) {
      throw std::runtime_error("parse_tsv: line " + std::to_string(lineno) +
                               ": bad confidence field '" + fields[5] + "'");
    }
    conf = std::clamp(conf / 100.0, 0.0, 1.0);
    out.emplace_back(fields[6],
                     Box(static_cast<int>(geom[0]), static_cast<int>(geom[1]),
                         static_cast<int>(geom[0] + geom[2]),
                         static_cast<int>(geom[1] + geom[3])),
                     conf);
  }
  return out;
}

inline std::vector<OcrWord> read_tsv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_tsv: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_tsv(ss.str());
}

// ---------------------------------------------------------------------------
// External engine.

struct ExternalEngineConfig {
  std::string command_template;  // must contain {input} and {output}
  double timeout_sec = 60.0;

  void validate() const {
    if (command_template.find("{input}") == std::string::npos ||
        command_template.find("{output}") == std::string::npos)
      throw std::invalid_argument(
          "ExternalEngineConfig: command_template must contain {input} and "
          "{output}");
    if (timeout_sec <= 0)
      throw std::invalid_argument("ExternalEngineConfig: timeout must be > 0");
  }
};

namespace detail {

inline std::string substitute(std::string tmpl, const std::string& key,
                              const std::string& value) {
  size_t pos;
  while ((pos = tmpl.find(key)) != std::string::npos)
    tmpl.replace(pos, key.size(), value);
  return tmpl;
}

// Runs a shell command with a timeout; returns its exit code. Stdout is
// redirected to `stdout_path`.
inline int run_with_timeout(const std::string& command, double timeout_sec,
                            const std::string& stdout_path) {
  const pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("run_external: fork failed");
  if (pid == 0) {
    FILE* out = std::freopen(stdout_path.c_str(), "w", stdout);
    (void)out;
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(timeout_sec);
  while (true) {
    int status = 0;
    const pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) {
      if (WIFEXITED(status)) return WEXITSTATUS(status);
      return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      throw std::runtime_error("run_external: timed out after " +
                               std::to_string(timeout_sec) + "s: " + command);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

inline std::string temp_file(const char* stem) {
  static std::atomic<uint64_t> counter{0};
  const auto dir = std::filesystem::temp_directory_path();
  return (dir / (std::string(stem) + std::to_string(getpid()) + "_" +
                 std::to_string(counter.fetch_add(1))))
      .string();
}

}  // namespace detail

// Executes the configured command on a page file and parses its word-level
// TSV (read from {output} if the command created it, otherwise stdout).
inline std::vector<OcrWord> run_external(const ExternalEngineConfig& cfg,
                                         const std::string& page_path) {
  cfg.validate();
  if (!std::filesystem::exists(page_path))
    throw std::runtime_error("run_external: no such page file " + page_path);
  const std::string out_path = detail::temp_file("docmask_ocr_out_");
  const std::string stdout_path = detail::temp_file("docmask_ocr_stdout_");
  std::string command = detail::substitute(cfg.command_template, "{input}",
                                           page_path);
  command = detail::substitute(command, "{output}", out_path);
  int code;
  try {
    code = detail::run_with_timeout(command, cfg.timeout_sec, stdout_path);
  } catch (...) {
    std::filesystem::remove(out_path);
    std::filesystem::remove(stdout_path);
    throw;
  }
  std::string body;
  if (std::filesystem::exists(out_path) &&
      std::filesystem::file_size(out_path) > 0) {
    std::ifstream f(out_path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    body = ss.str();
  } else {
    std::ifstream f(stdout_path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    body = ss.str();
  }
  std::filesystem::remove(out_path);
  std::filesystem::remove(stdout_path);
  if (code != 0)
    throw std::runtime_error("run_external: command exited with code " +
                             std::to_string(code) + ": " + command);
  return parse_tsv(body);
}

// ---------------------------------------------------------------------------
// Reference recognizer: binarize, connected components, cluster the pieces
// of multi-part characters, group clusters into words with the mask
// pipeline's rule, then score each cluster against glyph templates by
// normalized cross-correlation.

inline constexpr double kReferenceConfidenceFloor = 0.4;
inline constexpr int kReferenceBinarizeThreshold = 128;

struct ReferenceTemplate {
  char ch = 0;
  int bank = 0;  // canonical height this template was rendered at
  int w = 0, h = 0;
  std::vector<uint8_t> bits;  // binarized, tight, 0/255
};

struct ReferenceModel {
  std::string charset;
  std::vector<int> heights;
  std::vector<ReferenceTemplate> templates;
};

inline constexpr const char* kDefaultCharset =
    "!\"#$%&'()*+,-./0123456789:;<=>?@ABCDEFGHIJKLMNOPQRSTUVWXYZ[\\]^_`"
    "abcdefghijklmnopqrstuvwxyz{|}~";

namespace detail {

// Tight binarized bitmap of one glyph rendered at `size`; empty when the
// glyph has no ink above threshold.
inline ReferenceTemplate make_template(const GlyphSource& face, char c,
                                       int size) {
  const Glyph g = rasterize_glyph(face, c, size);
  int minx = g.width, miny = g.height, maxx = -1, maxy = -1;
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x)
      if (g.coverage[y * g.width + x] >= 128) {
        minx = std::min(minx, x);
        maxx = std::max(maxx, x);
        miny = std::min(miny, y);
        maxy = std::max(maxy, y);
      }
  ReferenceTemplate t;
  t.ch = c;
  t.bank = size;
  if (maxx < minx) return t;
  t.w = maxx - minx + 1;
  t.h = maxy - miny + 1;
  t.bits.resize(static_cast<size_t>(t.w) * t.h);
  for (int y = 0; y < t.h; ++y)
    for (int x = 0; x < t.w; ++x)
      t.bits[y * t.w + x] =
          g.coverage[(miny + y) * g.width + minx + x] >= 128 ? 255 : 0;
  return t;
}

inline double ncc(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b) {
  const size_t n = a.size();
  double ma = 0, mb = 0;
  for (size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double num = 0, va = 0, vb = 0;
  for (size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    num += da * db;
    va += da * da;
    vb += db * db;
  }
  if (va == 0.0 && vb == 0.0) return ma == mb ? 1.0 : 0.0;
  if (va == 0.0 || vb == 0.0) return 0.0;
  return num / std::sqrt(va * vb);
}

}  // namespace detail

inline ReferenceModel build_reference_model(
    const std::vector<const GlyphSource*>& faces,
    const std::vector<int>& heights, const std::string& charset = kDefaultCharset) {
  if (faces.empty())
    throw std::invalid_argument("build_reference_model: no glyph sources");
  if (heights.empty())
    throw std::invalid_argument("build_reference_model: no canonical heights");
  std::string missing;
  for (const auto* face : faces)
    for (char c : charset)
      if (!face->has_glyph(c) && missing.find(c) == std::string::npos)
        missing += c;
  if (!missing.empty())
    throw std::runtime_error("build_reference_model: glyphs missing for: " +
                             missing);
  ReferenceModel model;
  model.charset = charset;
  model.heights = heights;
  for (int h : heights)
    for (const auto* face : faces)
      for (char c : charset) {
        ReferenceTemplate t = detail::make_template(*face, c, h);
        if (t.w > 0) model.templates.push_back(std::move(t));
      }
  return model;
}

inline ReferenceModel build_reference_model(const GlyphSource& face,
                                            const std::vector<int>& heights,
                                            const std::string& charset = kDefaultCharset) {
  return build_reference_model(std::vector<const GlyphSource*>{&face}, heights,
                               charset);
}

inline std::vector<OcrWord> reference_recognize(const ReferenceModel& model,
                                                const Raster& page) {
  BinaryMap ink(page.width, page.height);
  for (size_t i = 0; i < page.data.size(); ++i)
    ink.data[i] = page.data[i] < kReferenceBinarizeThreshold ? 1 : 0;
  auto comps = connected_components(ink, 8);
  if (comps.empty()) return {};

  // Cluster components that overlap horizontally (dots of i/j, accents)
  // unless that would stack far beyond one glyph's height.
  std::sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
    if (a.box.x0 != b.box.x0) return a.box.x0 < b.box.x0;
    return a.box.y0 < b.box.y0;
  });
  std::vector<Box> clusters;
  for (const auto& c : comps) {
    bool merged = false;
    for (auto& cl : clusters) {
      const int xov = std::min(cl.x1, c.box.x1) - std::max(cl.x0, c.box.x0);
      const int minw = std::min(cl.width(), c.box.width());
      if (xov * 2 < minw) continue;
      const Box u = box_union(cl, c.box);
      if (u.height() > 1.7 * std::max(cl.height(), c.box.height())) continue;
      cl = u;
      merged = true;
      break;
    }
    if (!merged) clusters.push_back(c.box);
  }

  // Word grouping by the mask-pipeline rule.
  MaskConfig gcfg;
  const std::vector<Box> word_boxes = [&] {
    std::vector<int> heights;
    for (const auto& b : clusters) heights.push_back(b.height());
    std::nth_element(heights.begin(), heights.begin() + heights.size() / 2,
                     heights.end());
    const double gap = kAutoWordGapFactor * heights[heights.size() / 2];
    return detail::merge_word_boxes(clusters, gap);
  }();

  std::vector<OcrWord> out;
  for (const auto& wb : word_boxes) {
    std::vector<const Box*> members;
    for (const auto& cl : clusters)
      if (cl.x0 >= wb.x0 && cl.x1 <= wb.x1 && cl.y0 >= wb.y0 && cl.y1 <= wb.y1)
        members.push_back(&cl);
    std::sort(members.begin(), members.end(),
              [](const Box* a, const Box* b) { return a->x0 < b->x0; });
    std::string text;
    double conf_sum = 0.0;
    for (const Box* cl : members) {
      // tight cluster bitmap
      std::vector<uint8_t> bits(static_cast<size_t>(cl->width()) * cl->height());
      for (int y = 0; y < cl->height(); ++y)
        for (int x = 0; x < cl->width(); ++x)
          bits[y * cl->width() + x] =
              ink.at(cl->x0 + x, cl->y0 + y) ? 255 : 0;
      // nearest canonical height selects the template bank
      int bank = model.heights[0];
      for (int h : model.heights)
        if (std::abs(h - cl->height()) < std::abs(bank - cl->height()))
          bank = h;
      double best = -2.0;
      char best_ch = 0;
      for (const auto& t : model.templates) {
        if (t.bank != bank) continue;
        const auto scaled = detail::scale_coverage(bits.data(), cl->width(),
                                                   cl->height(), t.w, t.h);
        const double score = detail::ncc(scaled, t.bits);
        if (score > best) {
          best = score;
          best_ch = t.ch;
        }
      }
      if (best_ch == 0) continue;
      text += best_ch;
      conf_sum += std::max(0.0, best);
    }
    if (text.empty()) continue;
    const double conf = conf_sum / static_cast<double>(text.size());
    if (conf < kReferenceConfidenceFloor) continue;
    out.emplace_back(text, wb, std::min(conf, 1.0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Engine interface used by the pipeline; implementations must be pure
// per-call so pages can be processed concurrently.

class OcrEngine {
 public:
  virtual ~OcrEngine() = default;
  virtual std::vector<OcrWord> recognize(const Raster& page) = 0;
  virtual std::string name() const = 0;
};

class ReferenceEngine : public OcrEngine {
 public:
  explicit ReferenceEngine(ReferenceModel model) : model_(std::move(model)) {}

  std::vector<OcrWord> recognize(const Raster& page) override {
    return reference_recognize(model_, page);
  }
  std::string name() const override { return "reference"; }

  const ReferenceModel& model() const { return model_; }

 private:
  ReferenceModel model_;
};

class ExternalEngine : public OcrEngine {
 public:
  explicit ExternalEngine(ExternalEngineConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
  }

  std::vector<OcrWord> recognize(const Raster& page) override {
    const std::string path = detail::temp_file("docmask_ocr_page_");
    write_pgm(page, path + ".pgm");
    try {
      auto words = run_external(cfg_, path + ".pgm");
      std::filesystem::remove(path + ".pgm");
      return words;
    } catch (...) {
      std::filesystem::remove(path + ".pgm");
      throw;
    }
  }
  std::string name() const override { return "external"; }

 private:
  ExternalEngineConfig cfg_;
};

}  // namespace docmask
