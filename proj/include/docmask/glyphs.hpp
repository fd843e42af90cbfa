// docmask/glyphs.hpp -- glyph sources: the embedded bitmap faces, optional
// user-supplied .bfnt faces, deterministic rasterization at arbitrary pixel
// sizes, and text-tile rendering with character-level boxes.
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
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "docmask/fontdata.hpp"
#include "docmask/raster.hpp"
#include "docmask/rng.hpp"

namespace docmask {

// A glyph rasterized at a concrete pixel size. Coverage is 0..255 ink
// opacity on a tight grid.
struct Glyph {
  int width = 0, height = 0;
  int bearing_x = 0;  // from the pen position
  int bearing_y = 0;  // from the cell top
  double advance = 0.0;
  std::vector<uint8_t> coverage;
};

// One font face: identifier plus per-character bitmaps at a base em size.
struct GlyphSource {
  struct Entry {
    int w = 0, h = 0, bx = 0, by = 0;
    double advance = 0.0;        // at em size
    const uint8_t* bits = nullptr;
  };

  std::string identifier;
  bool common = true;
  int em = 0, ascent = 0, descent = 0;
  double space_advance = 0.0;  // at em size
  std::map<char, Entry> glyphs;
  std::vector<uint8_t> owned_bits;  // backing store for loaded faces

  bool has_glyph(char c) const { return glyphs.count(c) != 0; }

  double cell_height() const { return ascent + descent; }
};

namespace detail {

// Area-average downscale / bilinear upscale of a coverage bitmap; keeps
// thin strokes visible at small sizes and stays deterministic.
inline std::vector<uint8_t> scale_coverage(const uint8_t* src, int sw, int sh,
                                           int dw, int dh) {
  std::vector<uint8_t> dst(static_cast<size_t>(dw) * dh);
  const double fx = static_cast<double>(sw) / dw;
  const double fy = static_cast<double>(sh) / dh;
  for (int y = 0; y < dh; ++y) {
    for (int x = 0; x < dw; ++x) {
      double v;
      if (fx >= 1.0 || fy >= 1.0) {
        // integrate the source cell [x*fx,(x+1)*fx) x [y*fy,(y+1)*fy)
        double xs = x * fx, xe = (x + 1) * fx;
        double ys = y * fy, ye = (y + 1) * fy;
        double acc = 0.0, area = 0.0;
        for (int sy = static_cast<int>(ys); sy < sh && sy < ye; ++sy) {
          double hy = std::min<double>(ye, sy + 1) - std::max<double>(ys, sy);
          for (int sx = static_cast<int>(xs); sx < sw && sx < xe; ++sx) {
            double wx = std::min<double>(xe, sx + 1) - std::max<double>(xs, sx);
            acc += src[sy * sw + sx] * hy * wx;
            area += hy * wx;
          }
        }
        v = area > 0 ? acc / area : 0.0;
      } else {
        double sx = (x + 0.5) * fx - 0.5, sy = (y + 0.5) * fy - 0.5;
        sx = std::clamp(sx, 0.0, sw - 1.0);
        sy = std::clamp(sy, 0.0, sh - 1.0);
        int ix = static_cast<int>(sx), iy = static_cast<int>(sy);
        double gx = sx - ix, gy = sy - iy;
        int ix1 = std::min(ix + 1, sw - 1), iy1 = std::min(iy + 1, sh - 1);
        double top = src[iy * sw + ix] * (1 - gx) + src[iy * sw + ix1] * gx;
        double bot = src[iy1 * sw + ix] * (1 - gx) + src[iy1 * sw + ix1] * gx;
        v = top * (1 - gy) + bot * gy;
      }
      dst[static_cast<size_t>(y) * dw + x] =
          static_cast<uint8_t>(std::clamp(std::lround(v), 0l, 255l));
    }
  }
  return dst;
}

}  // namespace detail

// Rasterizes one character at the requested pixel size (the em height).
// Pure function: identical inputs yield identical bitmaps.
inline Glyph rasterize_glyph(const GlyphSource& face, char c, int size) {
  auto it = face.glyphs.find(c);
  if (it == face.glyphs.end())
    throw std::invalid_argument(std::string("rasterize_glyph: '") + c +
                                "' missing from " + face.identifier);
  const auto& e = it->second;
  const double scale = static_cast<double>(size) / face.em;
  Glyph g;
  g.width = std::max(1, static_cast<int>(std::lround(e.w * scale)));
  g.height = std::max(1, static_cast<int>(std::lround(e.h * scale)));
  g.bearing_x = static_cast<int>(std::lround(e.bx * scale));
  g.bearing_y = static_cast<int>(std::lround(e.by * scale));
  g.advance = e.advance * scale;
  g.coverage = detail::scale_coverage(e.bits, e.w, e.h, g.width, g.height);
  return g;
}

// ---------------------------------------------------------------------------
// Font library: embedded faces plus user .bfnt directories.

struct FontLibrary {
  std::vector<GlyphSource> faces;

  const GlyphSource& face(size_t i) const { return faces.at(i); }

  std::vector<const GlyphSource*> pool(bool common) const {
    std::vector<const GlyphSource*> out;
    for (const auto& f : faces)
      if (f.common == common) out.push_back(&f);
    return out;
  }

  // Draws a face: common pool with probability `common_prob` when both
  // pools are populated.
  const GlyphSource& draw(Rng& rng, double common_prob) const {
    auto commons = pool(true), uniques = pool(false);
    if (commons.empty() && uniques.empty())
      throw std::runtime_error("FontLibrary: no faces loaded");
    if (commons.empty() || uniques.empty()) {
      const auto& all = commons.empty() ? uniques : commons;
      return *all[rng.below(all.size())];
    }
    if (rng.bernoulli(common_prob))
      return *commons[rng.below(commons.size())];
    return *uniques[rng.below(uniques.size())];
  }
};

inline FontLibrary embedded_fonts() {
  FontLibrary lib;
  for (int i = 0; i < fontdata::kFaceCount; ++i) {
    const auto& rf = fontdata::kFaces[i];
    GlyphSource f;
    f.identifier = rf.name;
    f.common = rf.common;
    f.em = rf.em;
    f.ascent = rf.ascent;
    f.descent = rf.descent;
    f.space_advance = rf.space_advance_q4 / 16.0;
    for (unsigned g = 0; g < rf.glyph_count; ++g) {
      const auto& rg = rf.glyphs[g];
      f.glyphs[static_cast<char>(rg.ch)] = {rg.w, rg.h, rg.bearing_x,
                                            rg.bearing_y, rg.advance_q4 / 16.0,
                                            rf.bits + rg.offset};
    }
    lib.faces.push_back(std::move(f));
  }
  return lib;
}

// .bfnt: one JSON file per face with hex-encoded coverage bitmaps. The same
// schema export_bfnt writes.
inline GlyphSource load_bfnt(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_bfnt: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_bfnt: bad JSON in " + path + ": " + e.what());
  }
  GlyphSource face;
  face.identifier = j.at("name").get<std::string>();
  face.common = j.value("common", false);
  face.em = j.at("em").get<int>();
  face.ascent = j.at("ascent").get<int>();
  face.descent = j.at("descent").get<int>();
  face.space_advance = j.at("space_advance").get<double>();
  struct Pending {
    char ch;
    GlyphSource::Entry e;
    size_t offset;
  };
  std::vector<Pending> pending;
  for (const auto& g : j.at("glyphs")) {
    Pending p;
    const std::string ch = g.at("ch").get<std::string>();
    if (ch.size() != 1)
      throw std::runtime_error("load_bfnt: bad glyph key in " + path);
    p.ch = ch[0];
    p.e.w = g.at("w").get<int>();
    p.e.h = g.at("h").get<int>();
    p.e.bx = g.at("bx").get<int>();
    p.e.by = g.at("by").get<int>();
    p.e.advance = g.at("advance").get<double>();
    const std::string hex = g.at("bits").get<std::string>();
    if (static_cast<int>(hex.size()) != 2 * p.e.w * p.e.h)
      throw std::runtime_error("load_bfnt: bitmap size mismatch for glyph in " +
                               path);
    p.offset = face.owned_bits.size();
    for (size_t i = 0; i + 1 < hex.size() || i + 1 == hex.size(); i += 2) {
      if (i + 1 >= hex.size()) break;
      auto nib = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::runtime_error("load_bfnt: bad hex in " + path);
      };
      face.owned_bits.push_back(
          static_cast<uint8_t>(nib(hex[i]) * 16 + nib(hex[i + 1])));
    }
    pending.push_back(p);
  }
  for (const auto& p : pending) {
    auto e = p.e;
    e.bits = face.owned_bits.data() + p.offset;
    face.glyphs[p.ch] = e;
  }
  return face;
}

inline void export_bfnt(const GlyphSource& face, const std::string& path) {
  nlohmann::json glyphs = nlohmann::json::array();
  for (const auto& [ch, e] : face.glyphs) {
    std::string hex;
    hex.reserve(2 * e.w * e.h);
    static const char* digits = "0123456789abcdef";
    for (int i = 0; i < e.w * e.h; ++i) {
      hex += digits[e.bits[i] >> 4];
      hex += digits[e.bits[i] & 15];
    }
    glyphs.push_back({{"ch", std::string(1, ch)},
                      {"w", e.w},
                      {"h", e.h},
                      {"bx", e.bx},
                      {"by", e.by},
                      {"advance", e.advance},
                      {"bits", hex}});
  }
  nlohmann::json j{{"name", face.identifier}, {"common", face.common},
                   {"em", face.em},           {"ascent", face.ascent},
                   {"descent", face.descent}, {"space_advance", face.space_advance},
                   {"glyphs", glyphs}};
  std::ofstream f(path);
  if (!f) throw std::runtime_error("export_bfnt: cannot open " + path);
  f << j.dump(1);
}

// Appends every .bfnt face found in `dir` (sorted by filename).
inline void load_font_dir(FontLibrary& lib, const std::string& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".bfnt") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw std::runtime_error("load_font_dir: no .bfnt files in " + dir);
  for (const auto& p : files) lib.faces.push_back(load_bfnt(p.string()));
}

// ---------------------------------------------------------------------------
// Text tiles.

struct WordAnnotation {
  std::string text;
  Box box;
  std::vector<Box> char_boxes;  // one per character, spaces excluded
};

struct TextTile {
  Raster image;           // white tile with composited ink
  std::vector<WordAnnotation> words;
  std::string skipped;    // characters missing from the glyph source
};

// Words are separated a little wider than the face's native space so word
// boxes stay unambiguous for box-level scoring.
inline constexpr double kSpaceStretch = 1.4;

// Lays `text` out left to right at the given pixel size. The seed jitters
// inter-character tracking by up to one pixel; all boxes are tight bounds
// of the rendered coverage.
inline TextTile render_text_tile(const std::string& text,
                                 const GlyphSource& face, int size,
                                 uint64_t seed) {
  if (text.empty())
    throw std::invalid_argument("render_text_tile: empty text");
  if (size < 9 || size > 100)
    throw std::invalid_argument("render_text_tile: size must be in [9,100]");
  Rng rng(seed);
  const double scale = static_cast<double>(size) / face.em;
  const int pad = 2;
  const int ascent_px =
      static_cast<int>(std::ceil(face.ascent * scale));
  const int descent_px =
      static_cast<int>(std::ceil(face.descent * scale));

  struct Placed {
    char ch;
    Glyph glyph;
    int x, y;
    bool word_start;
  };
  std::vector<Placed> placed;
  TextTile out;
  double pen = 0.0;
  bool word_start = true;
  for (char c : text) {
    if (c == ' ') {
      pen += face.space_advance * scale * kSpaceStretch;
      word_start = true;
      continue;
    }
    if (!face.has_glyph(c)) {
      out.skipped += c;
      continue;
    }
    Glyph g = rasterize_glyph(face, c, size);
    Placed p;
    p.ch = c;
    p.x = pad + static_cast<int>(std::lround(pen)) + std::max(0, g.bearing_x);
    p.y = pad + std::max(0, g.bearing_y);
    p.word_start = word_start;
    pen += g.advance + rng.below(2);  // tracking jitter
    p.glyph = std::move(g);
    placed.push_back(std::move(p));
    word_start = false;
  }
  int tile_w = pad * 2 + static_cast<int>(std::ceil(pen));
  int tile_h = pad * 2 + ascent_px + descent_px;
  for (const auto& p : placed) {
    tile_w = std::max(tile_w, p.x + p.glyph.width + pad);
    tile_h = std::max(tile_h, p.y + p.glyph.height + pad);
  }
  out.image = Raster(std::max(tile_w, 1), std::max(tile_h, 1), 255);

  WordAnnotation word;
  bool have_word = false;
  auto flush_word = [&]() {
    if (have_word && !word.char_boxes.empty()) {
      word.box = word.char_boxes[0];
      for (const auto& b : word.char_boxes) word.box = box_union(word.box, b);
      out.words.push_back(word);
    }
    word = WordAnnotation{};
    have_word = false;
  };
  for (const auto& p : placed) {
    if (p.word_start) flush_word();
    // composite: ink darkness = coverage
    int minx = out.image.width, miny = out.image.height, maxx = -1, maxy = -1;
    for (int y = 0; y < p.glyph.height; ++y) {
      const int ty = p.y + y;
      if (ty < 0 || ty >= out.image.height) continue;
      for (int x = 0; x < p.glyph.width; ++x) {
        const int tx = p.x + x;
        if (tx < 0 || tx >= out.image.width) continue;
        const uint8_t cov = p.glyph.coverage[y * p.glyph.width + x];
        if (!cov) continue;
        auto& px = out.image.at(tx, ty);
        px = std::min<uint8_t>(px, 255 - cov);
        minx = std::min(minx, tx);
        maxx = std::max(maxx, tx);
        miny = std::min(miny, ty);
        maxy = std::max(maxy, ty);
      }
    }
    if (maxx >= minx) {
      word.char_boxes.emplace_back(minx, miny, maxx + 1, maxy + 1);
      word.text += p.ch;
      have_word = true;
    }
  }
  flush_word();
  return out;
}

// A character fragment: one random glyph quadrant, randomly rotated and
// scaled, re-rendered on a white tile. Contributes no ground truth.
inline Raster render_hard_negative_tile(const GlyphSource& face, int size,
                                        uint64_t seed) {
  if (size < 9 || size > 100)
    throw std::invalid_argument("render_hard_negative_tile: size must be in [9,100]");
  Rng rng(seed);
  static const char* candidates =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789&@#%";
  const size_t ncand = std::strlen(candidates);

  // Draw glyphs and quadrants until the fragment carries enough ink.
  std::vector<uint8_t> frag;
  int fw = 0, fh = 0;
  for (int attempt = 0; attempt < 64; ++attempt) {
    char c = candidates[rng.below(ncand)];
    if (!face.has_glyph(c)) continue;
    Glyph g = rasterize_glyph(face, c, size);
    const int qw = std::max(1, g.width / 2), qh = std::max(1, g.height / 2);
    const int quadrant = static_cast<int>(rng.below(4));
    const int qx = (quadrant % 2) * (g.width - qw);
    const int qy = (quadrant / 2) * (g.height - qh);
    int64_t mass = 0;
    frag.assign(static_cast<size_t>(qw) * qh, 0);
    for (int y = 0; y < qh; ++y)
      for (int x = 0; x < qw; ++x) {
        uint8_t v = g.coverage[(qy + y) * g.width + qx + x];
        frag[y * qw + x] = v;
        mass += v;
      }
    if (mass >= 255 * 3) {  // at least ~3 solid pixels of ink
      fw = qw;
      fh = qh;
      break;
    }
  }
  const int pad = 2;
  if (fw == 0) return Raster(size + 2 * pad, size + 2 * pad, 255);

  const double angle = rng.range_real(-180.0, 180.0) * 3.14159265358979323846 / 180.0;
  const double s = rng.range_real(0.5, 2.0);
  const double c0 = std::cos(angle), s0 = std::sin(angle);
  const double hw = fw * s, hh = fh * s;
  const int ow = std::max(1, static_cast<int>(std::ceil(std::abs(hw * c0) + std::abs(hh * s0))));
  const int oh = std::max(1, static_cast<int>(std::ceil(std::abs(hw * s0) + std::abs(hh * c0))));
  Raster tile(ow + 2 * pad, oh + 2 * pad, 255);
  const double ocx = ow * 0.5, ocy = oh * 0.5;
  const double icx = fw * 0.5, icy = fh * 0.5;
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      // inverse map: unrotate, unscale about the fragment center
      const double dx = (x + 0.5 - ocx), dy = (y + 0.5 - ocy);
      const double sx = (c0 * dx + s0 * dy) / s + icx - 0.5;
      const double sy = (-s0 * dx + c0 * dy) / s + icy - 0.5;
      if (sx < 0 || sy < 0 || sx > fw - 1 || sy > fh - 1) continue;
      const int ix = static_cast<int>(sx), iy = static_cast<int>(sy);
      const double gx = sx - ix, gy = sy - iy;
      const int ix1 = std::min(ix + 1, fw - 1), iy1 = std::min(iy + 1, fh - 1);
      const double top = frag[iy * fw + ix] * (1 - gx) + frag[iy * fw + ix1] * gx;
      const double bot = frag[iy1 * fw + ix] * (1 - gx) + frag[iy1 * fw + ix1] * gx;
      const double cov = top * (1 - gy) + bot * gy;
      auto& px = tile.at(pad + x, pad + y);
      px = std::min<int>(px, 255 - static_cast<int>(std::lround(cov)));
    }
  }
  return tile;
}

}  // namespace docmask
