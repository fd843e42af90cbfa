// docmask/synthgen.hpp -- synthetic training corpus: text tiles with
// character-level ground truth on white / texture / natural backgrounds,
// font- and document-level degradations, hard-negative tiles, and
// deterministic dataset generation with a manifest.
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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "docmask/glyphs.hpp"
#include "docmask/raster.hpp"
#include "docmask/rng.hpp"
#include "docmask/sha256.hpp"
#include "docmask/textgen.hpp"

namespace docmask {

struct SynthConfig {
  // background draw probabilities; must sum to 1
  double bg_white = 0.55;
  double bg_natural = 0.15;
  double bg_texture = 0.30;
  int font_size_min = 9;
  int font_size_max = 100;
  double common_font_prob = 0.8;
  // per-family probabilities; the remainder leaves the tile clean
  double noise_speckle = 0.25;
  double noise_binarize = 0.15;
  double noise_distort = 0.25;
  double rotation_range = 3.0;  // degrees, whole document
  // per-family probabilities for the single document-level degradation
  double doc_blur = 1.0 / 3;
  double doc_compress = 1.0 / 3;
  double doc_downsample = 1.0 / 3;
  bool stack_doc_noise = false;  // apply each family independently instead
  double hard_negative_prob = 0.2;
  int tiles_min = 2;
  int tiles_max = 8;
  int doc_size = 1024;
  std::string asset_dir;  // PGM images for natural/texture backgrounds

  void validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(bg_white) || !prob(bg_natural) || !prob(bg_texture) ||
        std::abs(bg_white + bg_natural + bg_texture - 1.0) > 1e-9)
      throw std::invalid_argument("SynthConfig: background_probs must sum to 1");
    if (font_size_min < 9 || font_size_max > 100 ||
        font_size_min > font_size_max)
      throw std::invalid_argument(
          "SynthConfig: font_size_range must lie within [9,100]");
    if (!prob(common_font_prob) || !prob(hard_negative_prob))
      throw std::invalid_argument("SynthConfig: probabilities must be in [0,1]");
    if (!prob(noise_speckle) || !prob(noise_binarize) || !prob(noise_distort) ||
        noise_speckle + noise_binarize + noise_distort > 1.0 + 1e-9)
      throw std::invalid_argument(
          "SynthConfig: font_noise_probs must be in [0,1] and sum to <= 1");
    if (!prob(doc_blur) || !prob(doc_compress) || !prob(doc_downsample) ||
        doc_blur + doc_compress + doc_downsample > 1.0 + 1e-9)
      throw std::invalid_argument(
          "SynthConfig: doc_noise_probs must be in [0,1] and sum to <= 1");
    if (rotation_range < 0 || rotation_range > 45)
      throw std::invalid_argument("SynthConfig: rotation_range must be in [0,45]");
    if (tiles_min < 1 || tiles_min > tiles_max)
      throw std::invalid_argument("SynthConfig: bad tiles_per_doc_range");
    if (doc_size < 64)
      throw std::invalid_argument("SynthConfig: doc_size must be >= 64");
  }
};

inline nlohmann::json synth_config_to_json(const SynthConfig& c) {
  return nlohmann::json{
      {"background_probs",
       {{"white", c.bg_white}, {"natural", c.bg_natural}, {"texture", c.bg_texture}}},
      {"font_size_range", {c.font_size_min, c.font_size_max}},
      {"common_font_prob", c.common_font_prob},
      {"font_noise_probs",
       {{"speckle", c.noise_speckle},
        {"binarize", c.noise_binarize},
        {"distort", c.noise_distort}}},
      {"rotation_range", c.rotation_range},
      {"doc_noise_probs",
       {{"blur", c.doc_blur},
        {"compress", c.doc_compress},
        {"downsample", c.doc_downsample}}},
      {"stack_doc_noise", c.stack_doc_noise},
      {"hard_negative_prob", c.hard_negative_prob},
      {"tiles_per_doc_range", {c.tiles_min, c.tiles_max}},
      {"doc_size", c.doc_size},
      {"asset_dir", c.asset_dir}};
}

// Unspecified fields keep their defaults; unknown keys are rejected.
inline SynthConfig synth_config_from_json(const nlohmann::json& j) {
  static const std::vector<std::string> known{
      "background_probs", "font_size_range",  "common_font_prob",
      "font_noise_probs", "rotation_range",   "doc_noise_probs",
      "stack_doc_noise",  "hard_negative_prob", "tiles_per_doc_range",
      "doc_size",         "asset_dir"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("SynthConfig: unknown key \"" + key + "\"");
  SynthConfig c;
  if (j.contains("background_probs")) {
    const auto& b = j["background_probs"];
    c.bg_white = b.value("white", c.bg_white);
    c.bg_natural = b.value("natural", c.bg_natural);
    c.bg_texture = b.value("texture", c.bg_texture);
  }
  if (j.contains("font_size_range")) {
    c.font_size_min = j["font_size_range"].at(0).get<int>();
    c.font_size_max = j["font_size_range"].at(1).get<int>();
  }
  c.common_font_prob = j.value("common_font_prob", c.common_font_prob);
  if (j.contains("font_noise_probs")) {
    const auto& n = j["font_noise_probs"];
    c.noise_speckle = n.value("speckle", c.noise_speckle);
    c.noise_binarize = n.value("binarize", c.noise_binarize);
    c.noise_distort = n.value("distort", c.noise_distort);
  }
  c.rotation_range = j.value("rotation_range", c.rotation_range);
  if (j.contains("doc_noise_probs")) {
    const auto& n = j["doc_noise_probs"];
    c.doc_blur = n.value("blur", c.doc_blur);
    c.doc_compress = n.value("compress", c.doc_compress);
    c.doc_downsample = n.value("downsample", c.doc_downsample);
  }
  c.stack_doc_noise = j.value("stack_doc_noise", c.stack_doc_noise);
  c.hard_negative_prob = j.value("hard_negative_prob", c.hard_negative_prob);
  if (j.contains("tiles_per_doc_range")) {
    c.tiles_min = j["tiles_per_doc_range"].at(0).get<int>();
    c.tiles_max = j["tiles_per_doc_range"].at(1).get<int>();
  }
  c.doc_size = j.value("doc_size", c.doc_size);
  c.asset_dir = j.value("asset_dir", c.asset_dir);
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Backgrounds.

enum class BackgroundKind { White, Natural, Texture };

namespace detail {

inline double lattice01(uint64_t seed, int64_t ix, int64_t iy, int octave) {
  uint64_t s = seed ^ (0x9e3779b97f4a7c15ull * (octave + 1));
  s ^= static_cast<uint64_t>(ix) * 0xc2b2ae3d27d4eb4full;
  s ^= static_cast<uint64_t>(iy) * 0x165667b19e3779f9ull;
  return static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
}

// Multi-octave value noise in [0,255].
inline Raster value_noise(int w, int h, uint64_t seed) {
  static const int cells[] = {64, 32, 16, 8};
  static const double amps[] = {0.45, 0.30, 0.15, 0.10};
  Raster out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double v = 0.0;
      for (int o = 0; o < 4; ++o) {
        const double fx = static_cast<double>(x) / cells[o];
        const double fy = static_cast<double>(y) / cells[o];
        const int64_t ix = static_cast<int64_t>(std::floor(fx));
        const int64_t iy = static_cast<int64_t>(std::floor(fy));
        double tx = fx - ix, ty = fy - iy;
        tx = tx * tx * (3 - 2 * tx);
        ty = ty * ty * (3 - 2 * ty);
        const double a = lattice01(seed, ix, iy, o);
        const double b = lattice01(seed, ix + 1, iy, o);
        const double c = lattice01(seed, ix, iy + 1, o);
        const double d = lattice01(seed, ix + 1, iy + 1, o);
        v += amps[o] * ((a * (1 - tx) + b * tx) * (1 - ty) +
                        (c * (1 - tx) + d * tx) * ty);
      }
      out.at(x, y) = static_cast<uint8_t>(std::clamp(std::lround(v * 255), 0l, 255l));
    }
  }
  return out;
}

// Gradient-magnitude (Sobel) edge image, inverted so edges are dark.
inline Raster contour_filter(const Raster& img) {
  Raster out(img.width, img.height, 255);
  auto px = [&](int x, int y) {
    return static_cast<int>(img.at(std::clamp(x, 0, img.width - 1),
                                   std::clamp(y, 0, img.height - 1)));
  };
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const int gx = px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1) -
                     px(x - 1, y - 1) - 2 * px(x - 1, y) - px(x - 1, y + 1);
      const int gy = px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1) -
                     px(x - 1, y - 1) - 2 * px(x, y - 1) - px(x + 1, y - 1);
      const long mag = std::lround(std::sqrt(double(gx) * gx + double(gy) * gy));
      out.at(x, y) = static_cast<uint8_t>(255 - std::clamp(mag, 0l, 255l));
    }
  return out;
}

inline std::vector<std::filesystem::path> list_assets(const std::string& dir) {
  std::vector<std::filesystem::path> files;
  if (!dir.empty() && std::filesystem::is_directory(dir))
    for (const auto& e : std::filesystem::directory_iterator(dir))
      if (e.path().extension() == ".pgm") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

// Random crop of an asset resampled to (w,h).
inline Raster asset_crop(const Raster& src, int w, int h, Rng& rng) {
  const double frac = rng.range_real(0.5, 1.0);
  const int cw = std::max(1, static_cast<int>(src.width * frac));
  const int ch = std::max(1, static_cast<int>(src.height * frac));
  const int x0 = static_cast<int>(rng.below(src.width - cw + 1));
  const int y0 = static_cast<int>(rng.below(src.height - ch + 1));
  Raster crop(cw, ch);
  for (int y = 0; y < ch; ++y)
    for (int x = 0; x < cw; ++x) crop.at(x, y) = src.at(x0 + x, y0 + y);
  return resample(crop, w, h);
}

}  // namespace detail

// Texture background: grayscale source (asset crop or procedural noise),
// then contour filter, then a random dynamic-range stretch onto
// [lo in 120..220, 255]. The drawn lo is reported via *out_lo.
inline Raster make_texture_background(int w, int h, uint64_t seed,
                                      const std::string& asset_dir = {},
                                      int* out_lo = nullptr) {
  Rng rng(seed);
  const auto assets = detail::list_assets(asset_dir);
  Raster src = assets.empty()
                   ? detail::value_noise(w, h, rng.next_u64())
                   : detail::asset_crop(
                         read_pgm(assets[rng.below(assets.size())].string()),
                         w, h, rng);
  const int lo = 120 + static_cast<int>(rng.below(101));
  if (out_lo) *out_lo = lo;
  return stretch_range(detail::contour_filter(src), static_cast<uint8_t>(lo),
                       255);
}

inline Raster make_background(BackgroundKind kind, int w, int h, uint64_t seed,
                              const std::string& asset_dir = {}) {
  switch (kind) {
    case BackgroundKind::White:
      return Raster(w, h, 255);
    case BackgroundKind::Texture:
      return make_texture_background(w, h, seed, asset_dir);
    case BackgroundKind::Natural: {
      const auto assets = detail::list_assets(asset_dir);
      if (assets.empty())
        throw std::runtime_error(
            "make_background: natural background needs a non-empty asset "
            "directory; fall back to kind=texture");
      Rng rng(seed);
      Raster src = read_pgm(assets[rng.below(assets.size())].string());
      return detail::asset_crop(src, w, h, rng);
    }
  }
  throw std::logic_error("make_background: bad kind");
}

// ---------------------------------------------------------------------------
// Font-level noise.

enum class FontNoise { Speckle, Binarize, Distort };

// Noise strengths drawn inside compose_document come from this range.
inline constexpr double kFontNoiseStrengthMin = 0.3;
inline constexpr double kFontNoiseStrengthMax = 1.0;

inline Raster apply_font_noise(const Raster& tile, FontNoise family,
                               double strength, uint64_t seed) {
  if (strength < 0.0 || strength > 1.0)
    throw std::invalid_argument("apply_font_noise: strength must be in [0,1]");
  Rng rng(seed);
  switch (family) {
    case FontNoise::Speckle: {
      Raster out = tile;
      const int64_t area = static_cast<int64_t>(tile.width) * tile.height;
      const int64_t n = std::lround(strength * 0.02 * static_cast<double>(area));
      if (n == 0) return out;
      // partial Fisher-Yates for n distinct positions
      std::vector<int64_t> idx(area);
      for (int64_t i = 0; i < area; ++i) idx[i] = i;
      for (int64_t i = 0; i < n; ++i) {
        const int64_t j = i + static_cast<int64_t>(rng.below(area - i));
        std::swap(idx[i], idx[j]);
        auto& px = out.data[idx[i]];
        px = px > 127 ? 0 : 255;  // flip to the opposite extreme
      }
      return out;
    }
    case FontNoise::Binarize: {
      Raster out(tile.width, tile.height);
      for (size_t i = 0; i < tile.data.size(); ++i)
        out.data[i] = tile.data[i] >= 128 ? 255 : 0;
      return out;
    }
    case FontNoise::Distort: {
      if (strength == 0.0) return tile;
      // per-glyph-region affine jitter: small translation + scale about the
      // region center
      BinaryMap ink(tile.width, tile.height);
      for (size_t i = 0; i < tile.data.size(); ++i)
        ink.data[i] = tile.data[i] < 245 ? 1 : 0;
      const auto comps = connected_components(ink, 8);
      Raster out = tile;
      for (const auto& comp : comps)
        for (int y = comp.box.y0; y < comp.box.y1; ++y)
          for (int x = comp.box.x0; x < comp.box.x1; ++x)
            if (ink.at(x, y)) out.at(x, y) = 255;
      const double t = 1.0 + 2.0 * strength;
      for (const auto& comp : comps) {
        const double dx = rng.range_real(-t, t);
        const double dy = rng.range_real(-t, t);
        const double sc = rng.range_real(1.0 - 0.05 * strength,
                                         1.0 + 0.05 * strength);
        const double cx = 0.5 * (comp.box.x0 + comp.box.x1);
        const double cy = 0.5 * (comp.box.y0 + comp.box.y1);
        const int pad = static_cast<int>(std::ceil(t)) + 2;
        const int y0 = std::max(0, comp.box.y0 - pad);
        const int y1 = std::min(tile.height, comp.box.y1 + pad);
        const int x0 = std::max(0, comp.box.x0 - pad);
        const int x1 = std::min(tile.width, comp.box.x1 + pad);
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) {
            const double sx = cx + (x - dx - cx) / sc;
            const double sy = cy + (y - dy - cy) / sc;
            if (sx < 0 || sy < 0 || sx > tile.width - 1 || sy > tile.height - 1)
              continue;
            const int ix = static_cast<int>(sx), iy = static_cast<int>(sy);
            const double gx = sx - ix, gy = sy - iy;
            const int ix1 = std::min(ix + 1, tile.width - 1);
            const int iy1 = std::min(iy + 1, tile.height - 1);
            auto src = [&](int px, int py) -> double {
              return ink.at(px, py) ? tile.at(px, py) : 255.0;
            };
            const double top = src(ix, iy) * (1 - gx) + src(ix1, iy) * gx;
            const double bot = src(ix, iy1) * (1 - gx) + src(ix1, iy1) * gx;
            const double v = top * (1 - gy) + bot * gy;
            auto& px = out.at(x, y);
            px = std::min<int>(px, static_cast<int>(std::lround(v)));
          }
        }
      }
      return out;
    }
  }
  throw std::logic_error("apply_font_noise: bad family");
}

// ---------------------------------------------------------------------------
// Document-level degradations.

namespace detail {

// 8x8 block DCT quantization round-trip: a codec-free approximation of
// lossy compression artifacts. quality in [1,100].
inline Raster block_compress(const Raster& img, int quality) {
  static const int base_q[64] = {
      16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
      14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
      18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
      49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  double q[64];
  for (int i = 0; i < 64; ++i)
    q[i] = std::clamp((base_q[i] * scale + 50) / 100, 1, 255);

  static double cos_t[8][8];
  static bool init = [] {
    for (int x = 0; x < 8; ++x)
      for (int u = 0; u < 8; ++u)
        cos_t[x][u] = std::cos((2 * x + 1) * u * 3.14159265358979323846 / 16.0);
    return true;
  }();
  (void)init;
  auto cu = [](int u) { return u == 0 ? 0.70710678118654752440 : 1.0; };

  Raster out(img.width, img.height);
  double f[8][8], F[8][8];
  for (int by = 0; by < img.height; by += 8) {
    for (int bx = 0; bx < img.width; bx += 8) {
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
          f[y][x] = img.at(std::min(bx + x, img.width - 1),
                           std::min(by + y, img.height - 1)) -
                    128.0;
      for (int v = 0; v < 8; ++v)
        for (int u = 0; u < 8; ++u) {
          double acc = 0.0;
          for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x)
              acc += f[y][x] * cos_t[x][u] * cos_t[y][v];
          const double coeff = 0.25 * cu(u) * cu(v) * acc;
          F[v][u] = std::round(coeff / q[v * 8 + u]) * q[v * 8 + u];
        }
      for (int y = 0; y < 8 && by + y < img.height; ++y)
        for (int x = 0; x < 8 && bx + x < img.width; ++x) {
          double acc = 0.0;
          for (int v = 0; v < 8; ++v)
            for (int u = 0; u < 8; ++u)
              acc += cu(u) * cu(v) * F[v][u] * cos_t[x][u] * cos_t[y][v];
          out.at(bx + x, by + y) = static_cast<uint8_t>(
              std::clamp(std::lround(0.25 * acc + 128.0), 0l, 255l));
        }
    }
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Whole documents.

struct DocumentSample {
  Raster image;
  BinaryMap gt;
  std::vector<WordAnnotation> words;
  uint64_t seed = 0;
  nlohmann::json provenance;
};

namespace detail {

inline Box rotate_box(const Box& b, double degrees, double cx, double cy,
                      int doc_w, int doc_h) {
  const double rad = degrees * 3.14159265358979323846 / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);
  double minx = 1e30, miny = 1e30, maxx = -1e30, maxy = -1e30;
  const double xs[2] = {static_cast<double>(b.x0), static_cast<double>(b.x1)};
  const double ys[2] = {static_cast<double>(b.y0), static_cast<double>(b.y1)};
  for (double px : xs)
    for (double py : ys) {
      // forward map matching rotate()'s inverse sampling
      const double u = px - cx, v = py - cy;
      const double rx = c * u - s * v + cx;
      const double ry = s * u + c * v + cy;
      minx = std::min(minx, rx);
      maxx = std::max(maxx, rx);
      miny = std::min(miny, ry);
      maxy = std::max(maxy, ry);
    }
  int x0 = std::clamp(static_cast<int>(std::floor(minx)), 0, doc_w);
  int y0 = std::clamp(static_cast<int>(std::floor(miny)), 0, doc_h);
  int x1 = std::clamp(static_cast<int>(std::ceil(maxx)), 0, doc_w);
  int y1 = std::clamp(static_cast<int>(std::ceil(maxy)), 0, doc_h);
  if (x1 <= x0 || y1 <= y0) return Box(0, 0, 1, 1);  // degenerate, off-page
  return Box(x0, y0, x1, y1);
}

}  // namespace detail

// Composes one document. All random draws happen in a fixed order, so
// (config, fonts, seed) fully determines every output byte.
inline DocumentSample compose_document(const SynthConfig& cfg,
                                       const FontLibrary& fonts,
                                       const TextSampler& corpus,
                                       uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  const int D = cfg.doc_size;

  // background
  const bool have_assets = !detail::list_assets(cfg.asset_dir).empty();
  int bg_kind = rng.pick_weighted({cfg.bg_white, cfg.bg_natural, cfg.bg_texture});
  if (bg_kind == 1 && !have_assets) bg_kind = 2;  // natural falls back to texture
  Raster doc = make_background(static_cast<BackgroundKind>(bg_kind), D, D,
                               rng.next_u64(), cfg.asset_dir);

  // tiles
  const int k = static_cast<int>(rng.range_int(cfg.tiles_min, cfg.tiles_max));
  struct Tile {
    Raster image;
    std::vector<WordAnnotation> words;  // tile-local coordinates
  };
  std::vector<Tile> tiles;
  const int max_size = std::min(cfg.font_size_max, std::max(9, D / 3));
  for (int i = 0; i < k; ++i) {
    const bool hard_negative = rng.bernoulli(cfg.hard_negative_prob);
    const GlyphSource& face = fonts.draw(rng, cfg.common_font_prob);
    const int size =
        static_cast<int>(rng.range_int(cfg.font_size_min,
                                       std::max(cfg.font_size_min, max_size)));
    Tile t;
    if (hard_negative) {
      t.image = render_hard_negative_tile(face, size, rng.next_u64());
    } else {
      const int tokens = 1 + static_cast<int>(rng.below(3));
      const std::string text = corpus.sample_text(rng, tokens);
      const int usable = D - 8;
      TextTile tt = render_text_tile(text, face, size, rng.next_u64());
      if (tt.image.width > usable) {
        // too wide for the page: retry with one plain word, then with the
        // smallest font, before giving up on the tile
        const std::string word = corpus.sample_token(rng, TokenKind::Word);
        tt = render_text_tile(word, face, size, rng.next_u64());
        if (tt.image.width > usable)
          tt = render_text_tile(word, face, cfg.font_size_min, rng.next_u64());
      }
      t.image = std::move(tt.image);
      t.words = std::move(tt.words);
      const int family = rng.pick_weighted(
          {cfg.noise_speckle, cfg.noise_binarize, cfg.noise_distort,
           std::max(0.0, 1.0 - cfg.noise_speckle - cfg.noise_binarize -
                             cfg.noise_distort)});
      if (family < 3) {
        const double strength =
            rng.range_real(kFontNoiseStrengthMin, kFontNoiseStrengthMax);
        t.image = apply_font_noise(t.image, static_cast<FontNoise>(family),
                                   strength, rng.next_u64());
      }
    }
    tiles.push_back(std::move(t));
  }

  // non-overlapping row placement with jittered gaps
  std::vector<WordAnnotation> words;
  const int margin = 4;
  int x = margin, y = margin, row_h = 0;
  for (auto& t : tiles) {
    const int gx = 4 + static_cast<int>(rng.below(13));
    const int gy = 4 + static_cast<int>(rng.below(13));
    if (x + t.image.width > D - margin) {
      x = margin;
      y += row_h + gy;
      row_h = 0;
    }
    if (y + t.image.height > D - margin || x + t.image.width > D - margin)
      continue;  // tile does not fit; drop it
    for (int ty = 0; ty < t.image.height; ++ty)
      for (int tx = 0; tx < t.image.width; ++tx) {
        auto& px = doc.at(x + tx, y + ty);
        px = std::min(px, t.image.at(tx, ty));
      }
    for (auto w : t.words) {
      w.box = Box(w.box.x0 + x, w.box.y0 + y, w.box.x1 + x, w.box.y1 + y);
      for (auto& cb : w.char_boxes)
        cb = Box(cb.x0 + x, cb.y0 + y, cb.x1 + x, cb.y1 + y);
      words.push_back(std::move(w));
    }
    x += t.image.width + gx;
    row_h = std::max(row_h, t.image.height);
  }

  // whole-document rotation; boxes become tight bounds of rotated boxes
  const double theta = rng.range_real(-cfg.rotation_range, cfg.rotation_range);
  if (theta != 0.0) {
    doc = rotate(doc, theta, 255);
    const double cx = (D - 1) * 0.5, cy = (D - 1) * 0.5;
    std::vector<WordAnnotation> rotated;
    for (auto& w : words) {
      WordAnnotation rw;
      rw.text = w.text;
      for (const auto& cb : w.char_boxes) {
        Box rb = detail::rotate_box(cb, theta, cx, cy, D, D);
        if (rb.x1 - rb.x0 >= 1 && rb.y1 - rb.y0 >= 1) rw.char_boxes.push_back(rb);
      }
      if (rw.char_boxes.empty()) continue;
      rw.box = rw.char_boxes[0];
      for (const auto& b : rw.char_boxes) rw.box = box_union(rw.box, b);
      rotated.push_back(std::move(rw));
    }
    words = std::move(rotated);
  }

  // exactly one document-level degradation (or stacked when configured)
  auto apply_family = [&](int family) {
    switch (family) {
      case 0: doc = gaussian_blur(doc, rng.range_real(0.5, 1.5)); break;
      case 1:
        doc = detail::block_compress(doc,
                                     static_cast<int>(rng.range_int(30, 90)));
        break;
      case 2: {
        const double f = rng.range_real(1.3, 2.5);
        const int w2 = std::max(8, static_cast<int>(std::lround(D / f)));
        doc = resample(resample(doc, w2, w2), D, D);
        break;
      }
      default: break;
    }
  };
  if (cfg.stack_doc_noise) {
    if (rng.bernoulli(cfg.doc_blur)) apply_family(0);
    if (rng.bernoulli(cfg.doc_compress)) apply_family(1);
    if (rng.bernoulli(cfg.doc_downsample)) apply_family(2);
  } else {
    apply_family(rng.pick_weighted(
        {cfg.doc_blur, cfg.doc_compress, cfg.doc_downsample,
         std::max(0.0, 1.0 - cfg.doc_blur - cfg.doc_compress -
                           cfg.doc_downsample)}));
  }

  DocumentSample sample;
  sample.image = std::move(doc);
  sample.gt = BinaryMap(D, D);
  for (const auto& w : words)
    for (const auto& cb : w.char_boxes)
      for (int yy = cb.y0; yy < cb.y1; ++yy)
        for (int xx = cb.x0; xx < cb.x1; ++xx) sample.gt.at(xx, yy) = 1;
  sample.words = std::move(words);
  sample.seed = seed;
  sample.provenance = synth_config_to_json(cfg);
  return sample;
}

// ---------------------------------------------------------------------------
// Dataset files and manifest.

inline nlohmann::json annotation_to_json(const DocumentSample& s) {
  nlohmann::json words = nlohmann::json::array();
  for (const auto& w : s.words) {
    nlohmann::json chars = nlohmann::json::array();
    for (const auto& b : w.char_boxes)
      chars.push_back({b.x0, b.y0, b.x1, b.y1});
    words.push_back({{"text", w.text},
                     {"box", {w.box.x0, w.box.y0, w.box.x1, w.box.y1}},
                     {"chars", chars}});
  }
  return nlohmann::json{{"seed", s.seed}, {"words", words}};
}

struct Annotation {
  uint64_t seed = 0;
  std::vector<WordAnnotation> words;
};

inline Annotation annotation_from_json(const nlohmann::json& j) {
  Annotation a;
  a.seed = j.value("seed", uint64_t{0});
  for (const auto& w : j.at("words")) {
    WordAnnotation wa;
    wa.text = w.at("text").get<std::string>();
    const auto& b = w.at("box");
    wa.box = Box(b.at(0), b.at(1), b.at(2), b.at(3));
    for (const auto& cb : w.at("chars"))
      wa.char_boxes.emplace_back(cb.at(0), cb.at(1), cb.at(2), cb.at(3));
    a.words.push_back(std::move(wa));
  }
  return a;
}

inline Annotation read_annotation(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_annotation: cannot open " + path);
  return annotation_from_json(nlohmann::json::parse(f));
}

struct DatasetEntry {
  int index = 0;
  uint64_t seed = 0;
  std::string image, gt, ann;  // relative to the manifest directory
};

struct DatasetManifest {
  int version = 1;
  nlohmann::json config;
  std::string config_hash;
  uint64_t base_seed = 0;
  int count = 0;
  std::vector<DatasetEntry> entries;
};

inline nlohmann::json manifest_to_json(const DatasetManifest& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : m.entries)
    entries.push_back({{"index", e.index},
                       {"seed", e.seed},
                       {"image", e.image},
                       {"gt", e.gt},
                       {"ann", e.ann}});
  return nlohmann::json{{"version", m.version},   {"config", m.config},
                        {"config_hash", m.config_hash},
                        {"base_seed", m.base_seed}, {"count", m.count},
                        {"entries", entries}};
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j) {
  DatasetManifest m;
  m.version = j.at("version").get<int>();
  m.config = j.at("config");
  m.config_hash = j.value("config_hash", std::string{});
  m.base_seed = j.at("base_seed").get<uint64_t>();
  m.count = j.at("count").get<int>();
  for (const auto& e : j.at("entries")) {
    DatasetEntry de;
    de.index = e.at("index").get<int>();
    de.seed = e.at("seed").get<uint64_t>();
    de.image = e.at("image").get<std::string>();
    de.gt = e.at("gt").get<std::string>();
    de.ann = e.at("ann").get<std::string>();
    m.entries.push_back(std::move(de));
  }
  return m;
}

inline DatasetManifest read_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_manifest: cannot open " + path);
  return manifest_from_json(nlohmann::json::parse(f));
}

namespace detail {

inline std::string index_name(const char* prefix, int i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06d.%s", prefix, i, ext);
  return buf;
}

}  // namespace detail

// Writes n samples plus manifest.json. Sample i uses seed
// mix_seed(base_seed, i), so any subset regenerates independently and the
// output is identical for any worker count.
inline DatasetManifest generate_dataset(int n, const SynthConfig& cfg,
                                        const FontLibrary& fonts,
                                        const TextSampler& corpus,
                                        const std::string& out_dir,
                                        uint64_t base_seed, int workers = 1) {
  if (n < 1) throw std::invalid_argument("generate_dataset: n must be >= 1");
  cfg.validate();
  std::filesystem::create_directories(out_dir);

  DatasetManifest manifest;
  manifest.config = synth_config_to_json(cfg);
  manifest.config_hash = sha256_hex(manifest.config.dump());
  manifest.base_seed = base_seed;
  manifest.count = n;
  for (int i = 0; i < n; ++i)
    manifest.entries.push_back({i, mix_seed(base_seed, i),
                                detail::index_name("img", i, "pgm"),
                                detail::index_name("gt", i, "pgm"),
                                detail::index_name("ann", i, "json")});

  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::string first_error;
  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error.empty()) return;
      }
      try {
        const auto& e = manifest.entries[i];
        DocumentSample s = compose_document(cfg, fonts, corpus, e.seed);
        const auto dir = std::filesystem::path(out_dir);
        write_pgm(s.image, (dir / e.image).string());
        write_pgm(s.gt, (dir / e.gt).string());
        std::ofstream af(dir / e.ann);
        if (!af) throw std::runtime_error("cannot open annotation file");
        af << annotation_to_json(s).dump(1) << "\n";
        if (!af) throw std::runtime_error("short annotation write");
      } catch (const std::exception& ex) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (first_error.empty())
          first_error = "generate_dataset: sample " + std::to_string(i) +
                        ": " + ex.what();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (!first_error.empty()) throw std::runtime_error(first_error);

  std::ofstream mf(std::filesystem::path(out_dir) / "manifest.json");
  if (!mf) throw std::runtime_error("generate_dataset: cannot write manifest");
  mf << manifest_to_json(manifest).dump(1) << "\n";
  if (!mf) throw std::runtime_error("generate_dataset: short manifest write");
  return manifest;
}

}  // namespace docmask
