// docmask/raster.hpp -- grayscale image primitives shared by every stage:
// boxes, IOU, connected components, morphology, photometric and geometric
// transforms, and PGM I/O.
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
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace docmask {

// 8-bit grayscale image, row-major. 0 = black ink, 255 = white paper.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  Raster() = default;
  Raster(int w, int h, uint8_t fill = 0) : width(w), height(h) {
    if (w < 1 || h < 1) throw std::invalid_argument("Raster: empty dimensions");
    data.assign(static_cast<size_t>(w) * h, fill);
  }

  uint8_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  uint8_t at(int x, int y) const {
    return data[static_cast<size_t>(y) * width + x];
  }
  size_t size() const { return data.size(); }

  bool operator==(const Raster& o) const {
    return width == o.width && height == o.height && data == o.data;
  }
};

// Row-major {0,1} map.
struct BinaryMap {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  BinaryMap() = default;
  BinaryMap(int w, int h, uint8_t fill = 0) : width(w), height(h) {
    if (w < 1 || h < 1)
      throw std::invalid_argument("BinaryMap: empty dimensions");
    if (fill > 1) throw std::invalid_argument("BinaryMap: fill must be 0/1");
    data.assign(static_cast<size_t>(w) * h, fill);
  }

  uint8_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  uint8_t at(int x, int y) const {
    return data[static_cast<size_t>(y) * width + x];
  }

  int64_t count_ones() const {
    int64_t n = 0;
    for (uint8_t v : data) n += v;
    return n;
  }

  bool operator==(const BinaryMap& o) const {
    return width == o.width && height == o.height && data == o.data;
  }
};

// Per-pixel probability map in [0,1], the detector output carrier.
struct ProbMap {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  ProbMap() = default;
  ProbMap(int w, int h, float fill = 0.f) : width(w), height(h) {
    if (w < 1 || h < 1) throw std::invalid_argument("ProbMap: empty dimensions");
    data.assign(static_cast<size_t>(w) * h, fill);
  }

  float& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  float at(int x, int y) const {
    return data[static_cast<size_t>(y) * width + x];
  }
};

// Half-open integer pixel box: [x0,x1) x [y0,y1). Never empty.
struct Box {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  Box() = default;
  Box(int ax0, int ay0, int ax1, int ay1) : x0(ax0), y0(ay0), x1(ax1), y1(ay1) {
    if (x1 <= x0 || y1 <= y0) throw std::invalid_argument("Box: empty box");
  }

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  int64_t area() const { return static_cast<int64_t>(width()) * height(); }

  bool contains(int x, int y) const {
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }
  bool intersects(const Box& o) const {
    return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1;
  }

  bool operator==(const Box& o) const {
    return x0 == o.x0 && y0 == o.y0 && x1 == o.x1 && y1 == o.y1;
  }
};

inline Box box_union(const Box& a, const Box& b) {
  return Box(std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1),
             std::max(a.y1, b.y1));
}

inline double iou(const Box& a, const Box& b) {
  int64_t ix0 = std::max(a.x0, b.x0);
  int64_t iy0 = std::max(a.y0, b.y0);
  int64_t ix1 = std::min(a.x1, b.x1);
  int64_t iy1 = std::min(a.y1, b.y1);
  if (ix1 <= ix0 || iy1 <= iy0) return 0.0;
  int64_t inter = (ix1 - ix0) * (iy1 - iy0);
  int64_t uni = a.area() + b.area() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

struct Component {
  Box box;
  int64_t pixel_count = 0;
};

// Labels 1-regions, 4- or 8-connectivity. Components are tight-boxed and
// sorted by (y0, x0).
inline std::vector<Component> connected_components(const BinaryMap& map,
                                                   int connectivity = 8) {
  if (connectivity != 4 && connectivity != 8)
    throw std::invalid_argument("connected_components: connectivity must be 4 or 8");
  const int w = map.width, h = map.height;
  std::vector<int32_t> label(static_cast<size_t>(w) * h, 0);
  std::vector<Component> out;
  std::vector<int32_t> stack;
  int32_t next = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!map.at(x, y) || label[static_cast<size_t>(y) * w + x]) continue;
      ++next;
      int minx = x, maxx = x, miny = y, maxy = y;
      int64_t count = 0;
      stack.clear();
      stack.push_back(y * w + x);
      label[static_cast<size_t>(y) * w + x] = next;
      while (!stack.empty()) {
        int32_t p = stack.back();
        stack.pop_back();
        int py = p / w, px = p % w;
        ++count;
        minx = std::min(minx, px);
        maxx = std::max(maxx, px);
        miny = std::min(miny, py);
        maxy = std::max(maxy, py);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (connectivity == 4 && dx != 0 && dy != 0) continue;
            int nx = px + dx, ny = py + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            size_t ni = static_cast<size_t>(ny) * w + nx;
            if (map.data[ni] && !label[ni]) {
              label[ni] = next;
              stack.push_back(ny * w + nx);
            }
          }
        }
      }
      out.push_back({Box(minx, miny, maxx + 1, maxy + 1), count});
    }
  }
  std::sort(out.begin(), out.end(), [](const Component& a, const Component& b) {
    if (a.box.y0 != b.box.y0) return a.box.y0 < b.box.y0;
    return a.box.x0 < b.box.x0;
  });
  return out;
}

// Chebyshev (square structuring element) dilation; separable as a horizontal
// then vertical sliding-window OR via prefix counts.
inline BinaryMap dilate(const BinaryMap& map, int radius) {
  if (radius < 0) throw std::invalid_argument("dilate: negative radius");
  if (radius == 0) return map;
  const int w = map.width, h = map.height;
  BinaryMap tmp(w, h), out(w, h);
  std::vector<int32_t> prefix;
  prefix.resize(std::max(w, h) + 1);
  for (int y = 0; y < h; ++y) {
    prefix[0] = 0;
    for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + map.at(x, y);
    for (int x = 0; x < w; ++x) {
      int lo = std::max(0, x - radius), hi = std::min(w - 1, x + radius);
      tmp.at(x, y) = prefix[hi + 1] - prefix[lo] > 0 ? 1 : 0;
    }
  }
  for (int x = 0; x < w; ++x) {
    prefix[0] = 0;
    for (int y = 0; y < h; ++y) prefix[y + 1] = prefix[y] + tmp.at(x, y);
    for (int y = 0; y < h; ++y) {
      int lo = std::max(0, y - radius), hi = std::min(h - 1, y + radius);
      out.at(x, y) = prefix[hi + 1] - prefix[lo] > 0 ? 1 : 0;
    }
  }
  return out;
}

// Separable Gaussian, kernel half-width ceil(3*sigma), clamp-to-edge rows and
// columns, double accumulation, single rounding at the end.
inline Raster gaussian_blur(const Raster& img, double sigma) {
  if (sigma < 0) throw std::invalid_argument("gaussian_blur: negative sigma");
  if (sigma == 0) return img;
  const int w = img.width, h = img.height;
  const int half = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * half + 1);
  double total = 0.0;
  for (int i = -half; i <= half; ++i) {
    kernel[i + half] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    total += kernel[i + half];
  }
  for (double& k : kernel) k /= total;

  std::vector<double> mid(static_cast<size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -half; i <= half; ++i) {
        int sx = std::clamp(x + i, 0, w - 1);
        acc += kernel[i + half] * img.at(sx, y);
      }
      mid[static_cast<size_t>(y) * w + x] = acc;
    }
  }
  Raster out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -half; i <= half; ++i) {
        int sy = std::clamp(y + i, 0, h - 1);
        acc += kernel[i + half] * mid[static_cast<size_t>(sy) * w + x];
      }
      out.at(x, y) = static_cast<uint8_t>(std::clamp(std::lround(acc), 0l, 255l));
    }
  }
  return out;
}

// Rotation about the image center, bilinear sampling, out-of-source pixels
// take `fill`. Output keeps the input dimensions. Small rotations only.
inline Raster rotate(const Raster& img, double degrees, uint8_t fill) {
  if (std::abs(degrees) > 45.0)
    throw std::invalid_argument("rotate: |degrees| must be <= 45");
  if (degrees == 0.0) return img;
  const int w = img.width, h = img.height;
  const double cx = (w - 1) * 0.5, cy = (h - 1) * 0.5;
  const double rad = degrees * 3.14159265358979323846 / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);
  Raster out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // Inverse map: rotate the output position back into the source.
      double dx = x - cx, dy = y - cy;
      double sx = c * dx + s * dy + cx;
      double sy = -s * dx + c * dy + cy;
      double v;
      if (sx < -1.0 || sy < -1.0 || sx > w || sy > h) {
        v = fill;
      } else {
        int ix = static_cast<int>(std::floor(sx));
        int iy = static_cast<int>(std::floor(sy));
        double fx = sx - ix, fy = sy - iy;
        auto sample = [&](int px, int py) -> double {
          if (px < 0 || py < 0 || px >= w || py >= h) return fill;
          return img.at(px, py);
        };
        double top = sample(ix, iy) * (1 - fx) + sample(ix + 1, iy) * fx;
        double bot = sample(ix, iy + 1) * (1 - fx) + sample(ix + 1, iy + 1) * fx;
        v = top * (1 - fy) + bot * fy;
      }
      out.at(x, y) = static_cast<uint8_t>(std::clamp(std::lround(v), 0l, 255l));
    }
  }
  return out;
}

// Bilinear resampling with pixel-center alignment; identity when dimensions
// are unchanged.
inline Raster resample(const Raster& img, int new_w, int new_h) {
  if (new_w < 1 || new_h < 1)
    throw std::invalid_argument("resample: empty target dimensions");
  if (new_w == img.width && new_h == img.height) return img;
  Raster out(new_w, new_h);
  const int w = img.width, h = img.height;
  const double sx_scale = static_cast<double>(w) / new_w;
  const double sy_scale = static_cast<double>(h) / new_h;
  for (int y = 0; y < new_h; ++y) {
    double sy = (y + 0.5) * sy_scale - 0.5;
    sy = std::clamp(sy, 0.0, static_cast<double>(h - 1));
    int iy = static_cast<int>(sy);
    double fy = sy - iy;
    int iy1 = std::min(iy + 1, h - 1);
    for (int x = 0; x < new_w; ++x) {
      double sx = (x + 0.5) * sx_scale - 0.5;
      sx = std::clamp(sx, 0.0, static_cast<double>(w - 1));
      int ix = static_cast<int>(sx);
      double fx = sx - ix;
      int ix1 = std::min(ix + 1, w - 1);
      double top = img.at(ix, iy) * (1 - fx) + img.at(ix1, iy) * fx;
      double bot = img.at(ix, iy1) * (1 - fx) + img.at(ix1, iy1) * fx;
      double v = top * (1 - fy) + bot * fy;
      out.at(x, y) = static_cast<uint8_t>(std::clamp(std::lround(v), 0l, 255l));
    }
  }
  return out;
}

// Affine map of [min(img), max(img)] onto [lo, hi]; constant images map to lo.
inline Raster stretch_range(const Raster& img, uint8_t lo, uint8_t hi) {
  if (lo >= hi) throw std::invalid_argument("stretch_range: lo must be < hi");
  uint8_t mn = 255, mx = 0;
  for (uint8_t v : img.data) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  Raster out(img.width, img.height);
  if (mn == mx) {
    std::fill(out.data.begin(), out.data.end(), lo);
    return out;
  }
  const double scale = static_cast<double>(hi - lo) / (mx - mn);
  for (size_t i = 0; i < img.data.size(); ++i) {
    double v = lo + (img.data[i] - mn) * scale;
    out.data[i] = static_cast<uint8_t>(std::clamp(std::lround(v), 0l, 255l));
  }
  return out;
}

inline Raster to_raster(const ProbMap& p) {
  Raster out(p.width, p.height);
  for (size_t i = 0; i < p.data.size(); ++i) {
    double v = std::clamp(static_cast<double>(p.data[i]), 0.0, 1.0) * 255.0;
    out.data[i] = static_cast<uint8_t>(std::lround(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// PGM (P5, maxval 255): the canonical codec-free on-disk image format.

inline void write_pgm(const Raster& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_pgm: cannot open " + path);
  f << "P5\n" << img.width << " " << img.height << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.data.data()),
          static_cast<std::streamsize>(img.data.size()));
  if (!f) throw std::runtime_error("write_pgm: short write to " + path);
}

inline void write_pgm(const BinaryMap& map, const std::string& path) {
  Raster img(map.width, map.height);
  for (size_t i = 0; i < map.data.size(); ++i)
    img.data[i] = map.data[i] ? 255 : 0;
  write_pgm(img, path);
}

namespace detail {

inline int pgm_next_int(std::istream& f, const std::string& path) {
  // Skips whitespace and '#' comments between header tokens.
  int c = f.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = f.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = f.get();
  }
  if (c == EOF || !std::isdigit(c))
    throw std::runtime_error("read_pgm: malformed header in " + path);
  int value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    c = f.get();
  }
  if (c != EOF) f.unget();
  return value;
}

}  // namespace detail

inline Raster read_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_pgm: cannot open " + path);
  char m0 = 0, m1 = 0;
  f.get(m0);
  f.get(m1);
  if (m0 != 'P' || m1 != '5')
    throw std::runtime_error("read_pgm: not a binary PGM: " + path);
  int w = detail::pgm_next_int(f, path);
  int h = detail::pgm_next_int(f, path);
  int maxval = detail::pgm_next_int(f, path);
  if (maxval != 255)
    throw std::runtime_error("read_pgm: unsupported maxval in " + path);
  f.get();  // single whitespace byte before the payload
  Raster img(w, h);
  f.read(reinterpret_cast<char*>(img.data.data()),
         static_cast<std::streamsize>(img.data.size()));
  if (f.gcount() != static_cast<std::streamsize>(img.data.size()))
    throw std::runtime_error("read_pgm: truncated payload in " + path);
  return img;
}

// Reads a {0,255} PGM back into a BinaryMap (128 threshold for tolerance).
inline BinaryMap read_binary_pgm(const std::string& path) {
  Raster img = read_pgm(path);
  BinaryMap map(img.width, img.height);
  for (size_t i = 0; i < img.data.size(); ++i)
    map.data[i] = img.data[i] >= 128 ? 1 : 0;
  return map;
}

}  // namespace docmask
