// docmask/infer.hpp -- batched forward pass over tensors and tiled
// full-page inference with overlap averaging.
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

#include <stdexcept>
#include <vector>

#include "docmask/raster.hpp"
#include "docmask/tensor.hpp"
#include "docmask/unet.hpp"

namespace docmask {

// Forward pass on [batch, 1, H, W] input scaled to [0,1]; H and W must be
// divisible by the config's stride alignment.
inline Tensor unet_forward(const UNetParams& params, const Tensor& x) {
  if (x.shape.size() != 4 || x.shape[1] != params.cfg.input_channels)
    throw std::invalid_argument("unet_forward: input must be [batch,1,H,W], got " +
                                shape_str(x.shape));
  const int64_t B = x.shape[0], H = x.shape[2], W = x.shape[3];
  UNetWork work;
  work.resize(params.cfg, H, W);
  Tensor out({B, params.cfg.output_channels, H, W});
  const int64_t plane = H * W;
  for (int64_t b = 0; b < B; ++b) {
    unet_forward_item(params, work, x.data.data() + b * plane);
    std::copy(work.prob.data.begin(), work.prob.data.end(),
              out.data.begin() + b * plane);
  }
  return out;
}

// Tile start positions covering [0, extent) with the given stride; the last
// tile may run past the extent (the page is padded to cover it).
inline std::vector<int> tile_positions(int extent, int tile, int stride) {
  std::vector<int> pos{0};
  while (pos.back() + tile < extent) pos.push_back(pos.back() + stride);
  return pos;
}

// Full-page probability map: pads the page with white to the tile grid,
// runs each tile through the network and averages overlapped bands.
// Tiles are evaluated in a fixed row-major order.
inline ProbMap predict_page(const UNetParams& params, const Raster& page,
                            int tile = 256, int overlap = 32) {
  if (tile < params.cfg.stride_alignment() ||
      tile % params.cfg.stride_alignment())
    throw std::invalid_argument("predict_page: tile must be a positive multiple of " +
                                std::to_string(params.cfg.stride_alignment()));
  if (overlap < 0 || overlap >= tile)
    throw std::invalid_argument("predict_page: overlap must be in [0, tile)");
  const int stride = tile - overlap;
  const auto xs = tile_positions(page.width, tile, stride);
  const auto ys = tile_positions(page.height, tile, stride);
  const int pad_w = xs.back() + tile;
  const int pad_h = ys.back() + tile;

  std::vector<float> padded(static_cast<size_t>(pad_w) * pad_h, 1.f);
  for (int y = 0; y < page.height; ++y)
    for (int x = 0; x < page.width; ++x)
      padded[static_cast<size_t>(y) * pad_w + x] = page.at(x, y) / 255.f;

  std::vector<float> sum(padded.size(), 0.f);
  std::vector<int32_t> hits(padded.size(), 0);
  UNetWork work;
  work.resize(params.cfg, tile, tile);
  std::vector<float> tile_buf(static_cast<size_t>(tile) * tile);
  for (int ty : ys) {
    for (int tx : xs) {
      for (int y = 0; y < tile; ++y)
        std::copy_n(&padded[static_cast<size_t>(ty + y) * pad_w + tx], tile,
                    &tile_buf[static_cast<size_t>(y) * tile]);
      unet_forward_item(params, work, tile_buf.data());
      for (int y = 0; y < tile; ++y) {
        const float* src = work.prob.data.data() + static_cast<size_t>(y) * tile;
        float* dst = &sum[static_cast<size_t>(ty + y) * pad_w + tx];
        int32_t* cnt = &hits[static_cast<size_t>(ty + y) * pad_w + tx];
        for (int x = 0; x < tile; ++x) {
          dst[x] += src[x];
          cnt[x] += 1;
        }
      }
    }
  }
  ProbMap out(page.width, page.height);
  for (int y = 0; y < page.height; ++y)
    for (int x = 0; x < page.width; ++x) {
      const size_t i = static_cast<size_t>(y) * pad_w + x;
      out.at(x, y) = sum[i] / static_cast<float>(hits[i]);
    }
  return out;
}

}  // namespace docmask
