// docmask/unet.hpp -- encoder/decoder segmentation network: per level two
// 3x3 convs + rectifier, 2x2 max-pool down, 2x2 stride-2 transposed conv up
// with skip concatenation, 1x1 head with logistic output.
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

#include <cstring>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "docmask/nn.hpp"
#include "docmask/rng.hpp"
#include "docmask/tensor.hpp"

namespace docmask {

struct UNetConfig {
  int levels = 4;
  std::vector<int> encoder_channels = {32, 64, 128, 256};
  int convs_per_level = 2;
  int kernel = 3;
  int input_channels = 1;
  int output_channels = 1;

  void validate() const {
    if (levels < 2 || levels != static_cast<int>(encoder_channels.size()))
      throw std::invalid_argument(
          "UNetConfig: levels must be >= 2 and match encoder_channels");
    for (size_t i = 1; i < encoder_channels.size(); ++i)
      if (encoder_channels[i] <= encoder_channels[i - 1])
        throw std::invalid_argument(
            "UNetConfig: encoder_channels must be strictly increasing");
    if (encoder_channels.front() < 1)
      throw std::invalid_argument("UNetConfig: channels must be positive");
    if (convs_per_level != 2 || kernel != 3)
      throw std::invalid_argument(
          "UNetConfig: only convs_per_level=2 with 3x3 kernels is supported");
    if (input_channels != 1 || output_channels != 1)
      throw std::invalid_argument(
          "UNetConfig: single-channel input/output only");
  }

  // Input spatial dims must be divisible by this (one halving per level).
  int stride_alignment() const { return 1 << (levels - 1); }

  bool operator==(const UNetConfig& o) const {
    return levels == o.levels && encoder_channels == o.encoder_channels &&
           convs_per_level == o.convs_per_level && kernel == o.kernel &&
           input_channels == o.input_channels &&
           output_channels == o.output_channels;
  }
};

// Weights (or their gradients -- same structure) for the network above.
template <typename T>
struct UNetParamsT {
  struct Conv {
    TensorT<T> w, b;
  };

  UNetConfig cfg;
  std::vector<Conv> enc1, enc2;      // per level
  std::vector<Conv> up, dec1, dec2;  // per decoder level l (produces ch[l])
  Conv head;

  void alloc(const UNetConfig& c) {
    c.validate();
    cfg = c;
    const auto& ch = c.encoder_channels;
    const int L = c.levels;
    enc1.resize(L);
    enc2.resize(L);
    for (int l = 0; l < L; ++l) {
      int64_t in = l == 0 ? c.input_channels : ch[l - 1];
      enc1[l].w = TensorT<T>({ch[l], in, 3, 3});
      enc1[l].b = TensorT<T>({ch[l]});
      enc2[l].w = TensorT<T>({ch[l], ch[l], 3, 3});
      enc2[l].b = TensorT<T>({ch[l]});
    }
    up.resize(L - 1);
    dec1.resize(L - 1);
    dec2.resize(L - 1);
    for (int l = 0; l < L - 1; ++l) {
      up[l].w = TensorT<T>({ch[l + 1], ch[l], 2, 2});
      up[l].b = TensorT<T>({ch[l]});
      dec1[l].w = TensorT<T>({ch[l], 2 * ch[l], 3, 3});
      dec1[l].b = TensorT<T>({ch[l]});
      dec2[l].w = TensorT<T>({ch[l], ch[l], 3, 3});
      dec2[l].b = TensorT<T>({ch[l]});
    }
    head.w = TensorT<T>({c.output_channels, ch[0], 1, 1});
    head.b = TensorT<T>({c.output_channels});
  }

  // Canonical parameter order: encoder levels top-down, decoder levels
  // deep-to-shallow, head last. Seeded init and ADAM both follow it.
  template <typename Fn>
  void visit(Fn&& fn) {
    for (int l = 0; l < cfg.levels; ++l) {
      std::string p = "enc" + std::to_string(l);
      fn(p + ".conv1.w", enc1[l].w);
      fn(p + ".conv1.b", enc1[l].b);
      fn(p + ".conv2.w", enc2[l].w);
      fn(p + ".conv2.b", enc2[l].b);
    }
    for (int l = cfg.levels - 2; l >= 0; --l) {
      std::string p = "dec" + std::to_string(l);
      fn(p + ".up.w", up[l].w);
      fn(p + ".up.b", up[l].b);
      fn(p + ".conv1.w", dec1[l].w);
      fn(p + ".conv1.b", dec1[l].b);
      fn(p + ".conv2.w", dec2[l].w);
      fn(p + ".conv2.b", dec2[l].b);
    }
    fn("head.w", head.w);
    fn("head.b", head.b);
  }

  void zero() {
    visit([](const std::string&, TensorT<T>& t) { t.zero(); });
  }

  // Fan-in scaled uniform init. Biases are zero except the head bias,
  // which starts at the prior logit of a sparse text mask so early dice
  // gradients pull true positives up instead of thrashing the whole map
  // around the all-background attractor. Element draw order is the
  // canonical visit order, row-major within each tensor.
  static constexpr double kHeadBiasPrior = -3.0;

  void init_weights(uint64_t seed) {
    Rng rng(seed);
    visit([&](const std::string& name, TensorT<T>& t) {
      if (name.back() == 'b') {
        t.zero();
        if (name == "head.b")
          for (auto& v : t.data) v = static_cast<T>(kHeadBiasPrior);
        return;
      }
      int64_t fan_in = 1;
      for (size_t i = 1; i < t.shape.size(); ++i) fan_in *= t.shape[i];
      if (name.find(".up.") != std::string::npos)
        fan_in = t.shape[0] * t.shape[2] * t.shape[3];  // [C_in, OC, kh, kw]
      const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
      for (auto& v : t.data)
        v = static_cast<T>(rng.range_real(-limit, limit));
    });
  }
};

using UNetParams = UNetParamsT<float>;

// Smoothed dice loss over whole tensors (equal shapes, eps > 0).
template <typename T>
double dice_loss(const TensorT<T>& pred, const TensorT<T>& gt, double eps) {
  if (!pred.same_shape(gt))
    throw std::invalid_argument("dice_loss: shape mismatch: " +
                                shape_str(pred.shape) + " vs " +
                                shape_str(gt.shape));
  if (eps <= 0) throw std::invalid_argument("dice_loss: eps must be > 0");
  return nn::dice_loss_span(pred.data.data(), gt.data.data(), pred.numel(),
                            eps);
}

// Activation storage for one item, reused across calls.
template <typename T>
struct UNetWorkT {
  UNetConfig cfg;
  int64_t H = 0, W = 0;

  std::vector<TensorT<T>> enc_a, enc_b, pooled;
  std::vector<std::vector<uint8_t>> pool_idx;
  std::vector<TensorT<T>> cat, dec_a, dec_b;
  TensorT<T> input, prob;
  // gradient mirrors
  std::vector<TensorT<T>> g_enc_b, g_enc_a, g_pooled;
  std::vector<TensorT<T>> g_cat, g_dec_a, g_dec_b;
  TensorT<T> g_prob;
  std::vector<T> col, col_d, scratch;

  void resize(const UNetConfig& c, int64_t h, int64_t w) {
    if (cfg == c && H == h && W == w) return;
    c.validate();
    if (h % c.stride_alignment() || w % c.stride_alignment())
      throw std::invalid_argument(
          "UNet: input dims must be divisible by " +
          std::to_string(c.stride_alignment()));
    cfg = c;
    H = h;
    W = w;
    const auto& ch = c.encoder_channels;
    const int L = c.levels;
    auto dims = [&](int l) {
      return std::pair<int64_t, int64_t>{h >> l, w >> l};
    };
    enc_a.assign(L, {});
    enc_b.assign(L, {});
    g_enc_a.assign(L, {});
    g_enc_b.assign(L, {});
    pooled.assign(L - 1, {});
    g_pooled.assign(L - 1, {});
    pool_idx.assign(L - 1, {});
    for (int l = 0; l < L; ++l) {
      auto [lh, lw] = dims(l);
      enc_a[l] = TensorT<T>({ch[l], lh, lw});
      enc_b[l] = TensorT<T>({ch[l], lh, lw});
      g_enc_a[l] = TensorT<T>({ch[l], lh, lw});
      g_enc_b[l] = TensorT<T>({ch[l], lh, lw});
      if (l < L - 1) {
        pooled[l] = TensorT<T>({ch[l], lh / 2, lw / 2});
        g_pooled[l] = TensorT<T>({ch[l], lh / 2, lw / 2});
        pool_idx[l].assign(pooled[l].data.size(), 0);
      }
    }
    cat.assign(L - 1, {});
    dec_a.assign(L - 1, {});
    dec_b.assign(L - 1, {});
    g_cat.assign(L - 1, {});
    g_dec_a.assign(L - 1, {});
    g_dec_b.assign(L - 1, {});
    for (int l = 0; l < L - 1; ++l) {
      auto [lh, lw] = dims(l);
      cat[l] = TensorT<T>({2 * ch[l], lh, lw});
      dec_a[l] = TensorT<T>({ch[l], lh, lw});
      dec_b[l] = TensorT<T>({ch[l], lh, lw});
      g_cat[l] = TensorT<T>({2 * ch[l], lh, lw});
      g_dec_a[l] = TensorT<T>({ch[l], lh, lw});
      g_dec_b[l] = TensorT<T>({ch[l], lh, lw});
    }
    input = TensorT<T>({c.input_channels, h, w});
    prob = TensorT<T>({c.output_channels, h, w});
    g_prob = TensorT<T>({c.output_channels, h, w});
  }
};

using UNetWork = UNetWorkT<float>;

// Forward for one item. x points to input_channels*H*W values in [0,1];
// afterwards work.prob holds the per-pixel probabilities.
template <typename T>
void unet_forward_item(const UNetParamsT<T>& p, UNetWorkT<T>& work,
                       const T* x) {
  const auto& ch = p.cfg.encoder_channels;
  const int L = p.cfg.levels;
  std::memcpy(work.input.data.data(), x,
              sizeof(T) * work.input.data.size());
  const T* cur = work.input.data.data();
  int64_t cur_c = p.cfg.input_channels;
  for (int l = 0; l < L; ++l) {
    const int64_t lh = work.H >> l, lw = work.W >> l;
    nn::conv3_forward(cur, cur_c, lh, lw, p.enc1[l].w.data.data(),
                      p.enc1[l].b.data.data(), ch[l],
                      work.enc_a[l].data.data(), work.col);
    nn::relu_inplace(work.enc_a[l].data.data(), work.enc_a[l].numel());
    nn::conv3_forward(work.enc_a[l].data.data(), ch[l], lh, lw,
                      p.enc2[l].w.data.data(), p.enc2[l].b.data.data(), ch[l],
                      work.enc_b[l].data.data(), work.col);
    nn::relu_inplace(work.enc_b[l].data.data(), work.enc_b[l].numel());
    if (l < L - 1) {
      nn::maxpool2_forward(work.enc_b[l].data.data(), ch[l], lh, lw,
                           work.pooled[l].data.data(),
                           work.pool_idx[l].data());
      cur = work.pooled[l].data.data();
      cur_c = ch[l];
    }
  }
  const T* deep = work.enc_b[L - 1].data.data();
  for (int l = L - 2; l >= 0; --l) {
    const int64_t lh = work.H >> l, lw = work.W >> l;
    const int64_t half = static_cast<int64_t>(ch[l]) * lh * lw;
    nn::tconv2_forward(deep, ch[l + 1], lh / 2, lw / 2, p.up[l].w.data.data(),
                       p.up[l].b.data.data(), ch[l], work.cat[l].data.data(),
                       work.scratch);
    std::memcpy(work.cat[l].data.data() + half, work.enc_b[l].data.data(),
                sizeof(T) * half);
    nn::conv3_forward(work.cat[l].data.data(), 2 * ch[l], lh, lw,
                      p.dec1[l].w.data.data(), p.dec1[l].b.data.data(), ch[l],
                      work.dec_a[l].data.data(), work.col);
    nn::relu_inplace(work.dec_a[l].data.data(), work.dec_a[l].numel());
    nn::conv3_forward(work.dec_a[l].data.data(), ch[l], lh, lw,
                      p.dec2[l].w.data.data(), p.dec2[l].b.data.data(), ch[l],
                      work.dec_b[l].data.data(), work.col);
    nn::relu_inplace(work.dec_b[l].data.data(), work.dec_b[l].numel());
    deep = work.dec_b[l].data.data();
  }
  nn::conv1_forward(work.dec_b[0].data.data(), ch[0], work.H * work.W,
                    p.head.w.data.data(), p.head.b.data.data(),
                    p.cfg.output_channels, work.prob.data.data());
  nn::sigmoid_inplace(work.prob.data.data(), work.prob.numel());
}

// Backward for the item most recently run through unet_forward_item.
// work.g_prob must hold dLoss/dprob; gradients accumulate into `grads`.
template <typename T>
void unet_backward_item(const UNetParamsT<T>& p, UNetWorkT<T>& work,
                        UNetParamsT<T>& grads) {
  const auto& ch = p.cfg.encoder_channels;
  const int L = p.cfg.levels;
  for (auto& t : work.g_enc_a) t.zero();
  for (auto& t : work.g_enc_b) t.zero();
  for (auto& t : work.g_pooled) t.zero();
  for (auto& t : work.g_cat) t.zero();
  for (auto& t : work.g_dec_a) t.zero();
  for (auto& t : work.g_dec_b) t.zero();

  nn::sigmoid_backward_inplace(work.g_prob.data.data(),
                               work.prob.data.data(), work.prob.numel());
  nn::conv1_backward(work.dec_b[0].data.data(), ch[0], work.H * work.W,
                     p.head.w.data.data(), p.cfg.output_channels,
                     work.g_prob.data.data(), work.g_dec_b[0].data.data(),
                     grads.head.w.data.data(), grads.head.b.data.data());
  for (int l = 0; l < L - 1; ++l) {
    const int64_t lh = work.H >> l, lw = work.W >> l;
    const int64_t half = static_cast<int64_t>(ch[l]) * lh * lw;
    nn::relu_backward_inplace(work.g_dec_b[l].data.data(),
                              work.dec_b[l].data.data(),
                              work.dec_b[l].numel());
    nn::conv3_backward(work.dec_a[l].data.data(), ch[l], lh, lw,
                       p.dec2[l].w.data.data(), ch[l],
                       work.g_dec_b[l].data.data(),
                       work.g_dec_a[l].data.data(),
                       grads.dec2[l].w.data.data(),
                       grads.dec2[l].b.data.data(), work.col, work.col_d);
    nn::relu_backward_inplace(work.g_dec_a[l].data.data(),
                              work.dec_a[l].data.data(),
                              work.dec_a[l].numel());
    nn::conv3_backward(work.cat[l].data.data(), 2 * ch[l], lh, lw,
                       p.dec1[l].w.data.data(), ch[l],
                       work.g_dec_a[l].data.data(), work.g_cat[l].data.data(),
                       grads.dec1[l].w.data.data(),
                       grads.dec1[l].b.data.data(), work.col, work.col_d);
    // Split the concat gradient: first half feeds the up-convolution, the
    // second half joins the encoder skip path.
    {
      T* skip = work.g_enc_b[l].data.data();
      const T* src = work.g_cat[l].data.data() + half;
      for (int64_t i = 0; i < half; ++i) skip[i] += src[i];
    }
    const T* up_in = l == L - 2 ? work.enc_b[L - 1].data.data()
                                : work.dec_b[l + 1].data.data();
    T* up_din = l == L - 2 ? work.g_enc_b[L - 1].data.data()
                           : work.g_dec_b[l + 1].data.data();
    nn::tconv2_backward(up_in, ch[l + 1], lh / 2, lw / 2,
                        p.up[l].w.data.data(), ch[l],
                        work.g_cat[l].data.data(), up_din,
                        grads.up[l].w.data.data(), grads.up[l].b.data.data(),
                        work.scratch);
  }
  for (int l = L - 1; l >= 0; --l) {
    const int64_t lh = work.H >> l, lw = work.W >> l;
    nn::relu_backward_inplace(work.g_enc_b[l].data.data(),
                              work.enc_b[l].data.data(),
                              work.enc_b[l].numel());
    nn::conv3_backward(work.enc_a[l].data.data(), ch[l], lh, lw,
                       p.enc2[l].w.data.data(), ch[l],
                       work.g_enc_b[l].data.data(),
                       work.g_enc_a[l].data.data(),
                       grads.enc2[l].w.data.data(),
                       grads.enc2[l].b.data.data(), work.col, work.col_d);
    nn::relu_backward_inplace(work.g_enc_a[l].data.data(),
                              work.enc_a[l].data.data(),
                              work.enc_a[l].numel());
    const T* in = l == 0 ? work.input.data.data()
                         : work.pooled[l - 1].data.data();
    const int64_t in_c = l == 0 ? p.cfg.input_channels : ch[l - 1];
    T* din = l == 0 ? nullptr : work.g_pooled[l - 1].data.data();
    nn::conv3_backward(in, in_c, lh, lw, p.enc1[l].w.data.data(), ch[l],
                       work.g_enc_a[l].data.data(), din,
                       grads.enc1[l].w.data.data(),
                       grads.enc1[l].b.data.data(), work.col, work.col_d);
    if (l > 0)
      nn::maxpool2_backward(work.g_pooled[l - 1].data.data(),
                            work.pool_idx[l - 1].data(), ch[l - 1],
                            work.H >> (l - 1), work.W >> (l - 1),
                            work.g_enc_b[l - 1].data.data());
  }
}

}  // namespace docmask
