// docmask/nn.hpp -- convolution / pooling / activation primitives with
// explicit backward passes. Layout is [C,H,W] row-major per item; all
// kernels accumulate in a fixed order (see gemm.hpp) so forward and
// backward are deterministic for any thread count.
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

#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "docmask/gemm.hpp"

namespace docmask::nn {

// Column block width for the im2col buffers; bounds scratch memory while
// keeping the GEMM inner dimension long enough to run at full speed.
inline constexpr int64_t kConvBlockN = 2048;

// ---------------------------------------------------------------------------
// im2col / col2im for 3x3 same-padded convolution over a linear pixel range
// [n0, n1) of the H*W plane. Column row k = c*9 + (ky*3+kx).

template <typename T>
void im2col3(const T* in, int64_t C, int64_t H, int64_t W, int64_t n0,
             int64_t n1, T* col) {
  const int64_t bn = n1 - n0;
#pragma omp parallel for schedule(static)
  for (int64_t k = 0; k < C * 9; ++k) {
    const int64_t c = k / 9;
    const int64_t dy = (k % 9) / 3 - 1;
    const int64_t dx = (k % 9) % 3 - 1;
    T* dst = col + k * bn;
    const T* src = in + c * H * W;
    for (int64_t n = n0; n < n1;) {
      const int64_t y = n / W;
      const int64_t x = n % W;
      const int64_t seg = std::min(W - x, n1 - n);  // stay on one scanline
      const int64_t sy = y + dy;
      T* d = dst + (n - n0);
      if (sy < 0 || sy >= H) {
        std::memset(d, 0, static_cast<size_t>(seg) * sizeof(T));
      } else {
        const T* s = src + sy * W;
        for (int64_t i = 0; i < seg; ++i) {
          const int64_t sx = x + i + dx;
          d[i] = (sx < 0 || sx >= W) ? T(0) : s[sx];
        }
      }
      n += seg;
    }
  }
}

template <typename T>
void col2im3_acc(const T* col, int64_t C, int64_t H, int64_t W, int64_t n0,
                 int64_t n1, T* din) {
  const int64_t bn = n1 - n0;
#pragma omp parallel for schedule(static)
  for (int64_t c = 0; c < C; ++c) {
    T* dst = din + c * H * W;
    for (int64_t r = 0; r < 9; ++r) {
      const int64_t dy = r / 3 - 1;
      const int64_t dx = r % 3 - 1;
      const T* src = col + (c * 9 + r) * bn;
      for (int64_t n = n0; n < n1;) {
        const int64_t y = n / W;
        const int64_t x = n % W;
        const int64_t seg = std::min(W - x, n1 - n);
        const int64_t sy = y + dy;
        if (sy >= 0 && sy < H) {
          const T* s = src + (n - n0);
          T* d = dst + sy * W;
          for (int64_t i = 0; i < seg; ++i) {
            const int64_t sx = x + i + dx;
            if (sx >= 0 && sx < W) d[sx] += s[i];
          }
        }
        n += seg;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 3x3 same-padded convolution. w: [OC, C, 3, 3], b: [OC].

template <typename T>
void conv3_forward(const T* in, int64_t C, int64_t H, int64_t W, const T* w,
                   const T* b, int64_t OC, T* out, std::vector<T>& col) {
  const int64_t HW = H * W;
  const int64_t K = C * 9;
  col.resize(static_cast<size_t>(K) * std::min(kConvBlockN, HW));
#pragma omp parallel for schedule(static)
  for (int64_t oc = 0; oc < OC; ++oc)
    for (int64_t n = 0; n < HW; ++n) out[oc * HW + n] = b[oc];
  for (int64_t n0 = 0; n0 < HW; n0 += kConvBlockN) {
    const int64_t n1 = std::min(n0 + kConvBlockN, HW);
    im2col3(in, C, H, W, n0, n1, col.data());
    detail::matmul_acc(out + n0, HW, w, K, false, col.data(), n1 - n0, OC,
                       n1 - n0, K);
  }
}

// din must be zeroed (or hold a prior gradient to accumulate into); dw/db
// accumulate. Pass din == nullptr to skip the data gradient (first layer).
template <typename T>
void conv3_backward(const T* in, int64_t C, int64_t H, int64_t W, const T* w,
                    int64_t OC, const T* dout, T* din, T* dw, T* db,
                    std::vector<T>& col, std::vector<T>& col_d) {
  const int64_t HW = H * W;
  const int64_t K = C * 9;
  const int64_t bn_max = std::min(kConvBlockN, HW);
  col.resize(static_cast<size_t>(K) * bn_max);
  col_d.resize(static_cast<size_t>(K) * bn_max);
  for (int64_t oc = 0; oc < OC; ++oc) {
    T sum = T(0);
    const T* p = dout + oc * HW;
    for (int64_t n = 0; n < HW; ++n) sum += p[n];
    db[oc] += sum;
  }
  for (int64_t n0 = 0; n0 < HW; n0 += kConvBlockN) {
    const int64_t n1 = std::min(n0 + kConvBlockN, HW);
    const int64_t bn = n1 - n0;
    im2col3(in, C, H, W, n0, n1, col.data());
    // dw[oc,k] += sum_n dout[oc,n] col[k,n]
    detail::matmul_nt_acc(dw, K, dout + n0, HW, col.data(), bn, OC, K, bn);
    if (din) {
      std::fill(col_d.begin(), col_d.begin() + K * bn, T(0));
      // col_d[k,n] = sum_oc w[oc,k] dout[oc,n]
      detail::matmul_acc(col_d.data(), bn, w, K, true, dout + n0, HW, K, bn,
                         OC);
      col2im3_acc(col_d.data(), C, H, W, n0, n1, din);
    }
  }
}

// ---------------------------------------------------------------------------
// 1x1 convolution. w: [OC, C], b: [OC].

template <typename T>
void conv1_forward(const T* in, int64_t C, int64_t HW, const T* w, const T* b,
                   int64_t OC, T* out) {
#pragma omp parallel for schedule(static)
  for (int64_t oc = 0; oc < OC; ++oc)
    for (int64_t n = 0; n < HW; ++n) out[oc * HW + n] = b[oc];
  detail::matmul_acc(out, HW, w, C, false, in, HW, OC, HW, C);
}

template <typename T>
void conv1_backward(const T* in, int64_t C, int64_t HW, const T* w, int64_t OC,
                    const T* dout, T* din, T* dw, T* db) {
  for (int64_t oc = 0; oc < OC; ++oc) {
    T sum = T(0);
    const T* p = dout + oc * HW;
    for (int64_t n = 0; n < HW; ++n) sum += p[n];
    db[oc] += sum;
  }
  detail::matmul_nt_acc(dw, C, dout, HW, in, HW, OC, C, HW);
  if (din) detail::matmul_acc(din, HW, w, C, true, dout, HW, C, HW, OC);
}

// ---------------------------------------------------------------------------
// 2x2 max pooling, stride 2. idx stores the winning quadrant (dy*2+dx);
// ties go to the first candidate in scan order.

template <typename T>
void maxpool2_forward(const T* in, int64_t C, int64_t H, int64_t W, T* out,
                      uint8_t* idx) {
  const int64_t H2 = H / 2, W2 = W / 2;
#pragma omp parallel for schedule(static)
  for (int64_t c = 0; c < C; ++c) {
    const T* src = in + c * H * W;
    T* dst = out + c * H2 * W2;
    uint8_t* id = idx + c * H2 * W2;
    for (int64_t y = 0; y < H2; ++y) {
      for (int64_t x = 0; x < W2; ++x) {
        T best = src[(2 * y) * W + 2 * x];
        uint8_t bi = 0;
        for (uint8_t q = 1; q < 4; ++q) {
          T v = src[(2 * y + q / 2) * W + 2 * x + q % 2];
          if (v > best) {
            best = v;
            bi = q;
          }
        }
        dst[y * W2 + x] = best;
        id[y * W2 + x] = bi;
      }
    }
  }
}

template <typename T>
void maxpool2_backward(const T* dout, const uint8_t* idx, int64_t C, int64_t H,
                       int64_t W, T* din) {
  const int64_t H2 = H / 2, W2 = W / 2;
#pragma omp parallel for schedule(static)
  for (int64_t c = 0; c < C; ++c) {
    const T* src = dout + c * H2 * W2;
    const uint8_t* id = idx + c * H2 * W2;
    T* dst = din + c * H * W;
    for (int64_t y = 0; y < H2; ++y)
      for (int64_t x = 0; x < W2; ++x) {
        uint8_t q = id[y * W2 + x];
        dst[(2 * y + q / 2) * W + 2 * x + q % 2] += src[y * W2 + x];
      }
  }
}

// ---------------------------------------------------------------------------
// 2x2 stride-2 transposed convolution (non-overlapping taps).
// w: [C_in, OC, 2, 2], b: [OC]; out is [OC, 2H, 2W].

template <typename T>
void tconv2_forward(const T* in, int64_t C, int64_t H, int64_t W, const T* w,
                    const T* b, int64_t OC, T* out, std::vector<T>& scratch) {
  const int64_t HW = H * W;
  scratch.resize(static_cast<size_t>(OC) * (HW + C));
  T* tap_w = scratch.data() + OC * HW;  // [OC, C] for the current tap
  for (int64_t tap = 0; tap < 4; ++tap) {
    for (int64_t oc = 0; oc < OC; ++oc)
      for (int64_t c = 0; c < C; ++c)
        tap_w[oc * C + c] = w[(c * OC + oc) * 4 + tap];
    T* tmp = scratch.data();
    std::fill(tmp, tmp + OC * HW, T(0));
    detail::matmul_acc(tmp, HW, tap_w, C, false, in, HW, OC, HW, C);
    const int64_t a = tap / 2, bq = tap % 2;
#pragma omp parallel for schedule(static)
    for (int64_t oc = 0; oc < OC; ++oc) {
      const T bias = b[oc];
      for (int64_t y = 0; y < H; ++y) {
        const T* s = tmp + oc * HW + y * W;
        T* d = out + oc * 4 * HW + (2 * y + a) * 2 * W + bq;
        for (int64_t x = 0; x < W; ++x) d[2 * x] = s[x] + bias;
      }
    }
  }
}

template <typename T>
void tconv2_backward(const T* in, int64_t C, int64_t H, int64_t W, const T* w,
                     int64_t OC, const T* dout, T* din, T* dw, T* db,
                     std::vector<T>& scratch) {
  const int64_t HW = H * W;
  scratch.resize(static_cast<size_t>(OC) * (HW + 2 * C));
  T* gather = scratch.data();            // [OC, HW], the current tap of dout
  T* tap_w = scratch.data() + OC * HW;   // [OC, C]
  T* tap_dw = tap_w + OC * C;            // [OC, C]
  for (int64_t oc = 0; oc < OC; ++oc) {
    T sum = T(0);
    const T* p = dout + oc * 4 * HW;
    for (int64_t n = 0; n < 4 * HW; ++n) sum += p[n];
    db[oc] += sum;
  }
  for (int64_t tap = 0; tap < 4; ++tap) {
    const int64_t a = tap / 2, bq = tap % 2;
#pragma omp parallel for schedule(static)
    for (int64_t oc = 0; oc < OC; ++oc)
      for (int64_t y = 0; y < H; ++y) {
        const T* s = dout + oc * 4 * HW + (2 * y + a) * 2 * W + bq;
        T* d = gather + oc * HW + y * W;
        for (int64_t x = 0; x < W; ++x) d[x] = s[2 * x];
      }
    for (int64_t oc = 0; oc < OC; ++oc)
      for (int64_t c = 0; c < C; ++c)
        tap_w[oc * C + c] = w[(c * OC + oc) * 4 + tap];
    std::fill(tap_dw, tap_dw + OC * C, T(0));
    detail::matmul_nt_acc(tap_dw, C, gather, HW, in, HW, OC, C, HW);
    for (int64_t oc = 0; oc < OC; ++oc)
      for (int64_t c = 0; c < C; ++c)
        dw[(c * OC + oc) * 4 + tap] += tap_dw[oc * C + c];
    if (din)
      detail::matmul_acc(din, HW, tap_w, C, true, gather, HW, C, HW, OC);
  }
}

// ---------------------------------------------------------------------------
// Pointwise nonlinearities.

template <typename T>
void relu_inplace(T* v, int64_t n) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) v[i] = v[i] > T(0) ? v[i] : T(0);
}

// dy is masked in place using the stored post-activation values.
template <typename T>
void relu_backward_inplace(T* dy, const T* out, int64_t n) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i)
    if (out[i] <= T(0)) dy[i] = T(0);
}

template <typename T>
void sigmoid_inplace(T* v, int64_t n) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i)
    v[i] = T(1) / (T(1) + std::exp(-v[i]));
}

template <typename T>
void sigmoid_backward_inplace(T* dy, const T* out, int64_t n) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) dy[i] *= out[i] * (T(1) - out[i]);
}

// ---------------------------------------------------------------------------
// Smoothed dice loss: 1 - (2*sum(p*g) + eps) / (sum(p) + sum(g) + eps).
// Sums run in double regardless of T.

template <typename T>
double dice_loss_span(const T* pred, const T* gt, int64_t n, double eps) {
  double sp = 0.0, sg = 0.0, spg = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    sp += static_cast<double>(pred[i]);
    sg += static_cast<double>(gt[i]);
    spg += static_cast<double>(pred[i]) * static_cast<double>(gt[i]);
  }
  return 1.0 - (2.0 * spg + eps) / (sp + sg + eps);
}

template <typename T>
void dice_backward_span(const T* pred, const T* gt, int64_t n, double eps,
                        double scale, T* dpred) {
  double sp = 0.0, sg = 0.0, spg = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    sp += static_cast<double>(pred[i]);
    sg += static_cast<double>(gt[i]);
    spg += static_cast<double>(pred[i]) * static_cast<double>(gt[i]);
  }
  const double denom = sp + sg + eps;
  const double num = 2.0 * spg + eps;
  const double inv2 = scale / (denom * denom);
  for (int64_t i = 0; i < n; ++i)
    dpred[i] = static_cast<T>((num - 2.0 * static_cast<double>(gt[i]) * denom) *
                              inv2);
}

}  // namespace docmask::nn
