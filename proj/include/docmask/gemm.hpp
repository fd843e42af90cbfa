// docmask/gemm.hpp -- small blocked matrix kernels behind the convolution
// layers. Every output element is accumulated by exactly one thread in a
// fixed order, so results are bit-identical for any thread count.
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
#include <cstdint>
#include <cstring>

namespace docmask::detail {

// C[i*ldc+j] += sum_k a(i,k) * B[k*ldb+j] for i<M, j<N, k<K, where
// a(i,k) = trans_a ? A[k*lda+i] : A[i*lda+k].
template <typename T>
void matmul_acc(T* C, int64_t ldc, const T* A, int64_t lda, bool trans_a,
                const T* B, int64_t ldb, int64_t M, int64_t N, int64_t K) {
  constexpr int64_t MR = 4, NR = 32;
  const int64_t mblocks = (M + MR - 1) / MR;
  const int64_t nblocks = (N + NR - 1) / NR;
#pragma omp parallel for collapse(2) schedule(static)
  for (int64_t bi = 0; bi < mblocks; ++bi) {
    for (int64_t bj = 0; bj < nblocks; ++bj) {
      const int64_t i0 = bi * MR, j0 = bj * NR;
      const int64_t mr = std::min(MR, M - i0);
      const int64_t nr = std::min(NR, N - j0);
      if (mr == MR && nr == NR) {
        T acc[MR][NR];
        for (int64_t i = 0; i < MR; ++i)
          std::memcpy(acc[i], &C[(i0 + i) * ldc + j0], NR * sizeof(T));
        for (int64_t k = 0; k < K; ++k) {
          const T* bp = &B[k * ldb + j0];
          for (int64_t i = 0; i < MR; ++i) {
            const T a = trans_a ? A[k * lda + i0 + i] : A[(i0 + i) * lda + k];
#pragma omp simd
            for (int64_t j = 0; j < NR; ++j) acc[i][j] += a * bp[j];
          }
        }
        for (int64_t i = 0; i < MR; ++i)
          std::memcpy(&C[(i0 + i) * ldc + j0], acc[i], NR * sizeof(T));
      } else {
        for (int64_t i = 0; i < mr; ++i) {
          T* cp = &C[(i0 + i) * ldc + j0];
          for (int64_t k = 0; k < K; ++k) {
            const T a = trans_a ? A[k * lda + i0 + i] : A[(i0 + i) * lda + k];
            const T* bp = &B[k * ldb + j0];
            for (int64_t j = 0; j < nr; ++j) cp[j] += a * bp[j];
          }
        }
      }
    }
  }
}

// C[i*ldc+j] += sum_k A[i*lda+k] * B[j*ldb+k]  (B accessed transposed; used
// for weight gradients where both operands are row-major over the long
// reduction axis).
template <typename T>
void matmul_nt_acc(T* C, int64_t ldc, const T* A, int64_t lda, const T* B,
                   int64_t ldb, int64_t M, int64_t N, int64_t K) {
  constexpr int64_t MR = 4, NR = 4;
  const int64_t mblocks = (M + MR - 1) / MR;
  const int64_t nblocks = (N + NR - 1) / NR;
#pragma omp parallel for collapse(2) schedule(static)
  for (int64_t bi = 0; bi < mblocks; ++bi) {
    for (int64_t bj = 0; bj < nblocks; ++bj) {
      const int64_t i0 = bi * MR, j0 = bj * NR;
      const int64_t mr = std::min(MR, M - i0);
      const int64_t nr = std::min(NR, N - j0);
      T acc[MR][NR] = {};
      for (int64_t i = 0; i < mr; ++i) {
        for (int64_t j = 0; j < nr; ++j) {
          const T* ap = &A[(i0 + i) * lda];
          const T* bp = &B[(j0 + j) * ldb];
          T sum = T(0);
#pragma omp simd reduction(+ : sum)
          for (int64_t k = 0; k < K; ++k) sum += ap[k] * bp[k];
          acc[i][j] = sum;
        }
      }
      for (int64_t i = 0; i < mr; ++i)
        for (int64_t j = 0; j < nr; ++j) C[(i0 + i) * ldc + j0 + j] += acc[i][j];
    }
  }
}

}  // namespace docmask::detail
