#pragma once

namespace trident::kernels {

// Row-major single-precision matrix products. All variants parallelise over
// disjoint blocks of C, so every output element is written by exactly one
// thread and results are bit-identical for any thread count.

// C (M x N) = A (M x K) * B (K x N), += C when accumulate is set.
void gemm_nn(int M, int N, int K, const float* A, int lda, const float* B,
             int ldb, float* C, int ldc, bool accumulate);

// C (M x N) = A^T * B with A stored (K x M).
void gemm_tn(int M, int N, int K, const float* A, int lda, const float* B,
             int ldb, float* C, int ldc, bool accumulate);

// C (M x N) = A * B^T with B stored (N x K).
void gemm_nt(int M, int N, int K, const float* A, int lda, const float* B,
             int ldb, float* C, int ldc, bool accumulate);

}  // namespace trident::kernels
