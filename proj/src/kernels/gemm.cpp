#include "trident/kernels/gemm.hpp"

#include <algorithm>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define TRIDENT_GEMM_AVX2 1
#endif

namespace trident::kernels {
namespace {

constexpr int MR = 4;    // microkernel rows
constexpr int NR = 16;   // microkernel columns (two 8-float lanes)
constexpr int KC = 256;  // K blocking
constexpr int NC = 512;  // per-thread column chunk

thread_local std::vector<float> tl_a_pack;
thread_local std::vector<float> tl_b_pack;

// Packs an MR-row panel of A in k-major order, zero padded to MR rows.
// trans selects A stored (K x M) instead of (M x K).
void pack_a_panel(const float* A, int lda, bool trans, int row0, int rows,
                  int k0, int kc, float* out) {
    for (int k = 0; k < kc; ++k) {
        for (int r = 0; r < MR; ++r) {
            float v = 0.0f;
            if (r < rows) {
                v = trans ? A[static_cast<std::size_t>(k0 + k) * lda + row0 + r]
                          : A[static_cast<std::size_t>(row0 + r) * lda + k0 + k];
            }
            out[static_cast<std::size_t>(k) * MR + r] = v;
        }
    }
}

// Packs a (kc x nc) block of B into NR-wide column tiles, zero padded.
// trans selects B stored (N x K) instead of (K x N).
void pack_b_block(const float* B, int ldb, bool trans, int k0, int kc, int col0,
                  int nc, float* out) {
    const int tiles = (nc + NR - 1) / NR;
    for (int t = 0; t < tiles; ++t) {
        const int j0 = col0 + t * NR;
        const int w = std::min(NR, col0 + nc - j0);
        float* dst = out + static_cast<std::size_t>(t) * kc * NR;
        if (!trans) {
            for (int k = 0; k < kc; ++k) {
                const float* src = B + static_cast<std::size_t>(k0 + k) * ldb + j0;
                float* d = dst + static_cast<std::size_t>(k) * NR;
                int j = 0;
                for (; j < w; ++j) d[j] = src[j];
                for (; j < NR; ++j) d[j] = 0.0f;
            }
        } else {
            // Source rows are contiguous along k; scatter into the tile.
            for (int j = 0; j < w; ++j) {
                const float* src = B + static_cast<std::size_t>(j0 + j) * ldb + k0;
                for (int k = 0; k < kc; ++k)
                    dst[static_cast<std::size_t>(k) * NR + j] = src[k];
            }
            for (int j = w; j < NR; ++j)
                for (int k = 0; k < kc; ++k)
                    dst[static_cast<std::size_t>(k) * NR + j] = 0.0f;
        }
    }
}

#ifdef TRIDENT_GEMM_AVX2
void micro_kernel(int kc, const float* ap, const float* bp, float* acc) {
    __m256 c00 = _mm256_setzero_ps(), c01 = _mm256_setzero_ps();
    __m256 c10 = _mm256_setzero_ps(), c11 = _mm256_setzero_ps();
    __m256 c20 = _mm256_setzero_ps(), c21 = _mm256_setzero_ps();
    __m256 c30 = _mm256_setzero_ps(), c31 = _mm256_setzero_ps();
    for (int k = 0; k < kc; ++k) {
        const __m256 b0 = _mm256_loadu_ps(bp);
        const __m256 b1 = _mm256_loadu_ps(bp + 8);
        __m256 a = _mm256_broadcast_ss(ap + 0);
        c00 = _mm256_fmadd_ps(a, b0, c00);
        c01 = _mm256_fmadd_ps(a, b1, c01);
        a = _mm256_broadcast_ss(ap + 1);
        c10 = _mm256_fmadd_ps(a, b0, c10);
        c11 = _mm256_fmadd_ps(a, b1, c11);
        a = _mm256_broadcast_ss(ap + 2);
        c20 = _mm256_fmadd_ps(a, b0, c20);
        c21 = _mm256_fmadd_ps(a, b1, c21);
        a = _mm256_broadcast_ss(ap + 3);
        c30 = _mm256_fmadd_ps(a, b0, c30);
        c31 = _mm256_fmadd_ps(a, b1, c31);
        ap += MR;
        bp += NR;
    }
    _mm256_storeu_ps(acc + 0, c00);
    _mm256_storeu_ps(acc + 8, c01);
    _mm256_storeu_ps(acc + 16, c10);
    _mm256_storeu_ps(acc + 24, c11);
    _mm256_storeu_ps(acc + 32, c20);
    _mm256_storeu_ps(acc + 40, c21);
    _mm256_storeu_ps(acc + 48, c30);
    _mm256_storeu_ps(acc + 56, c31);
}
#else
void micro_kernel(int kc, const float* ap, const float* bp, float* acc) {
    float c[MR * NR] = {};
    for (int k = 0; k < kc; ++k) {
        for (int r = 0; r < MR; ++r) {
            const float a = ap[k * MR + r];
            for (int j = 0; j < NR; ++j) c[r * NR + j] += a * bp[k * NR + j];
        }
    }
    std::memcpy(acc, c, sizeof(c));
}
#endif

// One thread's share: rows [row0, row0+mrows) x columns [col0, col0+nc).
void gemm_chunk(int row0, int mrows, int nc, int K, const float* A, int lda,
                bool trans_a, const float* B, int ldb, bool trans_b, float* C,
                int ldc, int col0, bool accumulate) {
    const int n_tiles = (nc + NR - 1) / NR;
    tl_b_pack.resize(static_cast<std::size_t>(n_tiles) * KC * NR);
    tl_a_pack.resize(static_cast<std::size_t>(KC) * MR);
    float acc[MR * NR];

    for (int k0 = 0; k0 < K; k0 += KC) {
        const int kc = std::min(KC, K - k0);
        pack_b_block(B, ldb, trans_b, k0, kc, col0, nc, tl_b_pack.data());
        const bool first = (k0 == 0) && !accumulate;
        for (int i0 = row0; i0 < row0 + mrows; i0 += MR) {
            const int rows = std::min(MR, row0 + mrows - i0);
            pack_a_panel(A, lda, trans_a, i0, rows, k0, kc, tl_a_pack.data());
            for (int t = 0; t < n_tiles; ++t) {
                micro_kernel(kc, tl_a_pack.data(),
                             tl_b_pack.data() + static_cast<std::size_t>(t) * kc * NR,
                             acc);
                const int j0 = col0 + t * NR;
                const int w = std::min(NR, col0 + nc - j0);
                for (int r = 0; r < rows; ++r) {
                    float* dst = C + static_cast<std::size_t>(i0 + r) * ldc + j0;
                    const float* src = acc + r * NR;
                    if (first) {
                        for (int j = 0; j < w; ++j) dst[j] = src[j];
                    } else {
                        for (int j = 0; j < w; ++j) dst[j] += src[j];
                    }
                }
            }
        }
    }
}

void gemm_impl(int M, int N, int K, const float* A, int lda, bool trans_a,
               const float* B, int ldb, bool trans_b, float* C, int ldc,
               bool accumulate) {
    if (M <= 0 || N <= 0) return;
    if (K <= 0) {
        if (!accumulate)
            for (int i = 0; i < M; ++i)
                std::memset(C + static_cast<std::size_t>(i) * ldc, 0,
                            sizeof(float) * N);
        return;
    }
    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    const int n_chunks = (N + NC - 1) / NC;
    if (n_chunks >= threads || M < 2 * MR * threads) {
        // Wide product: threads own disjoint column chunks.
#pragma omp parallel for schedule(static)
        for (int c = 0; c < n_chunks; ++c) {
            const int col0 = c * NC;
            const int nc = std::min(NC, N - col0);
            gemm_chunk(0, M, nc, K, A, lda, trans_a, B, ldb, trans_b, C, ldc,
                       col0, accumulate);
        }
    } else {
        // Narrow product: threads own disjoint row blocks instead. Each
        // repacks the (small) B block, which costs less than idling a core.
        const int rb = ((M + threads - 1) / threads + MR - 1) / MR * MR;
        const int blocks = (M + rb - 1) / rb;
#pragma omp parallel for schedule(static)
        for (int b = 0; b < blocks; ++b) {
            const int row0 = b * rb;
            const int rows = std::min(rb, M - row0);
            gemm_chunk(row0, rows, N, K, A, lda, trans_a, B, ldb, trans_b, C,
                       ldc, 0, accumulate);
        }
    }
}

}  // namespace

void gemm_nn(int M, int N, int K, const float* A, int lda, const float* B,
             int ldb, float* C, int ldc, bool accumulate) {
    gemm_impl(M, N, K, A, lda, false, B, ldb, false, C, ldc, accumulate);
}

void gemm_tn(int M, int N, int K, const float* A, int lda, const float* B,
             int ldb, float* C, int ldc, bool accumulate) {
    gemm_impl(M, N, K, A, lda, true, B, ldb, false, C, ldc, accumulate);
}

void gemm_nt(int M, int N, int K, const float* A, int lda, const float* B,
             int ldb, float* C, int ldc, bool accumulate) {
    gemm_impl(M, N, K, A, lda, false, B, ldb, true, C, ldc, accumulate);
}

}  // namespace trident::kernels
