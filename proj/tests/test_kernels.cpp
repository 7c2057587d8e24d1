#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "trident/kernels/conv.hpp"
#include "trident/kernels/fft.hpp"
#include "trident/kernels/gemm.hpp"
#include "trident/kernels/image.hpp"
#include "trident/reference/kernels.hpp"
#include "trident/rng.hpp"

using namespace trident;

TEST_SUITE_BEGIN("kernels");

TEST_CASE("gemm variants match the serial reference") {
    Rng rng(101);
    for (int trial = 0; trial < 40; ++trial) {
        const int M = rng.uniform_int(1, 70);
        const int N = rng.uniform_int(1, 90);
        const int K = rng.uniform_int(1, 150);
        std::vector<float> a(static_cast<std::size_t>(M) * K);
        std::vector<float> b(static_cast<std::size_t>(K) * N);
        std::vector<float> at(static_cast<std::size_t>(K) * M);
        std::vector<float> bt(static_cast<std::size_t>(N) * K);
        std::vector<float> want(static_cast<std::size_t>(M) * N);
        std::vector<float> got(static_cast<std::size_t>(M) * N);
        for (auto& v : a) v = rng.normal_f();
        for (auto& v : b) v = rng.normal_f();
        for (int i = 0; i < M; ++i)
            for (int k = 0; k < K; ++k) at[static_cast<std::size_t>(k) * M + i] = a[static_cast<std::size_t>(i) * K + k];
        for (int k = 0; k < K; ++k)
            for (int j = 0; j < N; ++j) bt[static_cast<std::size_t>(j) * K + k] = b[static_cast<std::size_t>(k) * N + j];
        reference::matmul(M, N, K, a.data(), b.data(), want.data());

        auto max_err = [&] {
            float e = 0.0f;
            for (std::size_t i = 0; i < want.size(); ++i)
                e = std::max(e, std::fabs(want[i] - got[i]));
            return e;
        };
        kernels::gemm_nn(M, N, K, a.data(), K, b.data(), N, got.data(), N, false);
        CHECK(max_err() < 2e-3f);
        kernels::gemm_tn(M, N, K, at.data(), M, b.data(), N, got.data(), N, false);
        CHECK(max_err() < 2e-3f);
        kernels::gemm_nt(M, N, K, a.data(), K, bt.data(), K, got.data(), N, false);
        CHECK(max_err() < 2e-3f);
    }
}

TEST_CASE("gemm accumulate adds onto the destination") {
    Rng rng(7);
    const int M = 9, N = 17, K = 33;
    std::vector<float> a(M * K), b(K * N), c(M * N, 1.5f), want(M * N);
    for (auto& v : a) v = rng.normal_f();
    for (auto& v : b) v = rng.normal_f();
    reference::matmul(M, N, K, a.data(), b.data(), want.data());
    kernels::gemm_nn(M, N, K, a.data(), K, b.data(), N, c.data(), N, true);
    for (int i = 0; i < M * N; ++i)
        CHECK(c[i] == doctest::Approx(want[i] + 1.5f).epsilon(1e-4));
}

TEST_CASE("im2col + gemm convolution matches the naive oracle") {
    // >= 100 random instances within 1e-4, the stated convolution tolerance.
    Rng rng(11);
    for (int trial = 0; trial < 110; ++trial) {
        kernels::Conv3dGeom g;
        g.in_c = rng.uniform_int(1, 4);
        g.in_t = rng.uniform_int(1, 5);
        g.in_h = rng.uniform_int(4, 14);
        g.in_w = rng.uniform_int(4, 14);
        g.out_c = rng.uniform_int(1, 6);
        g.kt = rng.uniform_int(1, std::min(3, g.in_t));
        g.kh = rng.uniform_int(1, 3);
        g.kw = rng.uniform_int(1, 3);
        g.st = rng.uniform_int(1, 2);
        g.sh = rng.uniform_int(1, 2);
        g.sw = rng.uniform_int(1, 2);
        g.pt = rng.uniform_int(0, g.kt / 2);
        g.ph = rng.uniform_int(0, 1);
        g.pw = rng.uniform_int(0, 1);
        if (g.in_t + 2 * g.pt < g.kt || g.in_h + 2 * g.ph < g.kh ||
            g.in_w + 2 * g.pw < g.kw)
            continue;

        std::vector<float> x(g.in_size()), w(g.cols_rows() * g.out_c),
            bias(g.out_c), want(g.out_size()), got(g.out_size());
        std::vector<float> cols(g.cols_rows() * g.cols_cols());
        for (auto& v : x) v = rng.normal_f();
        for (auto& v : w) v = rng.normal_f();
        for (auto& v : bias) v = rng.normal_f();

        reference::conv3d_naive(g, x.data(), w.data(), bias.data(), want.data());
        kernels::im2col_3d(g, x.data(), cols.data());
        kernels::conv3d_forward_cols(g, w.data(), bias.data(), cols.data(),
                                     got.data());
        for (std::size_t i = 0; i < want.size(); ++i)
            CHECK(std::fabs(want[i] - got[i]) < 1e-4f);
    }
}

TEST_CASE("col2im is the adjoint of im2col") {
    // <im2col(x), c> == <x, col2im(c)> for random pairs.
    Rng rng(23);
    kernels::Conv3dGeom g;
    g.in_c = 3; g.in_t = 4; g.in_h = 9; g.in_w = 8;
    g.out_c = 1; g.kt = 3; g.kh = 3; g.kw = 3;
    g.st = 1; g.sh = 2; g.sw = 1;
    g.pt = 1; g.ph = 1; g.pw = 1;
    const std::size_t nc = g.cols_rows() * g.cols_cols();
    std::vector<float> x(g.in_size()), cols(nc), c(nc), folded(g.in_size());
    for (auto& v : x) v = rng.normal_f();
    for (auto& v : c) v = rng.normal_f();
    kernels::im2col_3d(g, x.data(), cols.data());
    kernels::col2im_3d(g, c.data(), folded.data());
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < nc; ++i) lhs += static_cast<double>(cols[i]) * c[i];
    for (std::size_t i = 0; i < g.in_size(); ++i)
        rhs += static_cast<double>(x[i]) * folded[i];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-4));
}

TEST_CASE("fft matches the naive dft") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 << rng.uniform_int(3, 10);
        std::vector<std::complex<double>> xd(n);
        std::vector<std::complex<float>> xf(n);
        for (int i = 0; i < n; ++i) {
            xd[i] = {rng.normal(), rng.normal()};
            xf[i] = std::complex<float>(xd[i]);
        }
        const auto want = reference::dft_naive(xd);
        kernels::fft_inplace(xf);
        double scale = 0.0;
        for (const auto& v : want) scale = std::max(scale, std::abs(v));
        for (int i = 0; i < n; ++i)
            CHECK(std::abs(std::complex<double>(xf[i]) - want[i]) / scale < 1e-6);
    }
}

TEST_CASE("fft inverse round-trips") {
    Rng rng(37);
    std::vector<std::complex<float>> x(256);
    for (auto& v : x) v = {rng.normal_f(), rng.normal_f()};
    auto y = x;
    kernels::fft_inplace(y);
    kernels::fft_inplace(y, true);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(y[i] - x[i]) < 1e-4f);
}

TEST_CASE("fft rejects non power of two lengths") {
    std::vector<std::complex<float>> x(100);
    CHECK_THROWS(kernels::fft_inplace(x));
}

TEST_CASE("bilinear resize matches the four-tap reference") {
    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const int ih = rng.uniform_int(2, 40), iw = rng.uniform_int(2, 40);
        const int oh = rng.uniform_int(2, 40), ow = rng.uniform_int(2, 40);
        std::vector<float> src(static_cast<std::size_t>(ih) * iw);
        std::vector<float> a(static_cast<std::size_t>(oh) * ow);
        std::vector<float> b(static_cast<std::size_t>(oh) * ow);
        for (auto& v : src) v = rng.normal_f();
        kernels::resize_bilinear(src.data(), ih, iw, a.data(), oh, ow);
        reference::resize_bilinear_naive(src.data(), ih, iw, b.data(), oh, ow);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(std::fabs(a[i] - b[i]) < 1e-5f);
    }
}

TEST_CASE("window functions have the expected form") {
    const auto hann = kernels::hann_window(8);
    CHECK(hann[0] == doctest::Approx(0.0));
    CHECK(hann[4] == doctest::Approx(1.0));
    const auto ham = kernels::hamming_window(8);
    CHECK(ham[0] == doctest::Approx(0.08));
    CHECK(ham[4] == doctest::Approx(1.0));
}

TEST_SUITE_END();
