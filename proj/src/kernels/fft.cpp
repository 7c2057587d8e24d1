#include "trident/kernels/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace trident::kernels {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

namespace {

template <typename T>
void fft_impl(std::complex<T>* x, int n, bool inverse) {
    if (n <= 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft length must be a power of two");

    // Bit-reversal permutation.
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }

    for (int len = 2; len <= n; len <<= 1) {
        const double base = (inverse ? 2.0 : -2.0) * kPi / len;
        for (int i = 0; i < n; i += len) {
            for (int k = 0; k < len / 2; ++k) {
                // direct twiddle evaluation keeps long transforms accurate
                const double ang = base * k;
                const std::complex<T> w(static_cast<T>(std::cos(ang)),
                                        static_cast<T>(std::sin(ang)));
                const std::complex<T> u = x[i + k];
                const std::complex<T> v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
            }
        }
    }

    if (inverse) {
        const T inv = static_cast<T>(1.0 / static_cast<double>(n));
        for (int i = 0; i < n; ++i) x[i] *= inv;
    }
}

}  // namespace

void fft_inplace(std::complex<float>* x, int n, bool inverse) {
    fft_impl(x, n, inverse);
}

void fft_inplace(std::complex<double>* x, int n, bool inverse) {
    fft_impl(x, n, inverse);
}

std::vector<float> hann_window(int n) {
    std::vector<float> w(n);
    for (int i = 0; i < n; ++i)
        w[i] = static_cast<float>(0.5 - 0.5 * std::cos(2.0 * kPi * i / n));
    return w;
}

std::vector<float> hamming_window(int n) {
    std::vector<float> w(n);
    for (int i = 0; i < n; ++i)
        w[i] = static_cast<float>(0.54 - 0.46 * std::cos(2.0 * kPi * i / n));
    return w;
}

}  // namespace trident::kernels
