#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace chirp::dsp {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 FFT. Size must be a power of two.
inline void fft(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n))
        throw std::invalid_argument("fft: size must be a power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

inline std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n);
    if (n == 1) {
        w[0] = 1.0;
        return w;
    }
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                    static_cast<double>(n - 1));
    return w;
}

/// One-sided |DFT|^2 of a Hann-windowed, zero-padded frame.
inline std::vector<double> power_spectrum(const std::vector<double>& frame,
                                          std::size_t fft_size) {
    if (frame.size() > fft_size)
        throw std::invalid_argument("power_spectrum: frame longer than fft_size");
    const std::vector<double> w = hann_window(frame.size());
    std::vector<std::complex<double>> buf(fft_size, {0.0, 0.0});
    for (std::size_t i = 0; i < frame.size(); ++i) buf[i] = frame[i] * w[i];
    fft(buf);
    std::vector<double> out(fft_size / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::norm(buf[k]);
    return out;
}

/// Orthonormal DCT-II basis matrix, rows = output coefficients.
inline Eigen::MatrixXd dct_matrix(std::size_t rows, std::size_t n) {
    Eigen::MatrixXd c(rows, n);
    const double s0 = std::sqrt(1.0 / static_cast<double>(n));
    const double s = std::sqrt(2.0 / static_cast<double>(n));
    for (std::size_t k = 0; k < rows; ++k)
        for (std::size_t i = 0; i < n; ++i)
            c(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
                (k == 0 ? s0 : s) *
                std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) *
                         static_cast<double>(k) / static_cast<double>(n));
    return c;
}

/// First `out_len` coefficients of the orthonormal DCT-II.
inline std::vector<double> dct_ii(const std::vector<double>& x, std::size_t out_len) {
    if (out_len > x.size())
        throw std::invalid_argument("dct_ii: requested more coefficients than inputs");
    const Eigen::MatrixXd c = dct_matrix(out_len, x.size());
    Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::VectorXd y = c * v;
    return {y.data(), y.data() + y.size()};
}

inline double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
inline double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

}  // namespace chirp::dsp
