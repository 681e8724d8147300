#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "chirp/wav.hpp"

namespace testutil {

// Independent WAV writer, deliberately separate from the decoder under test.
inline void write_wav(const std::filesystem::path& path,
                      const std::vector<std::vector<std::int16_t>>& channels,
                      std::uint32_t sample_rate) {
    const std::uint16_t n_channels = static_cast<std::uint16_t>(channels.size());
    const std::uint32_t n_frames = static_cast<std::uint32_t>(channels.front().size());
    const std::uint32_t data_len = n_frames * n_channels * 2;
    std::ofstream f(path, std::ios::binary);
    auto u32 = [&](std::uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
    auto u16 = [&](std::uint16_t v) { f.write(reinterpret_cast<const char*>(&v), 2); };
    f.write("RIFF", 4);
    u32(36 + data_len);
    f.write("WAVE", 4);
    f.write("fmt ", 4);
    u32(16);
    u16(1);  // PCM
    u16(n_channels);
    u32(sample_rate);
    u32(sample_rate * n_channels * 2);
    u16(static_cast<std::uint16_t>(n_channels * 2));
    u16(16);
    f.write("data", 4);
    u32(data_len);
    for (std::uint32_t i = 0; i < n_frames; ++i)
        for (std::uint16_t c = 0; c < n_channels; ++c) {
            const std::int16_t v = channels[c][i];
            f.write(reinterpret_cast<const char*>(&v), 2);
        }
}

inline void write_wav_8bit_mono(const std::filesystem::path& path,
                                const std::vector<std::uint8_t>& samples,
                                std::uint32_t sample_rate) {
    const std::uint32_t data_len = static_cast<std::uint32_t>(samples.size());
    std::ofstream f(path, std::ios::binary);
    auto u32 = [&](std::uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
    auto u16 = [&](std::uint16_t v) { f.write(reinterpret_cast<const char*>(&v), 2); };
    f.write("RIFF", 4);
    u32(36 + data_len);
    f.write("WAVE", 4);
    f.write("fmt ", 4);
    u32(16);
    u16(1);
    u16(1);
    u32(sample_rate);
    u32(sample_rate);
    u16(1);
    u16(8);
    f.write("data", 4);
    u32(data_len);
    f.write(reinterpret_cast<const char*>(samples.data()),
            static_cast<std::streamsize>(samples.size()));
}

inline std::vector<std::int16_t> tone_pcm16(double freq_hz, double seconds, int sample_rate,
                                            double amplitude, double noise_amplitude = 0.0,
                                            std::uint64_t seed = 0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const std::size_t n = static_cast<std::size_t>(seconds * sample_rate);
    std::vector<std::int16_t> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        double v = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz *
                                        static_cast<double>(t) / sample_rate);
        if (noise_amplitude > 0.0) v += noise_amplitude * noise(rng);
        v = std::clamp(v, -1.0, 1.0);
        const long q = std::clamp(std::lround(v * 32768.0), -32768l, 32767l);
        out[t] = static_cast<std::int16_t>(q);
    }
    return out;
}

inline chirp::AudioClip tone_clip(const std::string& id, double freq_hz, double seconds,
                                  int sample_rate, double amplitude,
                                  double noise_amplitude = 0.0, std::uint64_t seed = 0) {
    chirp::AudioClip clip;
    clip.id = id;
    clip.sample_rate = sample_rate;
    for (std::int16_t v : tone_pcm16(freq_hz, seconds, sample_rate, amplitude,
                                     noise_amplitude, seed))
        clip.samples.push_back(static_cast<double>(v) / 32768.0);
    return clip;
}

// Brute-force O(n^2) DFT oracle.
inline std::vector<std::complex<double>> dft_oracle(const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * t) /
                               static_cast<double>(n);
            acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

// Double-loop orthonormal DCT-II oracle.
inline std::vector<double> dct_oracle(const std::vector<double>& x, std::size_t out_len) {
    const std::size_t n = x.size();
    std::vector<double> out(out_len, 0.0);
    for (std::size_t k = 0; k < out_len; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += x[i] * std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) *
                                   static_cast<double>(k) / static_cast<double>(n));
        const double scale = k == 0 ? std::sqrt(1.0 / static_cast<double>(n))
                                    : std::sqrt(2.0 / static_cast<double>(n));
        out[k] = scale * acc;
    }
    return out;
}

// Element-by-element rearrangement oracle built only from the index maps:
// element (d, t) of M lands at flat index
// floor(t/N')*D*N' + (t mod N')*D + d, then truncate/pad to max_dim.
inline std::vector<double> rearrange_oracle(const Eigen::MatrixXd& m, std::size_t slice_len,
                                            std::size_t max_dim, double pad_value = 0.0) {
    const std::size_t d = static_cast<std::size_t>(m.rows());
    const std::size_t n = static_cast<std::size_t>(m.cols());
    const std::size_t slices = (n + slice_len - 1) / slice_len;
    std::vector<double> full(slices * d * slice_len, pad_value);
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t di = 0; di < d; ++di)
            full[(t / slice_len) * d * slice_len + (t % slice_len) * d + di] =
                m(static_cast<Eigen::Index>(di), static_cast<Eigen::Index>(t));
    std::vector<double> out(max_dim, pad_value);
    for (std::size_t k = 0; k < max_dim && k < full.size(); ++k) out[k] = full[k];
    return out;
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) {
        path = std::filesystem::temp_directory_path() / ("chirp_test_" + name);
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace testutil
