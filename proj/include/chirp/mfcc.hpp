#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "chirp/dsp.hpp"
#include "chirp/wav.hpp"

namespace chirp {

struct MfccConfig {
    double frame_length_ms = 25.0;
    double hop_length_ms = 10.0;
    std::size_t mel_bands = 40;
    std::size_t coefficients = 20;
    double fmin = 0.0;
    double fmax = 0.0;  // 0 means sample_rate/2
    double pre_emphasis = 0.97;
    double log_floor = 1e-10;

    std::size_t frame_length(int sample_rate) const {
        return static_cast<std::size_t>(std::lround(frame_length_ms * sample_rate / 1000.0));
    }
    std::size_t hop_length(int sample_rate) const {
        return static_cast<std::size_t>(std::lround(hop_length_ms * sample_rate / 1000.0));
    }
    std::size_t fft_size(int sample_rate) const {
        std::size_t n = 1;
        while (n < frame_length(sample_rate)) n <<= 1;
        return n;
    }
    double effective_fmax(int sample_rate) const {
        return fmax > 0.0 ? fmax : sample_rate / 2.0;
    }
    void validate(int sample_rate) const {
        if (coefficients == 0 || coefficients > mel_bands)
            throw std::invalid_argument("MfccConfig: need 0 < coefficients <= mel_bands");
        if (!(fmin < effective_fmax(sample_rate)) ||
            effective_fmax(sample_rate) > sample_rate / 2.0 + 1e-9)
            throw std::invalid_argument("MfccConfig: need fmin < fmax <= sample_rate/2");
        if (pre_emphasis < 0.0 || pre_emphasis >= 1.0)
            throw std::invalid_argument("MfccConfig: pre_emphasis must be in [0,1)");
        if (log_floor <= 0.0) throw std::invalid_argument("MfccConfig: log_floor must be > 0");
    }
};

inline void to_json(nlohmann::json& j, const MfccConfig& c) {
    j = {{"frame_length_ms", c.frame_length_ms}, {"hop_length_ms", c.hop_length_ms},
         {"mel_bands", c.mel_bands},             {"coefficients", c.coefficients},
         {"fmin", c.fmin},                       {"fmax", c.fmax},
         {"pre_emphasis", c.pre_emphasis},       {"log_floor", c.log_floor}};
}
inline void from_json(const nlohmann::json& j, MfccConfig& c) {
    c.frame_length_ms = j.value("frame_length_ms", c.frame_length_ms);
    c.hop_length_ms = j.value("hop_length_ms", c.hop_length_ms);
    c.mel_bands = j.value("mel_bands", c.mel_bands);
    c.coefficients = j.value("coefficients", c.coefficients);
    c.fmin = j.value("fmin", c.fmin);
    c.fmax = j.value("fmax", c.fmax);
    c.pre_emphasis = j.value("pre_emphasis", c.pre_emphasis);
    c.log_floor = j.value("log_floor", c.log_floor);
}

/// D x N matrix of MFCC coefficients, one column per frame.
struct FeatureMatrix {
    Eigen::MatrixXd values;
    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

/// Pre-emphasis then fixed-hop framing; the final partial frame is zero-padded.
inline std::vector<std::vector<double>> frame_signal(const std::vector<double>& samples,
                                                     std::size_t frame_length,
                                                     std::size_t hop_length,
                                                     double pre_emphasis) {
    if (samples.empty()) throw std::invalid_argument("frame_signal: empty signal");
    if (frame_length == 0 || hop_length == 0)
        throw std::invalid_argument("frame_signal: zero frame or hop length");
    std::vector<double> y(samples.size());
    y[0] = samples[0];
    for (std::size_t t = 1; t < samples.size(); ++t)
        y[t] = samples[t] - pre_emphasis * samples[t - 1];

    const std::size_t span = samples.size() > frame_length ? samples.size() - frame_length : 0;
    const std::size_t n_frames = span / hop_length + 1 + (span % hop_length != 0 ? 1 : 0);
    std::vector<std::vector<double>> frames(n_frames, std::vector<double>(frame_length, 0.0));
    for (std::size_t f = 0; f < n_frames; ++f) {
        const std::size_t start = f * hop_length;
        for (std::size_t i = 0; i < frame_length && start + i < y.size(); ++i)
            frames[f][i] = y[start + i];
    }
    return frames;
}

/// Triangular mel filterbank, mel_bands x (fft_size/2 + 1).
inline Eigen::MatrixXd mel_filterbank(const MfccConfig& config, int sample_rate) {
    config.validate(sample_rate);
    const std::size_t fft_size = config.fft_size(sample_rate);
    const std::size_t n_bins = fft_size / 2 + 1;
    const double mel_lo = dsp::hz_to_mel(config.fmin);
    const double mel_hi = dsp::hz_to_mel(config.effective_fmax(sample_rate));

    std::vector<double> centers_hz(config.mel_bands + 2);
    for (std::size_t i = 0; i < centers_hz.size(); ++i)
        centers_hz[i] = dsp::mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                                    static_cast<double>(config.mel_bands + 1));

    Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(config.mel_bands),
                                               static_cast<Eigen::Index>(n_bins));
    const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(fft_size);
    for (std::size_t b = 0; b < config.mel_bands; ++b) {
        const double left = centers_hz[b], center = centers_hz[b + 1], right = centers_hz[b + 2];
        bool any = false;
        for (std::size_t k = 0; k < n_bins; ++k) {
            const double f = k * bin_hz;
            double w = 0.0;
            if (f > left && f < center)
                w = (f - left) / (center - left);
            else if (f >= center && f < right)
                w = (right - f) / (right - center);
            if (w > 0.0) {
                fb(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(k)) = w;
                any = true;
            }
        }
        if (!any)
            throw std::runtime_error("mel_filterbank: band " + std::to_string(b) +
                                     " is empty; too many bands for the fft resolution");
    }
    return fb;
}

/// Framing -> power spectrum -> mel filterbank -> log -> DCT-II, D x N output.
inline FeatureMatrix extract_mfcc(const AudioClip& clip, const MfccConfig& config) {
    config.validate(clip.sample_rate);
    const std::size_t fft_size = config.fft_size(clip.sample_rate);
    const auto frames = frame_signal(clip.samples, config.frame_length(clip.sample_rate),
                                     config.hop_length(clip.sample_rate), config.pre_emphasis);
    const Eigen::MatrixXd fb = mel_filterbank(config, clip.sample_rate);
    const Eigen::MatrixXd dct =
        dsp::dct_matrix(config.coefficients, config.mel_bands);

    FeatureMatrix m;
    m.values.resize(static_cast<Eigen::Index>(config.coefficients),
                    static_cast<Eigen::Index>(frames.size()));
    for (std::size_t f = 0; f < frames.size(); ++f) {
        const std::vector<double> spec = dsp::power_spectrum(frames[f], fft_size);
        Eigen::Map<const Eigen::VectorXd> sv(spec.data(),
                                             static_cast<Eigen::Index>(spec.size()));
        Eigen::VectorXd mel = fb * sv;
        for (Eigen::Index i = 0; i < mel.size(); ++i)
            mel(i) = std::log(std::max(mel(i), config.log_floor));
        m.values.col(static_cast<Eigen::Index>(f)) = dct * mel;
    }
    return m;
}

}  // namespace chirp
