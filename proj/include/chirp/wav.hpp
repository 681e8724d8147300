#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace chirp {

struct AudioClip {
    std::string id;
    std::vector<double> samples;  // amplitudes in [-1, 1]
    int sample_rate = 0;
    std::string label;
};

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace detail

/// Decode a RIFF/WAVE file with uncompressed 8- or 16-bit PCM, 1 or 2 channels.
/// 16-bit samples scale by 1/32768; 8-bit are unsigned, shifted by -128 then
/// scaled by 1/128. Stereo is downmixed by per-sample channel average.
inline AudioClip load_wav(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_wav: cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw std::runtime_error("load_wav: not a RIFF/WAVE file: " + path.string());

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t sample_rate = 0;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    std::uint32_t data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* cid = reinterpret_cast<const char*>(bytes.data() + pos);
        std::uint32_t clen = detail::read_u32(bytes.data() + pos + 4);
        pos += 8;
        if (std::memcmp(cid, "fmt ", 4) == 0) {
            if (clen < 16 || pos + 16 > bytes.size())
                throw std::runtime_error("load_wav: truncated fmt chunk");
            format = detail::read_u16(bytes.data() + pos);
            channels = detail::read_u16(bytes.data() + pos + 2);
            sample_rate = detail::read_u32(bytes.data() + pos + 4);
            bits = detail::read_u16(bytes.data() + pos + 14);
            have_fmt = true;
        } else if (std::memcmp(cid, "data", 4) == 0) {
            if (pos + clen > bytes.size())
                throw std::runtime_error("load_wav: truncated data chunk in " + path.string());
            data = bytes.data() + pos;
            data_len = clen;
        }
        pos += clen + (clen & 1);  // chunks are word-aligned
    }
    if (!have_fmt || data == nullptr)
        throw std::runtime_error("load_wav: missing fmt or data chunk: " + path.string());
    if (format != 1)
        throw std::runtime_error("load_wav: unsupported format code " + std::to_string(format) +
                                 " (only PCM) in " + path.string());
    if (bits != 8 && bits != 16)
        throw std::runtime_error("load_wav: unsupported bit depth " + std::to_string(bits));
    if (channels != 1 && channels != 2)
        throw std::runtime_error("load_wav: unsupported channel count " +
                                 std::to_string(channels));
    if (sample_rate == 0) throw std::runtime_error("load_wav: zero sample rate");

    const std::size_t bytes_per = bits / 8;
    const std::size_t frame_bytes = bytes_per * channels;
    const std::size_t n_frames = data_len / frame_bytes;

    AudioClip clip;
    clip.id = path.stem().string();
    clip.sample_rate = static_cast<int>(sample_rate);
    clip.samples.reserve(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
        double acc = 0.0;
        for (std::size_t ch = 0; ch < channels; ++ch) {
            const unsigned char* p = data + i * frame_bytes + ch * bytes_per;
            if (bits == 16) {
                std::int16_t v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
                acc += static_cast<double>(v) / 32768.0;
            } else {
                acc += (static_cast<double>(p[0]) - 128.0) / 128.0;
            }
        }
        clip.samples.push_back(acc / channels);
    }
    if (clip.samples.empty())
        throw std::runtime_error("load_wav: no audio samples in " + path.string());
    return clip;
}

}  // namespace chirp
