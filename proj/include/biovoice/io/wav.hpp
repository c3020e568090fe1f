#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "biovoice/core/error.hpp"

namespace biovoice {

// Mono audio, samples in [-1, 1].
struct AudioClip {
    int sample_rate_hz = 0;
    std::vector<double> samples;

    double duration() const {
        return static_cast<double>(samples.size()) / sample_rate_hz;
    }
};

namespace detail {

inline std::uint32_t read_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16le(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline bool looks_compressed(const unsigned char* p, std::size_t n) {
    if (n >= 3 && p[0] == 'I' && p[1] == 'D' && p[2] == '3') return true;          // MP3 ID3 tag
    if (n >= 2 && p[0] == 0xFF && (p[1] & 0xE0) == 0xE0) return true;               // MPEG sync
    if (n >= 4 && std::memcmp(p, "OggS", 4) == 0) return true;                      // Ogg
    if (n >= 4 && std::memcmp(p, "fLaC", 4) == 0) return true;                      // FLAC
    return false;
}

}  // namespace detail

// Parse a RIFF/WAVE container. PCM integer widths 8/16/24/32 and IEEE float
// 32/64 are accepted; multi-channel input is downmixed by per-frame mean;
// integer samples are scaled to [-1, 1] by the type's max magnitude.
inline AudioClip load_wav(const std::vector<unsigned char>& bytes) {
    const unsigned char* p = bytes.data();
    std::size_t n = bytes.size();
    if (detail::looks_compressed(p, n))
        throw UnsupportedEncoding("compressed audio codec; expected RIFF/WAVE PCM");
    if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
        throw CorruptContainer("not a RIFF/WAVE container");

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    std::uint32_t data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= n) {
        const unsigned char* chunk_id = p + pos;
        std::uint32_t chunk_len = detail::read_u32le(p + pos + 4);
        std::size_t body = pos + 8;
        if (body + chunk_len > n) throw CorruptContainer("chunk overruns file");
        if (std::memcmp(chunk_id, "fmt ", 4) == 0) {
            if (chunk_len < 16) throw CorruptContainer("fmt chunk too short");
            format = detail::read_u16le(p + body);
            channels = detail::read_u16le(p + body + 2);
            rate = detail::read_u32le(p + body + 4);
            bits = detail::read_u16le(p + body + 14);
            if (format == 0xFFFE) {  // WAVE_FORMAT_EXTENSIBLE: real format in the GUID
                if (chunk_len < 26) throw CorruptContainer("extensible fmt chunk too short");
                format = detail::read_u16le(p + body + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(chunk_id, "data", 4) == 0) {
            data = p + body;
            data_len = chunk_len;
        }
        pos = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
    }
    if (!have_fmt || data == nullptr) throw CorruptContainer("missing fmt or data chunk");
    if (channels == 0 || rate == 0) throw CorruptContainer("invalid channel count or rate");
    if (format != 1 && format != 3)
        throw UnsupportedEncoding("audio format tag " + std::to_string(format) +
                                  "; only PCM (1) and IEEE float (3) supported");

    std::size_t bytes_per_sample = bits / 8;
    if (format == 1 && bits != 8 && bits != 16 && bits != 24 && bits != 32)
        throw UnsupportedEncoding("PCM bit depth " + std::to_string(bits));
    if (format == 3 && bits != 32 && bits != 64)
        throw UnsupportedEncoding("float bit depth " + std::to_string(bits));
    if (bytes_per_sample == 0 || data_len % (bytes_per_sample * channels) != 0)
        throw CorruptContainer("data chunk not a whole number of frames");

    std::size_t frames = data_len / (bytes_per_sample * channels);
    AudioClip clip;
    clip.sample_rate_hz = static_cast<int>(rate);
    clip.samples.resize(frames);

    auto decode = [&](const unsigned char* q) -> double {
        switch (format == 3 ? (bits == 32 ? 132 : 164) : bits) {
            case 8:   // unsigned
                return (static_cast<int>(*q) - 128) / 128.0;
            case 16: {
                std::int16_t v;
                std::memcpy(&v, q, 2);
                return v / 32768.0;
            }
            case 24: {
                std::uint32_t u = static_cast<std::uint32_t>(q[0]) |
                                  (static_cast<std::uint32_t>(q[1]) << 8) |
                                  (static_cast<std::uint32_t>(q[2]) << 16);
                if (u & 0x800000u) u |= 0xFF000000u;  // sign-extend
                std::int32_t v;
                std::memcpy(&v, &u, 4);
                return v / 8388608.0;
            }
            case 32: {
                std::int32_t v;
                std::memcpy(&v, q, 4);
                return v / 2147483648.0;
            }
            case 132: {
                float v;
                std::memcpy(&v, q, 4);
                return v;
            }
            default: {
                double v;
                std::memcpy(&v, q, 8);
                return v;
            }
        }
    };

    for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (std::uint16_t c = 0; c < channels; ++c)
            acc += decode(data + (f * channels + c) * bytes_per_sample);
        double v = acc / channels;
        if (!std::isfinite(v)) throw CorruptContainer("non-finite sample in data chunk");
        clip.samples[f] = std::clamp(v, -1.0, 1.0);
    }
    return clip;
}

inline AudioClip load_wav_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorruptContainer("cannot open: " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return load_wav(bytes);
}

// Serialize mono [-1, 1] samples as 16-bit PCM.
inline std::vector<unsigned char> encode_wav_int16(int rate, const std::vector<double>& samples) {
    std::uint32_t data_len = static_cast<std::uint32_t>(samples.size() * 2);
    std::vector<unsigned char> out;
    out.reserve(44 + data_len);
    auto put_u32 = [&](std::uint32_t v) {
        out.push_back(v & 0xFF);
        out.push_back((v >> 8) & 0xFF);
        out.push_back((v >> 16) & 0xFF);
        out.push_back((v >> 24) & 0xFF);
    };
    auto put_u16 = [&](std::uint16_t v) {
        out.push_back(v & 0xFF);
        out.push_back((v >> 8) & 0xFF);
    };
    auto put_tag = [&](const char* s) { out.insert(out.end(), s, s + 4); };
    put_tag("RIFF");
    put_u32(36 + data_len);
    put_tag("WAVE");
    put_tag("fmt ");
    put_u32(16);
    put_u16(1);  // PCM
    put_u16(1);  // mono
    put_u32(static_cast<std::uint32_t>(rate));
    put_u32(static_cast<std::uint32_t>(rate * 2));  // byte rate
    put_u16(2);                                      // block align
    put_u16(16);                                     // bits
    put_tag("data");
    put_u32(data_len);
    for (double s : samples) {
        double c = std::clamp(s, -1.0, 1.0);
        auto v = static_cast<std::int16_t>(std::lround(c * 32767.0));
        out.push_back(static_cast<unsigned char>(v & 0xFF));
        out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
    }
    return out;
}

inline void save_wav_int16(const std::filesystem::path& path, int rate,
                           const std::vector<double>& samples) {
    auto bytes = encode_wav_int16(rate, samples);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UnwritablePath("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw UnwritablePath("write failed: " + path.string());
}

}  // namespace biovoice
