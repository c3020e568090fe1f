#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/dsp/fft.hpp"

namespace biovoice {

// Short-time analysis configuration. Defaults: 2048-sample frames, hop 512,
// periodic Hann window, 128 mel bands, first 20 cepstral coefficients,
// 12 pitch classes.
struct SpectralConfig {
    std::size_t frame_len = 2048;
    std::size_t hop_len = 512;
    std::size_t n_mels = 128;
    std::size_t n_mfcc = 20;
    std::size_t n_chroma = 12;
    double log_floor = 1e-10;
    bool mel_scalar = false;  // collapse per-band mel means to one scalar
};

// Per-band/coefficient/class means over all frames of a clip.
struct VoiceFeatures {
    std::vector<double> mel_means;     // n_mels (or 1 when mel_scalar)
    std::vector<double> mfcc_means;    // n_mfcc
    std::vector<double> chroma_means;  // 12, in [0,1]

    std::vector<double> flatten() const {
        std::vector<double> v;
        v.reserve(mel_means.size() + mfcc_means.size() + chroma_means.size());
        v.insert(v.end(), mel_means.begin(), mel_means.end());
        v.insert(v.end(), mfcc_means.begin(), mfcc_means.end());
        v.insert(v.end(), chroma_means.begin(), chroma_means.end());
        return v;
    }
};

inline std::size_t voice_feature_dim(const SpectralConfig& cfg) {
    return (cfg.mel_scalar ? 1 : cfg.n_mels) + cfg.n_mfcc + cfg.n_chroma;
}

// Periodic Hann window: 0.5 - 0.5 cos(2 pi k / n).
inline std::vector<double> hann_periodic(std::size_t n) {
    std::vector<double> w(n);
    const double pi = 3.14159265358979323846264338327950288;
    for (std::size_t k = 0; k < n; ++k)
        w[k] = 0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(k) / static_cast<double>(n));
    return w;
}

// Windowed power spectrogram: one row per frame, frame_len/2 + 1 bins.
// Frames that would overrun the clip are zero-padded.
inline std::vector<std::vector<double>> stft_power(const std::vector<double>& samples,
                                                   const SpectralConfig& cfg) {
    if (samples.size() < cfg.frame_len)
        throw ClipTooShort("clip of " + std::to_string(samples.size()) +
                           " samples shorter than one frame (" + std::to_string(cfg.frame_len) +
                           ")");
    const std::size_t n_frames =
        1 + (samples.size() - cfg.frame_len + cfg.hop_len - 1) / cfg.hop_len;
    const std::size_t n_bins = cfg.frame_len / 2 + 1;
    const std::vector<double> window = hann_periodic(cfg.frame_len);

    std::vector<std::vector<double>> power(n_frames, std::vector<double>(n_bins, 0.0));
    std::vector<double> frame(cfg.frame_len);
    for (std::size_t f = 0; f < n_frames; ++f) {
        const std::size_t off = f * cfg.hop_len;
        for (std::size_t k = 0; k < cfg.frame_len; ++k) {
            double s = (off + k < samples.size()) ? samples[off + k] : 0.0;
            frame[k] = s * window[k];
        }
        auto spec = rfft(frame);
        for (std::size_t b = 0; b < n_bins; ++b) power[f][b] = std::norm(spec[b]);
    }
    return power;
}

namespace detail {

// Mel scale with a linear region below 1 kHz and log spacing above.
inline double hz_to_mel(double f) {
    const double f_sp = 200.0 / 3.0;
    const double min_log_hz = 1000.0;
    const double min_log_mel = min_log_hz / f_sp;
    const double logstep = std::log(6.4) / 27.0;
    if (f >= min_log_hz) return min_log_mel + std::log(f / min_log_hz) / logstep;
    return f / f_sp;
}

inline double mel_to_hz(double m) {
    const double f_sp = 200.0 / 3.0;
    const double min_log_hz = 1000.0;
    const double min_log_mel = min_log_hz / f_sp;
    const double logstep = std::log(6.4) / 27.0;
    if (m >= min_log_mel) return min_log_hz * std::exp(logstep * (m - min_log_mel));
    return f_sp * m;
}

}  // namespace detail

// Triangular mel filterbank, area-normalized (weights scaled by
// 2 / (f_hi - f_lo)); covers 0 Hz to rate/2.
struct MelFilterbank {
    std::size_t n_mels = 0;
    std::size_t n_bins = 0;
    std::vector<double> center_hz;                 // n_mels filter centers
    std::vector<std::vector<double>> weights;      // n_mels x n_bins

    static MelFilterbank build(std::size_t n_mels, std::size_t frame_len, double rate_hz) {
        MelFilterbank fb;
        fb.n_mels = n_mels;
        fb.n_bins = frame_len / 2 + 1;
        const double mel_lo = detail::hz_to_mel(0.0);
        const double mel_hi = detail::hz_to_mel(rate_hz / 2.0);
        std::vector<double> hz(n_mels + 2);
        for (std::size_t i = 0; i < n_mels + 2; ++i) {
            double m = mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                    static_cast<double>(n_mels + 1);
            hz[i] = detail::mel_to_hz(m);
        }
        fb.center_hz.assign(hz.begin() + 1, hz.end() - 1);
        fb.weights.assign(n_mels, std::vector<double>(fb.n_bins, 0.0));
        for (std::size_t m = 0; m < n_mels; ++m) {
            const double f_lo = hz[m], f_c = hz[m + 1], f_hi = hz[m + 2];
            const double norm = 2.0 / (f_hi - f_lo);
            for (std::size_t b = 0; b < fb.n_bins; ++b) {
                double f = static_cast<double>(b) * rate_hz / static_cast<double>(frame_len);
                double lower = (f - f_lo) / std::max(f_c - f_lo, 1e-12);
                double upper = (f_hi - f) / std::max(f_hi - f_c, 1e-12);
                double w = std::min(lower, upper);
                if (w > 0.0) fb.weights[m][b] = w * norm;
            }
        }
        return fb;
    }

    std::vector<double> apply(const std::vector<double>& power_frame) const {
        std::vector<double> out(n_mels, 0.0);
        for (std::size_t m = 0; m < n_mels; ++m) {
            const auto& w = weights[m];
            double acc = 0.0;
            for (std::size_t b = 0; b < n_bins; ++b) acc += w[b] * power_frame[b];
            out[m] = acc;
        }
        return out;
    }
};

// Mel power spectrogram: filterbank applied to each power-STFT frame.
inline std::vector<std::vector<double>> mel_spectrogram(
    const std::vector<std::vector<double>>& power_stft, const SpectralConfig& cfg,
    double rate_hz) {
    const std::size_t frame_len = cfg.frame_len;
    MelFilterbank fb = MelFilterbank::build(cfg.n_mels, frame_len, rate_hz);
    std::vector<std::vector<double>> out;
    out.reserve(power_stft.size());
    for (const auto& frame : power_stft) out.push_back(fb.apply(frame));
    return out;
}

// Orthonormal DCT-II matrix, n_out x n_in.
inline std::vector<std::vector<double>> dct2_ortho_matrix(std::size_t n_out, std::size_t n_in) {
    const double pi = 3.14159265358979323846264338327950288;
    std::vector<std::vector<double>> d(n_out, std::vector<double>(n_in));
    for (std::size_t k = 0; k < n_out; ++k) {
        double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n_in));
        for (std::size_t m = 0; m < n_in; ++m)
            d[k][m] = scale * std::cos(pi * static_cast<double>(k) *
                                       (2.0 * static_cast<double>(m) + 1.0) /
                                       (2.0 * static_cast<double>(n_in)));
    }
    return d;
}

// Cepstral coefficients: orthonormal DCT-II of ln(max(mel, log_floor)),
// first n_mfcc coefficients kept.
inline std::vector<std::vector<double>> mfcc(const std::vector<std::vector<double>>& mel_spec,
                                             const SpectralConfig& cfg) {
    const std::size_t n_in = cfg.n_mels;
    const auto dct = dct2_ortho_matrix(cfg.n_mfcc, n_in);
    std::vector<std::vector<double>> out;
    out.reserve(mel_spec.size());
    std::vector<double> logmel(n_in);
    for (const auto& frame : mel_spec) {
        for (std::size_t m = 0; m < n_in; ++m)
            logmel[m] = std::log(std::max(frame[m], cfg.log_floor));
        std::vector<double> c(cfg.n_mfcc, 0.0);
        for (std::size_t k = 0; k < cfg.n_mfcc; ++k) {
            double acc = 0.0;
            for (std::size_t m = 0; m < n_in; ++m) acc += dct[k][m] * logmel[m];
            c[k] = acc;
        }
        out.push_back(std::move(c));
    }
    return out;
}

// Pitch class of a frequency: round(12 log2(f / 440)) + 9 mod 12, so C = 0.
inline int pitch_class(double freq_hz) {
    double semitones = 12.0 * std::log2(freq_hz / 440.0);
    long long pc = (std::llround(semitones) + 9) % 12;
    return static_cast<int>((pc + 12) % 12);
}

// Per-frame pitch-class energies, normalized by the frame's max class energy;
// all-zero frames stay zero. Bin 0 (DC) is excluded.
inline std::vector<std::vector<double>> chromagram(
    const std::vector<std::vector<double>>& power_stft, const SpectralConfig& cfg,
    double rate_hz) {
    const std::size_t frame_len = cfg.frame_len;
    const std::size_t n_bins = frame_len / 2 + 1;
    std::vector<int> bin_class(n_bins, -1);
    for (std::size_t b = 1; b < n_bins; ++b) {
        double f = static_cast<double>(b) * rate_hz / static_cast<double>(frame_len);
        bin_class[b] = pitch_class(f);
    }
    std::vector<std::vector<double>> out;
    out.reserve(power_stft.size());
    for (const auto& frame : power_stft) {
        std::vector<double> c(cfg.n_chroma, 0.0);
        for (std::size_t b = 1; b < n_bins; ++b) c[bin_class[b]] += frame[b];
        double mx = *std::max_element(c.begin(), c.end());
        if (mx > 0.0)
            for (double& v : c) v /= mx;
        out.push_back(std::move(c));
    }
    return out;
}

namespace detail {

inline std::vector<double> column_means(const std::vector<std::vector<double>>& m) {
    if (m.empty()) return {};
    std::vector<double> out(m[0].size(), 0.0);
    for (const auto& row : m)
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += row[j];
    for (double& v : out) v /= static_cast<double>(m.size());
    return out;
}

}  // namespace detail

// Frame-averaged spectral features of a clip.
inline VoiceFeatures voice_features(const std::vector<double>& samples, double rate_hz,
                                    const SpectralConfig& cfg) {
    auto power = stft_power(samples, cfg);
    auto mel = mel_spectrogram(power, cfg, rate_hz);
    auto cep = mfcc(mel, cfg);
    auto chroma = chromagram(power, cfg, rate_hz);
    VoiceFeatures f;
    f.mel_means = detail::column_means(mel);
    if (cfg.mel_scalar) {
        double s = 0.0;
        for (double v : f.mel_means) s += v;
        f.mel_means = {s / static_cast<double>(f.mel_means.size())};
    }
    f.mfcc_means = detail::column_means(cep);
    f.chroma_means = detail::column_means(chroma);
    return f;
}

}  // namespace biovoice
