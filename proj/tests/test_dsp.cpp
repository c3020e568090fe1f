#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "biovoice/core/mathutil.hpp"
#include "biovoice/core/rng.hpp"
#include "biovoice/dsp/fft.hpp"
#include "biovoice/dsp/spectral.hpp"

using namespace biovoice;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// O(n^2) reference DFT, written independently of the transform under test.
std::vector<std::complex<double>> direct_dft(const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = -2.0 * kPi * static_cast<double>(k * t) / static_cast<double>(n);
            acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

std::vector<double> sine(double freq_hz, double rate_hz, std::size_t n, double amp = 0.5) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i)
        s[i] = amp * std::sin(2.0 * kPi * freq_hz * static_cast<double>(i) / rate_hz);
    return s;
}

}  // namespace

TEST_CASE("fft matches the direct DFT for power-of-two and odd lengths") {
    for (std::size_t n : {std::size_t{8}, std::size_t{12}, std::size_t{37}}) {
        Rng rng(100 + n);
        std::vector<std::complex<double>> x(n);
        for (auto& v : x) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        auto want = direct_dft(x);
        auto got = x;
        fft(got);
        for (std::size_t k = 0; k < n; ++k)
            REQUIRE(std::abs(got[k] - want[k]) <= 1e-9);
    }
}

TEST_CASE("inverse fft undoes the forward transform") {
    for (std::size_t n : {std::size_t{16}, std::size_t{15}}) {
        Rng rng(7 + n);
        std::vector<std::complex<double>> x(n);
        for (auto& v : x) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        auto y = x;
        fft(y, false);
        fft(y, true);
        for (std::size_t k = 0; k < n; ++k)
            REQUIRE(std::abs(y[k] - x[k]) <= 1e-9);
    }
}

TEST_CASE("rfft returns the nonnegative-frequency half") {
    std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
    auto half = rfft(x);
    REQUIRE(half.size() == 5);
    std::vector<std::complex<double>> full(x.begin(), x.end());
    fft(full);
    for (std::size_t k = 0; k < half.size(); ++k)
        REQUIRE(std::abs(half[k] - full[k]) <= 1e-12);
    // bin 0 is the plain sum
    REQUIRE(half[0].real() == Catch::Approx(36.0));
    REQUIRE(half[0].imag() == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("periodic hann window endpoints and symmetry") {
    auto w = hann_periodic(8);
    REQUIRE(w[0] == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(w[4] == Catch::Approx(1.0));
    for (std::size_t k = 1; k < 8; ++k)
        REQUIRE(w[k] == Catch::Approx(w[8 - k]).margin(1e-15));
}

TEST_CASE("stft_power frame count and clip-length guard") {
    SpectralConfig cfg;
    REQUIRE_THROWS_AS(stft_power(std::vector<double>(cfg.frame_len - 1, 0.0), cfg), ClipTooShort);
    auto p = stft_power(std::vector<double>(cfg.frame_len, 0.1), cfg);
    REQUIRE(p.size() == 1);
    REQUIRE(p[0].size() == cfg.frame_len / 2 + 1);
    auto p2 = stft_power(std::vector<double>(cfg.frame_len + cfg.hop_len, 0.1), cfg);
    REQUIRE(p2.size() == 2);
}

TEST_CASE("mfcc equals an independently computed orthonormal DCT-II of log-mel") {
    SpectralConfig cfg;
    const double rate = 22050.0;
    auto clip = sine(440.0, rate, 22050);
    auto power = stft_power(clip, cfg);
    auto mel = mel_spectrogram(power, cfg, rate);
    auto cep = mfcc(mel, cfg);
    REQUIRE(cep.size() == mel.size());
    REQUIRE(cep[0].size() == cfg.n_mfcc);

    for (std::size_t f = 0; f < mel.size(); ++f) {
        std::vector<double> logmel(cfg.n_mels);
        for (std::size_t m = 0; m < cfg.n_mels; ++m)
            logmel[m] = std::log(std::max(mel[f][m], cfg.log_floor));
        for (std::size_t k = 0; k < cfg.n_mfcc; ++k) {
            const double scale =
                std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(cfg.n_mels));
            double want = 0.0;
            for (std::size_t m = 0; m < cfg.n_mels; ++m)
                want += logmel[m] * std::cos(kPi * static_cast<double>(k) *
                                             (2.0 * static_cast<double>(m) + 1.0) /
                                             (2.0 * static_cast<double>(cfg.n_mels)));
            want *= scale;
            REQUIRE(std::abs(cep[f][k] - want) <= 1e-9);
        }
    }
}

TEST_CASE("440 Hz sine lands on pitch class A in every frame") {
    SpectralConfig cfg;
    const double rate = 22050.0;
    auto clip = sine(440.0, rate, 22050);
    auto power = stft_power(clip, cfg);
    auto chroma = chromagram(power, cfg, rate);
    REQUIRE(!chroma.empty());
    for (const auto& frame : chroma) {
        const auto it = std::max_element(frame.begin(), frame.end());
        REQUIRE(it - frame.begin() == 9);
        REQUIRE(*it == Catch::Approx(1.0));  // normalized by the frame max
    }
}

TEST_CASE("440 Hz sine peaks in the mel band whose center is nearest 440 Hz") {
    SpectralConfig cfg;
    const double rate = 22050.0;
    auto clip = sine(440.0, rate, 22050);
    auto feats = voice_features(clip, rate, cfg);
    const auto it = std::max_element(feats.mel_means.begin(), feats.mel_means.end());
    const std::size_t argmax = static_cast<std::size_t>(it - feats.mel_means.begin());

    MelFilterbank fb = MelFilterbank::build(cfg.n_mels, cfg.frame_len, rate);
    std::size_t nearest = 0;
    for (std::size_t m = 1; m < fb.center_hz.size(); ++m)
        if (std::abs(fb.center_hz[m] - 440.0) < std::abs(fb.center_hz[nearest] - 440.0))
            nearest = m;
    REQUIRE(argmax == nearest);
    REQUIRE(argmax == 16);
}

TEST_CASE("mel filterbank centers ascend and weights are nonnegative") {
    MelFilterbank fb = MelFilterbank::build(128, 2048, 22050.0);
    REQUIRE(fb.center_hz.size() == 128);
    for (std::size_t m = 1; m < fb.center_hz.size(); ++m)
        REQUIRE(fb.center_hz[m] > fb.center_hz[m - 1]);
    for (const auto& row : fb.weights)
        for (double w : row) REQUIRE(w >= 0.0);
}

TEST_CASE("zero signal yields the log-floor cepstrum") {
    SpectralConfig cfg;
    auto feats = voice_features(std::vector<double>(4096, 0.0), 22050.0, cfg);
    // c0 = sqrt(1/128) * 128 * ln(1e-10) = sqrt(128) * ln(1e-10)
    REQUIRE(feats.mfcc_means[0] == Catch::Approx(-260.5077653624235).margin(1e-6));
    for (std::size_t k = 1; k < feats.mfcc_means.size(); ++k)
        REQUIRE(feats.mfcc_means[k] == Catch::Approx(0.0).margin(1e-9));
    for (double v : feats.chroma_means) REQUIRE(v == Catch::Approx(0.0).margin(1e-12));
    for (double v : feats.mel_means) REQUIRE(v == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("voice feature vector dimensions") {
    SpectralConfig cfg;
    REQUIRE(voice_feature_dim(cfg) == 160);
    auto feats = voice_features(sine(330.0, 22050.0, 8192), 22050.0, cfg);
    REQUIRE(feats.mel_means.size() == 128);
    REQUIRE(feats.mfcc_means.size() == 20);
    REQUIRE(feats.chroma_means.size() == 12);
    REQUIRE(feats.flatten().size() == 160);
    for (double v : feats.chroma_means) {
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
    }

    SpectralConfig scalar = cfg;
    scalar.mel_scalar = true;
    REQUIRE(voice_feature_dim(scalar) == 33);
    auto sf = voice_features(sine(330.0, 22050.0, 8192), 22050.0, scalar);
    REQUIRE(sf.mel_means.size() == 1);
    REQUIRE(sf.flatten().size() == 33);
    REQUIRE(sf.mel_means[0] == Catch::Approx(mean(feats.mel_means)));
}

TEST_CASE("pitch_class follows equal temperament with C = 0") {
    REQUIRE(pitch_class(440.0) == 9);   // A4
    REQUIRE(pitch_class(880.0) == 9);   // A5
    REQUIRE(pitch_class(220.0) == 9);   // A3
    REQUIRE(pitch_class(261.6256) == 0);  // C4
    REQUIRE(pitch_class(493.8833) == 11); // B4
}
