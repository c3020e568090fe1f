#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/mathutil.hpp"
#include "biovoice/cardio/bandpass.hpp"

namespace biovoice {

// Pre-task (calibration-segment) reference statistics.
struct BaselineStats {
    double hr_mean = 0.0;                 // bpm
    double hr_std = 0.0;                  // bpm, population
    double bvp_mean_peak_amplitude = 0.0; // device units
};

struct PulsePeak {
    std::size_t index = 0;
    double amplitude = 0.0;
};

// Strict local maxima with amplitude at or above the 60th percentile of all
// local-maximum values (linear interpolation, tiny slack for ties) and pairwise
// separation >= 0.33 s; conflicts keep the larger amplitude, then the earlier
// index. Result sorted by index.
inline std::vector<PulsePeak> detect_pulse_peaks(const std::vector<double>& filtered_bvp,
                                                 double rate_hz,
                                                 double min_separation_s = 0.33) {
    if (!all_finite(filtered_bvp)) throw NonFiniteSample("detect_pulse_peaks: non-finite input");
    std::vector<std::size_t> cand;
    for (std::size_t i = 1; i + 1 < filtered_bvp.size(); ++i) {
        if (filtered_bvp[i] > filtered_bvp[i - 1] && filtered_bvp[i] > filtered_bvp[i + 1])
            cand.push_back(i);
    }
    if (cand.empty()) return {};
    std::vector<double> values;
    values.reserve(cand.size());
    for (std::size_t i : cand) values.push_back(filtered_bvp[i]);
    double threshold = percentile(values, 60.0);
    // Inclusive threshold with ulp slack so equal-valued maxima are kept together.
    threshold -= 1e-12 * std::max(1.0, std::abs(threshold));

    std::vector<std::size_t> strong;
    for (std::size_t i : cand)
        if (filtered_bvp[i] >= threshold) strong.push_back(i);
    std::sort(strong.begin(), strong.end(), [&](std::size_t a, std::size_t b) {
        if (filtered_bvp[a] != filtered_bvp[b]) return filtered_bvp[a] > filtered_bvp[b];
        return a < b;
    });
    const double min_sep = min_separation_s * rate_hz;
    std::vector<std::size_t> kept;
    for (std::size_t i : strong) {
        bool ok = true;
        for (std::size_t j : kept) {
            double dist = (i > j) ? static_cast<double>(i - j) : static_cast<double>(j - i);
            if (dist < min_sep) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(i);
    }
    std::sort(kept.begin(), kept.end());
    std::vector<PulsePeak> out;
    out.reserve(kept.size());
    for (std::size_t i : kept) out.push_back({i, filtered_bvp[i]});
    return out;
}

// [min, max, sum of task peak amplitudes; mean(task peaks) - baseline mean peak].
// With no task peaks: [0, 0, 0, -baseline mean peak].
inline std::vector<double> bvp_features(const std::vector<PulsePeak>& task_peaks,
                                        const BaselineStats& baseline) {
    if (task_peaks.empty()) return {0.0, 0.0, 0.0, -baseline.bvp_mean_peak_amplitude};
    double pmin = task_peaks[0].amplitude, pmax = task_peaks[0].amplitude, psum = 0.0;
    for (const auto& p : task_peaks) {
        pmin = std::min(pmin, p.amplitude);
        pmax = std::max(pmax, p.amplitude);
        psum += p.amplitude;
    }
    double pmean = psum / static_cast<double>(task_peaks.size());
    return {pmin, pmax, psum, pmean - baseline.bvp_mean_peak_amplitude};
}

// [mean(task HR) - baseline mean; population std(task HR) - baseline std].
inline std::vector<double> hr_features(const std::vector<double>& hr_window,
                                       const BaselineStats& baseline) {
    if (hr_window.empty()) throw EmptyWindow("hr_features: empty heart-rate window");
    if (!all_finite(hr_window)) throw NonFiniteSample("hr_features: non-finite input");
    return {mean(hr_window) - baseline.hr_mean, pop_std(hr_window) - baseline.hr_std};
}

// Baseline statistics from the pre-task segment: HR moments plus the mean
// pulse-peak amplitude of the band-passed BVP.
inline BaselineStats compute_baseline(const std::vector<double>& bvp_segment, double bvp_rate_hz,
                                      const std::vector<double>& hr_segment,
                                      const FilterSpec& spec = {},
                                      double min_separation_s = 0.33) {
    BaselineStats s;
    if (hr_segment.empty()) throw EmptyWindow("compute_baseline: empty heart-rate segment");
    s.hr_mean = mean(hr_segment);
    s.hr_std = pop_std(hr_segment);
    auto filtered = bandpass(bvp_segment, bvp_rate_hz, spec);
    auto peaks = detect_pulse_peaks(filtered, bvp_rate_hz, min_separation_s);
    if (!peaks.empty()) {
        double sum = 0.0;
        for (const auto& p : peaks) sum += p.amplitude;
        s.bvp_mean_peak_amplitude = sum / static_cast<double>(peaks.size());
    }
    return s;
}

}  // namespace biovoice
