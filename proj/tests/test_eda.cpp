#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "biovoice/core/mathutil.hpp"
#include "biovoice/eda/cvxeda.hpp"

using namespace biovoice;

namespace {

// 90 s at 4 Hz: slowly rising tonic plus three SCR pulses.
struct ThreePulse {
    std::vector<double> y;
    std::vector<double> pulse_times = {15.0, 40.0, 65.0};
    std::vector<double> pulse_amps = {0.5, 0.4, 0.45};
    double rate = 4.0;
};

ThreePulse make_three_pulse() {
    ThreePulse tp;
    const std::size_t n = 360;
    const auto h = scr_impulse_response(n, tp.rate);
    tp.y.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        tp.y[k] = 2.0 + 0.1 * static_cast<double>(k) / static_cast<double>(n - 1);
    for (std::size_t p = 0; p < tp.pulse_times.size(); ++p) {
        const std::size_t idx = static_cast<std::size_t>(tp.pulse_times[p] * tp.rate);
        for (std::size_t k = idx; k < n; ++k) tp.y[k] += tp.pulse_amps[p] * h[k - idx];
    }
    return tp;
}

}  // namespace

TEST_CASE("three-pulse decomposition recovers the pulses") {
    ThreePulse tp = make_three_pulse();
    EdaDecomposition dec = decompose(tp.y, tp.rate);

    REQUIRE(dec.kkt_residual <= EdaParams{}.kkt_tol);
    REQUIRE(dec.iterations >= 1);
    REQUIRE(dec.objective_trace.size() == static_cast<std::size_t>(dec.iterations) + 1);
    for (std::size_t i = 1; i < dec.objective_trace.size(); ++i)
        REQUIRE(dec.objective_trace[i] <= dec.objective_trace[i - 1] + 1e-9);

    for (double v : dec.driver) REQUIRE(v >= -1e-6);
    for (double v : dec.phasic) REQUIRE(v >= -1e-6);

    // the three components reassemble the input
    for (std::size_t k = 0; k < tp.y.size(); ++k)
        REQUIRE(dec.tonic[k] + dec.phasic[k] + dec.residual[k] ==
                Catch::Approx(tp.y[k]).margin(1e-9));

    // tight fit: residual RMS within 5% of the input spread
    double rss = 0.0;
    for (double v : dec.residual) rss += v * v;
    const double rmse = std::sqrt(rss / static_cast<double>(dec.residual.size()));
    REQUIRE(rmse <= 0.05 * pop_std(tp.y));

    auto peaks = detect_scr_peaks(dec.phasic, tp.rate);
    REQUIRE(peaks.size() == 3);
    // the biexponential response peaks ~1.1 s after its onset
    for (std::size_t p = 0; p < 3; ++p) {
        const double t_peak = static_cast<double>(peaks[p].index) / tp.rate;
        REQUIRE(t_peak == Catch::Approx(tp.pulse_times[p] + 1.13).margin(2.0));
        REQUIRE(peaks[p].amplitude > 0.05);
    }
}

TEST_CASE("constant input decomposes to pure tonic") {
    std::vector<double> y(240, 2.0);
    EdaDecomposition dec = decompose(y, 4.0);
    for (double v : dec.phasic) REQUIRE(std::abs(v) <= 1e-6);
    for (double v : dec.tonic) REQUIRE(v == Catch::Approx(2.0).margin(1e-3));
}

TEST_CASE("decompose input guards") {
    REQUIRE_THROWS_AS(decompose(std::vector<double>(15, 1.0), 4.0), WindowTooShort);
    std::vector<double> y(64, 1.0);
    y[10] = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(decompose(y, 4.0), NonFiniteSample);
}

TEST_CASE("scr_impulse_response starts at zero and is single-peaked") {
    auto h = scr_impulse_response(64, 4.0);
    REQUIRE(h[0] == Catch::Approx(0.0).margin(1e-15));
    auto it = std::max_element(h.begin(), h.end());
    REQUIRE(*it > 0.0);
    // rises before the peak, decays after
    for (auto p = h.begin() + 1; p < it; ++p) REQUIRE(*p > *(p - 1));
    for (auto p = it + 1; p != h.end(); ++p) REQUIRE(*p < *(p - 1));
}

TEST_CASE("detect_scr_peaks enforces amplitude and separation rules") {
    // two strict maxima 2 samples apart; at 4 Hz they conflict (min sep 4)
    std::vector<double> phasic = {0.0, 0.5, 0.2, 0.8, 0.0};
    auto close_pair = detect_scr_peaks(phasic, 4.0);
    REQUIRE(close_pair.size() == 1);
    REQUIRE(close_pair[0].index == 3);
    REQUIRE(close_pair[0].amplitude == Catch::Approx(0.8));

    // same shape at 1 Hz: separation 2 >= 1 s keeps both, sorted by index
    auto both = detect_scr_peaks(phasic, 1.0);
    REQUIRE(both.size() == 2);
    REQUIRE(both[0].index == 1);
    REQUIRE(both[1].index == 3);

    // below the amplitude floor: dropped
    std::vector<double> faint = {0.0, 0.005, 0.0};
    REQUIRE(detect_scr_peaks(faint, 4.0).empty());
    REQUIRE(detect_scr_peaks(faint, 4.0, 0.001).size() == 1);

    std::vector<double> bad = {0.0, std::numeric_limits<double>::infinity(), 0.0};
    REQUIRE_THROWS_AS(detect_scr_peaks(bad, 4.0), NonFiniteSample);
}

TEST_CASE("eda_features summary layout") {
    EdaDecomposition dec;
    dec.tonic = {1.0, 2.0, 3.0};
    dec.phasic = {0.0, 1.0, 0.0, 2.0};
    std::vector<ScrPeak> peaks = {{1, 1.0}, {3, 2.0}};
    auto f = eda_features(dec, peaks, 4.0);
    REQUIRE(f.size() == 6);
    REQUIRE(f[0] == Catch::Approx(2.0));   // mean tonic
    REQUIRE(f[1] == Catch::Approx(0.75));  // phasic area at dt = 0.25
    REQUIRE(f[2] == Catch::Approx(1.0));   // min peak
    REQUIRE(f[3] == Catch::Approx(2.0));   // max peak
    REQUIRE(f[4] == Catch::Approx(1.5));   // mean peak
    REQUIRE(f[5] == Catch::Approx(3.0));   // peak sum

    auto none = eda_features(dec, {}, 4.0);
    REQUIRE(none[2] == 0.0);
    REQUIRE(none[3] == 0.0);
    REQUIRE(none[4] == 0.0);
    REQUIRE(none[5] == 0.0);
}
