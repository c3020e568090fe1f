#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/mathutil.hpp"

namespace biovoice {

// Band-pass specification; order is the analog prototype order, so the digital
// filter has 2*order poles.
struct FilterSpec {
    double low_hz = 0.5;
    double high_hz = 4.0;
    int order = 2;
};

// Transfer-function coefficients b (numerator) and a (denominator), a[0] = 1.
struct IirCoeffs {
    std::vector<double> b;
    std::vector<double> a;
};

namespace detail {

inline std::vector<std::complex<double>> poly_from_roots(
    const std::vector<std::complex<double>>& roots) {
    std::vector<std::complex<double>> c{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> nc(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            nc[i] += c[i];
            nc[i + 1] -= c[i] * r;
        }
        c = std::move(nc);
    }
    return c;
}

inline std::complex<double> eval_poly_at(const std::vector<double>& coeffs,
                                         std::complex<double> zinv) {
    // coeffs[0] + coeffs[1] z^-1 + ...
    std::complex<double> acc(0.0, 0.0), zp(1.0, 0.0);
    for (double c : coeffs) {
        acc += c * zp;
        zp *= zinv;
    }
    return acc;
}

}  // namespace detail

// Butterworth band-pass design via the analog prototype, low-pass-to-band-pass
// transform with prewarped edges, and the bilinear transform. Unit gain at the
// geometric-mean center frequency sqrt(low*high).
inline IirCoeffs butter_bandpass(const FilterSpec& spec, double rate_hz) {
    if (spec.order != 2 && spec.order != 4)
        throw RangeViolation("filter order must be 2 or 4, got " + std::to_string(spec.order));
    if (!(spec.low_hz > 0.0) || !(spec.low_hz < spec.high_hz))
        throw RangeViolation("need 0 < low_hz < high_hz");
    if (spec.high_hz >= rate_hz / 2.0)
        throw NyquistViolation("high edge " + fmt_g9(spec.high_hz) + " Hz >= Nyquist " +
                               fmt_g9(rate_hz / 2.0) + " Hz");
    const int N = spec.order;
    const double pi = 3.14159265358979323846264338327950288;
    const double fs2 = 2.0 * rate_hz;

    // Analog prototype poles on the unit circle's left half.
    std::vector<std::complex<double>> proto(N);
    for (int k = 0; k < N; ++k) {
        double theta = pi * (2.0 * k + N + 1.0) / (2.0 * N);
        proto[k] = {std::cos(theta), std::sin(theta)};
    }
    // Prewarp edges, then map each prototype pole to two band-pass poles.
    const double wl = fs2 * std::tan(pi * spec.low_hz / rate_hz);
    const double wh = fs2 * std::tan(pi * spec.high_hz / rate_hz);
    const double bw = wh - wl;
    const double w0sq = wl * wh;
    std::vector<std::complex<double>> s_poles;
    s_poles.reserve(2 * static_cast<std::size_t>(N));
    for (const auto& p : proto) {
        std::complex<double> half = p * (bw / 2.0);
        std::complex<double> disc = std::sqrt(half * half - w0sq);
        s_poles.push_back(half + disc);
        s_poles.push_back(half - disc);
    }
    // Bilinear transform; zeros land at z = +1 (xN) and z = -1 (xN).
    std::vector<std::complex<double>> z_poles;
    z_poles.reserve(s_poles.size());
    for (const auto& s : s_poles) z_poles.push_back((fs2 + s) / (fs2 - s));
    std::vector<std::complex<double>> z_zeros;
    for (int k = 0; k < N; ++k) z_zeros.emplace_back(1.0, 0.0);
    for (int k = 0; k < N; ++k) z_zeros.emplace_back(-1.0, 0.0);

    auto a_c = detail::poly_from_roots(z_poles);
    auto b_c = detail::poly_from_roots(z_zeros);
    IirCoeffs f;
    f.a.reserve(a_c.size());
    f.b.reserve(b_c.size());
    for (const auto& c : a_c) f.a.push_back(c.real());
    for (const auto& c : b_c) f.b.push_back(c.real());

    // Normalize gain to 1 at the center frequency.
    const double f0 = std::sqrt(spec.low_hz * spec.high_hz);
    const double w = 2.0 * pi * f0 / rate_hz;
    std::complex<double> zinv(std::cos(w), -std::sin(w));
    double gain = std::abs(detail::eval_poly_at(f.b, zinv) / detail::eval_poly_at(f.a, zinv));
    for (double& c : f.b) c /= gain;
    return f;
}

namespace detail {

// Direct-form II transposed single-pass filter.
inline std::vector<double> lfilter(const IirCoeffs& f, const std::vector<double>& x,
                                   const std::vector<double>& zi) {
    const std::size_t nf = std::max(f.a.size(), f.b.size());
    std::vector<double> b(f.b), a(f.a);
    b.resize(nf, 0.0);
    a.resize(nf, 0.0);
    std::vector<double> z(zi);
    z.resize(nf - 1, 0.0);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double xv = x[i];
        double yv = b[0] * xv + z[0];
        for (std::size_t k = 0; k + 2 < nf; ++k) z[k] = b[k + 1] * xv + z[k + 1] - a[k + 1] * yv;
        z[nf - 2] = b[nf - 1] * xv - a[nf - 1] * yv;
        y[i] = yv;
    }
    return y;
}

// Steady-state internal state for a unit step input; scaled by the first
// sample before each pass so edges start settled.
inline std::vector<double> lfilter_zi(const IirCoeffs& f) {
    const std::size_t nf = std::max(f.a.size(), f.b.size());
    std::vector<double> b(f.b), a(f.a);
    b.resize(nf, 0.0);
    a.resize(nf, 0.0);
    double bsum = 0.0, asum = 0.0;
    for (double v : b) bsum += v;
    for (double v : a) asum += v;
    const double ys = bsum / asum;
    std::vector<double> zi(nf - 1, 0.0);
    for (std::size_t k = nf - 1; k-- > 0;) {
        double nxt = (k + 1 < nf - 1) ? zi[k + 1] : 0.0;
        zi[k] = b[k + 1] + nxt - a[k + 1] * ys;
    }
    return zi;
}

}  // namespace detail

// Zero-phase filtering: odd-reflection padding at both ends, settled initial
// conditions, forward pass then reversed backward pass.
inline std::vector<double> filtfilt(const IirCoeffs& f, const std::vector<double>& x) {
    const std::size_t nf = std::max(f.a.size(), f.b.size());
    if (x.size() < 2) throw SignalTooShort("filtfilt needs at least 2 samples");
    const std::size_t pad = std::min(3 * (nf - 1), x.size() - 1);

    std::vector<double> ext;
    ext.reserve(x.size() + 2 * pad);
    for (std::size_t k = pad; k >= 1; --k) ext.push_back(2.0 * x[0] - x[k]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t k = 1; k <= pad; ++k) ext.push_back(2.0 * x[x.size() - 1] - x[x.size() - 1 - k]);

    const std::vector<double> zi = detail::lfilter_zi(f);
    auto scale_zi = [&](double x0) {
        std::vector<double> z(zi);
        for (double& v : z) v *= x0;
        return z;
    };
    std::vector<double> y = detail::lfilter(f, ext, scale_zi(ext[0]));
    std::reverse(y.begin(), y.end());
    y = detail::lfilter(f, y, scale_zi(y[0]));
    std::reverse(y.begin(), y.end());
    return std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(pad),
                               y.begin() + static_cast<std::ptrdiff_t>(pad + x.size()));
}

// Zero-phase Butterworth band-pass of a finite signal.
inline std::vector<double> bandpass(const std::vector<double>& signal, double rate_hz,
                                    const FilterSpec& spec) {
    if (!all_finite(signal)) throw NonFiniteSample("bandpass: non-finite input sample");
    if (signal.size() <= static_cast<std::size_t>(3 * spec.order))
        throw SignalTooShort("signal of " + std::to_string(signal.size()) +
                             " samples too short for order " + std::to_string(spec.order));
    return filtfilt(butter_bandpass(spec, rate_hz), signal);
}

}  // namespace biovoice
