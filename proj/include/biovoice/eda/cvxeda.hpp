#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/mathutil.hpp"

namespace biovoice {

// Convex tonic/phasic decomposition parameters.
//   model: y ~ H p + B l + C d,  p >= 0
//   objective: 0.5||y - Hp - Bl - Cd||^2 + alpha*sum(p) + 0.5*gamma*||l||^2
// H is the biexponential impulse response (time constants tau1 fast, tau0 slow)
// as a causal convolution, B holds cubic-spline columns with knot_s-second knot
// spacing, C is an affine drift [ones, ramp].
struct EdaParams {
    double tau0 = 2.0;       // slow time constant, seconds
    double tau1 = 0.7;       // fast time constant, seconds
    double knot_s = 10.0;    // tonic spline knot spacing, seconds
    double alpha = 8e-4;     // L1 weight on the driver
    double gamma = 1e-2;     // L2 weight on spline coefficients
    double kkt_tol = 1e-6;
    int max_iter = 5000;
    double min_peak_uS = 0.01;  // SCR peak amplitude threshold
};

// tonic + phasic + residual == input holds bit-for-bit (residual is the remainder);
// driver >= 0 and phasic >= 0 by construction.
struct EdaDecomposition {
    std::vector<double> tonic;
    std::vector<double> phasic;
    std::vector<double> residual;
    std::vector<double> driver;
    std::vector<double> objective_trace;  // one entry per outer solver iteration
    int iterations = 0;
    double kkt_residual = 0.0;
};

// A strict local maximum of the phasic component.
struct ScrPeak {
    std::size_t index = 0;
    double amplitude = 0.0;  // phasic value at the peak, microsiemens
};

namespace detail {

// Minimal dense matrix, row-major.
struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;
    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// In-place lower Cholesky; throws on loss of positive definiteness.
inline Mat cholesky(const Mat& A) {
    const std::size_t n = A.rows;
    Mat L(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = A.at(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= L.at(i, k) * L.at(j, k);
            if (i == j) {
                if (s <= 0.0)
                    throw SolverNonConvergence("normal-equation matrix lost positive definiteness");
                L.at(i, i) = std::sqrt(s);
            } else {
                L.at(i, j) = s / L.at(j, j);
            }
        }
    }
    return L;
}

inline void chol_solve_inplace(const Mat& L, std::vector<double>& x) {
    const std::size_t n = L.rows;
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) s -= L.at(i, k) * x[k];
        x[i] = s / L.at(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= L.at(k, ii) * x[k];
        x[ii] = s / L.at(ii, ii);
    }
}

// Cubic B-spline bump sampled on the signal grid: conv(triangle, triangle),
// peak-normalized; triangle half-width = knot spacing in samples.
inline std::vector<double> spline_bump(std::size_t dks) {
    std::vector<double> tri;
    for (std::size_t v = 1; v < dks; ++v) tri.push_back(static_cast<double>(v) / dks);
    for (std::size_t v = dks; v >= 1; --v) tri.push_back(static_cast<double>(v) / dks);
    std::vector<double> spl(2 * tri.size() - 1, 0.0);
    for (std::size_t i = 0; i < tri.size(); ++i)
        for (std::size_t j = 0; j < tri.size(); ++j) spl[i + j] += tri[i] * tri[j];
    double mx = *std::max_element(spl.begin(), spl.end());
    for (double& v : spl) v /= mx;
    return spl;
}

}  // namespace detail

// Biexponential impulse response on the sample grid; value 0 at lag 0.
inline std::vector<double> scr_impulse_response(std::size_t n, double rate_hz,
                                                double tau0 = 2.0, double tau1 = 0.7) {
    std::vector<double> h(n);
    const double dt = 1.0 / rate_hz;
    for (std::size_t k = 0; k < n; ++k) {
        double t = static_cast<double>(k) * dt;
        h[k] = std::exp(-t / tau0) - std::exp(-t / tau1);
    }
    return h;
}

// Solve the convex decomposition with a Lawson-Hanson style active-set method
// on the reduced problem (spline and drift coefficients eliminated exactly).
inline EdaDecomposition decompose(const std::vector<double>& y, double rate_hz,
                                  const EdaParams& params = {}) {
    const std::size_t n = y.size();
    if (static_cast<double>(n) < 4.0 * rate_hz)
        throw WindowTooShort("window of " + std::to_string(n) + " samples < 4 s at " +
                             fmt_g9(rate_hz) + " Hz");
    if (!all_finite(y)) throw NonFiniteSample("decompose: non-finite input sample");

    using detail::Mat;
    const std::vector<double> h = scr_impulse_response(n, rate_hz, params.tau0, params.tau1);

    // Spline + drift columns Z = [B | 1 | ramp].
    const std::size_t dks =
        std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(params.knot_s * rate_hz)));
    const std::vector<double> spl = detail::spline_bump(dks);
    const std::size_t half = spl.size() / 2;
    std::vector<std::size_t> knots;
    for (std::size_t kc = 0; kc < n; kc += dks) knots.push_back(kc);
    const std::size_t nB = knots.size();
    const std::size_t nZ = nB + 2;
    Mat Z(n, nZ);
    for (std::size_t ci = 0; ci < nB; ++ci) {
        for (std::size_t s = 0; s < spl.size(); ++s) {
            std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(knots[ci]) -
                                 static_cast<std::ptrdiff_t>(half) + static_cast<std::ptrdiff_t>(s);
            if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(n))
                Z.at(static_cast<std::size_t>(idx), ci) = spl[s];
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        Z.at(k, nB) = 1.0;
        Z.at(k, nB + 1) = static_cast<double>(k + 1) / static_cast<double>(n);
    }

    // G = Z^T Z + gamma on the spline block; factor once.
    Mat G(nZ, nZ);
    for (std::size_t i = 0; i < nZ; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += Z.at(k, i) * Z.at(k, j);
            G.at(i, j) = G.at(j, i) = s;
        }
    for (std::size_t i = 0; i < nB; ++i) G.at(i, i) += params.gamma;
    const Mat Lg = detail::cholesky(G);

    // ZtH[z][j] = sum_{k>=j} Z[k][z] h[k-j].
    Mat ZtH(nZ, n);
    for (std::size_t z = 0; z < nZ; ++z)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = j; k < n; ++k) s += Z.at(k, z) * h[k - j];
            ZtH.at(z, j) = s;
        }

    // H^T H per diagonal: (HtH)[i][i+d] = sum_{m=0}^{n-1-(i+d)} h[m+d] h[m].
    Mat Q(n, n);
    for (std::size_t d = 0; d < n; ++d) {
        double acc = 0.0;
        // Walk the diagonal from its far end (i = n-1-d) toward i = 0,
        // accumulating one product per step.
        for (std::size_t step = 0; step < n - d; ++step) {
            acc += h[step + d] * h[step];
            std::size_t i = n - 1 - d - step;
            Q.at(i, i + d) = acc;
            Q.at(i + d, i) = acc;
        }
    }

    // Q -= ZtH^T G^{-1} ZtH; W = G^{-1} ZtH computed by column solves.
    Mat W(nZ, n);
    {
        std::vector<double> colv(nZ);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t z = 0; z < nZ; ++z) colv[z] = ZtH.at(z, j);
            detail::chol_solve_inplace(Lg, colv);
            for (std::size_t z = 0; z < nZ; ++z) W.at(z, j) = colv[z];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t z = 0; z < nZ; ++z) s += ZtH.at(z, i) * W.at(z, j);
            Q.at(i, j) -= s;
            if (i != j) Q.at(j, i) = Q.at(i, j);
        }
    for (std::size_t i = 0; i < n; ++i) Q.at(i, i) += 1e-12;

    // b = H^T y - ZtH^T G^{-1} Z^T y - alpha.
    std::vector<double> Hty(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = i; k < n; ++k) s += h[k - i] * y[k];
        Hty[i] = s;
    }
    std::vector<double> Zty(nZ, 0.0);
    for (std::size_t z = 0; z < nZ; ++z) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += Z.at(k, z) * y[k];
        Zty[z] = s;
    }
    std::vector<double> gz = Zty;
    detail::chol_solve_inplace(Lg, gz);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t z = 0; z < nZ; ++z) s += ZtH.at(z, i) * gz[z];
        b[i] = Hty[i] - s - params.alpha;
    }

    // Helpers over the current driver.
    auto matvec_Q = [&](const std::vector<double>& p, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            const double* qrow = &Q.a[i * n];
            for (std::size_t j = 0; j < n; ++j) s += qrow[j] * p[j];
            out[i] = s;
        }
    };
    auto conv_h = [&](const std::vector<double>& p) {  // H p
        std::vector<double> out(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            double pj = p[j];
            if (pj == 0.0) continue;
            for (std::size_t k = j; k < n; ++k) out[k] += h[k - j] * pj;
        }
        return out;
    };
    auto tonic_of = [&](const std::vector<double>& r, std::vector<double>* spline_l) {
        std::vector<double> zr(nZ, 0.0);
        for (std::size_t z = 0; z < nZ; ++z) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += Z.at(k, z) * r[k];
            zr[z] = s;
        }
        detail::chol_solve_inplace(Lg, zr);
        if (spline_l) spline_l->assign(zr.begin(), zr.begin() + static_cast<std::ptrdiff_t>(nB));
        std::vector<double> tonic(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            double s = 0.0;
            for (std::size_t z = 0; z < nZ; ++z) s += Z.at(k, z) * zr[z];
            tonic[k] = s;
        }
        return tonic;
    };
    auto full_objective = [&](const std::vector<double>& p) {
        std::vector<double> hp = conv_h(p);
        std::vector<double> r(n);
        for (std::size_t k = 0; k < n; ++k) r[k] = y[k] - hp[k];
        std::vector<double> l;
        std::vector<double> tonic = tonic_of(r, &l);
        double obj = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double res = r[k] - tonic[k];
            obj += 0.5 * res * res;
        }
        for (std::size_t k = 0; k < n; ++k) obj += params.alpha * p[k];
        for (double lv : l) obj += 0.5 * params.gamma * lv * lv;
        return obj;
    };

    // Lawson-Hanson NNLS on: minimize 0.5 p^T Q p - b^T p, p >= 0.
    std::vector<double> p(n, 0.0), g(n, 0.0);
    std::vector<char> passive(n, 0);
    std::vector<std::size_t> support;
    EdaDecomposition dec;
    dec.objective_trace.push_back(full_objective(p));

    int outer = 0;
    double kkt = 0.0;
    while (outer < params.max_iter) {
        ++outer;
        matvec_Q(p, g);
        for (std::size_t i = 0; i < n; ++i) g[i] -= b[i];
        // Most-violating free coordinate: largest w = -g.
        std::ptrdiff_t jbest = -1;
        double wbest = params.kkt_tol;
        for (std::size_t i = 0; i < n; ++i) {
            if (!passive[i] && -g[i] > wbest) {
                wbest = -g[i];
                jbest = static_cast<std::ptrdiff_t>(i);
            }
        }
        if (jbest < 0) {
            --outer;  // no iteration performed
            break;
        }
        passive[static_cast<std::size_t>(jbest)] = 1;

        int inner_guard = 0;
        for (;;) {
            if (++inner_guard > static_cast<int>(3 * n + 10))
                throw SolverNonConvergence("active-set inner loop failed to terminate");
            support.clear();
            for (std::size_t i = 0; i < n; ++i)
                if (passive[i]) support.push_back(i);
            const std::size_t m = support.size();
            Mat Qp(m, m);
            std::vector<double> s(m);
            for (std::size_t a = 0; a < m; ++a) {
                for (std::size_t c = 0; c <= a; ++c)
                    Qp.at(a, c) = Qp.at(c, a) = Q.at(support[a], support[c]);
                s[a] = b[support[a]];
            }
            detail::chol_solve_inplace(detail::cholesky(Qp), s);
            bool all_pos = true;
            for (double v : s)
                if (v <= 0.0) {
                    all_pos = false;
                    break;
                }
            if (all_pos) {
                std::fill(p.begin(), p.end(), 0.0);
                for (std::size_t a = 0; a < m; ++a) p[support[a]] = s[a];
                break;
            }
            // Step toward s until the first coordinate hits zero.
            double step = 1.0;
            for (std::size_t a = 0; a < m; ++a) {
                if (s[a] <= 0.0) {
                    double pi = p[support[a]];
                    double t = pi / (pi - s[a]);
                    step = std::min(step, t);
                }
            }
            for (std::size_t a = 0; a < m; ++a) {
                std::size_t i = support[a];
                p[i] += step * (s[a] - p[i]);
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (passive[i] && p[i] <= 1e-14) {
                    passive[i] = 0;
                    p[i] = 0.0;
                }
            }
        }
        dec.objective_trace.push_back(full_objective(p));
    }

    // KKT residual: |g| on the support, max(-g, 0) off it.
    matvec_Q(p, g);
    for (std::size_t i = 0; i < n; ++i) g[i] -= b[i];
    for (std::size_t i = 0; i < n; ++i) {
        double v = passive[i] ? std::abs(g[i]) : std::max(-g[i], 0.0);
        kkt = std::max(kkt, v);
    }
    if (outer >= params.max_iter && kkt > params.kkt_tol)
        throw SolverNonConvergence("iteration cap " + std::to_string(params.max_iter) +
                                   " hit with KKT residual " + fmt_g9(kkt));

    dec.iterations = outer;
    dec.kkt_residual = kkt;
    dec.driver = p;
    dec.phasic = conv_h(p);
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = y[k] - dec.phasic[k];
    dec.tonic = tonic_of(r, nullptr);
    dec.residual.resize(n);
    for (std::size_t k = 0; k < n; ++k) dec.residual[k] = y[k] - dec.tonic[k] - dec.phasic[k];
    return dec;
}

// Strict local maxima of the phasic component with amplitude >= min_amplitude
// and pairwise separation >= 1 s; conflicts keep the larger amplitude, then the
// earlier index. Result sorted by index.
inline std::vector<ScrPeak> detect_scr_peaks(const std::vector<double>& phasic, double rate_hz,
                                             double min_amplitude = 0.01) {
    if (!all_finite(phasic)) throw NonFiniteSample("detect_scr_peaks: non-finite input");
    std::vector<std::size_t> cand;
    for (std::size_t i = 1; i + 1 < phasic.size(); ++i) {
        if (phasic[i] > phasic[i - 1] && phasic[i] > phasic[i + 1] &&
            phasic[i] >= min_amplitude)
            cand.push_back(i);
    }
    std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
        if (phasic[a] != phasic[b]) return phasic[a] > phasic[b];
        return a < b;
    });
    const double min_sep = rate_hz;  // 1 s in samples
    std::vector<std::size_t> kept;
    for (std::size_t i : cand) {
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
    std::vector<ScrPeak> out;
    out.reserve(kept.size());
    for (std::size_t i : kept) out.push_back({i, phasic[i]});
    return out;
}

// Six-element summary: [mean tonic, phasic area (sample sum x dt, uS*s),
// min, max, mean, sum of peak amplitudes]; the four peak statistics are 0
// when no peaks were detected.
inline std::vector<double> eda_features(const EdaDecomposition& dec,
                                        const std::vector<ScrPeak>& peaks, double rate_hz) {
    const double dt = 1.0 / rate_hz;
    double auc = 0.0;
    for (double v : dec.phasic) auc += v * dt;
    double pmin = 0.0, pmax = 0.0, pmean = 0.0, psum = 0.0;
    if (!peaks.empty()) {
        pmin = peaks[0].amplitude;
        pmax = peaks[0].amplitude;
        for (const auto& pk : peaks) {
            pmin = std::min(pmin, pk.amplitude);
            pmax = std::max(pmax, pk.amplitude);
            psum += pk.amplitude;
        }
        pmean = psum / static_cast<double>(peaks.size());
    }
    return {mean(dec.tonic), auc, pmin, pmax, pmean, psum};
}

}  // namespace biovoice
