#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/mathutil.hpp"
#include "biovoice/ml/scaler.hpp"

namespace biovoice {

// Population variance over every entry of X; gamma "scale" = 1 / (d * var),
// falling back to 1.0 for a constant matrix.
inline double rbf_gamma_scale(const Matrix& X) {
    if (X.empty() || X[0].empty()) throw EmptyMatrix("rbf_gamma_scale: empty matrix");
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& row : X)
        for (double v : row) {
            s += v;
            ++n;
        }
    const double mu = s / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& row : X)
        for (double v : row) ss += (v - mu) * (v - mu);
    const double var = ss / static_cast<double>(n);
    if (var <= 0.0) return 1.0;
    return 1.0 / (static_cast<double>(X[0].size()) * var);
}

inline double rbf_kernel(const std::vector<double>& a, const std::vector<double>& b,
                         double gamma) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

// Row-major n x n RBF Gram matrix.
inline std::vector<double> rbf_gram(const Matrix& X, double gamma) {
    const std::size_t n = X.size();
    std::vector<double> g(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double k = rbf_kernel(X[i], X[j], gamma);
            g[i * n + j] = k;
            g[j * n + i] = k;
        }
    }
    return g;
}

struct SvmSolution {
    std::vector<double> alpha;  // one per active row, in `rows` order
    double b = 0.0;             // decision(x) = sum alpha_t y_t K(x_t, x) + b
    std::size_t iterations = 0;
    bool converged = false;
};

// SMO over the dual: min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0, with
// Q_ij = y_i y_j K_ij. Working pair = maximal KKT violators; stops when the
// violation gap falls within tol. The iteration cap is a safety valve, not an
// error: the best-so-far multipliers are still usable.
inline SvmSolution smo_solve(const std::vector<double>& gram, std::size_t stride,
                             const std::vector<std::uint32_t>& rows,
                             const std::vector<signed char>& y, double C,
                             double tol = 1e-3, std::size_t max_iter = 0) {
    const std::size_t n = rows.size();
    if (max_iter == 0) max_iter = std::max<std::size_t>(100000, 1000 * n);
    SvmSolution sol;
    sol.alpha.assign(n, 0.0);
    std::vector<double> grad(n, -1.0);  // G_i = (Q a)_i - 1

    auto kij = [&](std::size_t i, std::size_t j) {
        return gram[static_cast<std::size_t>(rows[i]) * stride + rows[j]];
    };

    std::size_t it = 0;
    for (; it < max_iter; ++it) {
        // i = argmax over I_up of -y G; j = argmin over I_low of -y G.
        int i = -1, j = -1;
        double gmax = -1e300, gmin = 1e300;
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -static_cast<double>(y[t]) * grad[t];
            const bool up = (y[t] > 0) ? (sol.alpha[t] < C) : (sol.alpha[t] > 0.0);
            const bool low = (y[t] > 0) ? (sol.alpha[t] > 0.0) : (sol.alpha[t] < C);
            if (up && v > gmax) {
                gmax = v;
                i = static_cast<int>(t);
            }
            if (low && v < gmin) {
                gmin = v;
                j = static_cast<int>(t);
            }
        }
        if (i < 0 || j < 0 || gmax - gmin <= tol) {
            sol.converged = true;
            break;
        }
        const std::size_t ii = static_cast<std::size_t>(i), jj = static_cast<std::size_t>(j);
        double quad = kij(ii, ii) + kij(jj, jj) - 2.0 * kij(ii, jj);
        if (quad <= 0.0) quad = 1e-12;
        const double old_i = sol.alpha[ii], old_j = sol.alpha[jj];

        if (y[ii] != y[jj]) {
            const double delta = (-grad[ii] - grad[jj]) / quad;
            const double diff = sol.alpha[ii] - sol.alpha[jj];
            sol.alpha[ii] += delta;
            sol.alpha[jj] += delta;
            if (diff > 0.0) {
                if (sol.alpha[jj] < 0.0) {
                    sol.alpha[jj] = 0.0;
                    sol.alpha[ii] = diff;
                }
            } else {
                if (sol.alpha[ii] < 0.0) {
                    sol.alpha[ii] = 0.0;
                    sol.alpha[jj] = -diff;
                }
            }
            if (diff > 0.0) {
                if (sol.alpha[ii] > C) {
                    sol.alpha[ii] = C;
                    sol.alpha[jj] = C - diff;
                }
            } else {
                if (sol.alpha[jj] > C) {
                    sol.alpha[jj] = C;
                    sol.alpha[ii] = C + diff;
                }
            }
        } else {
            const double delta = (grad[ii] - grad[jj]) / quad;
            const double sum = sol.alpha[ii] + sol.alpha[jj];
            sol.alpha[ii] -= delta;
            sol.alpha[jj] += delta;
            if (sum > C) {
                if (sol.alpha[ii] > C) {
                    sol.alpha[ii] = C;
                    sol.alpha[jj] = sum - C;
                }
            } else {
                if (sol.alpha[jj] < 0.0) {
                    sol.alpha[jj] = 0.0;
                    sol.alpha[ii] = sum;
                }
            }
            if (sum > C) {
                if (sol.alpha[jj] > C) {
                    sol.alpha[jj] = C;
                    sol.alpha[ii] = sum - C;
                }
            } else {
                if (sol.alpha[ii] < 0.0) {
                    sol.alpha[ii] = 0.0;
                    sol.alpha[jj] = sum;
                }
            }
        }
        const double di = sol.alpha[ii] - old_i, dj = sol.alpha[jj] - old_j;
        if (di == 0.0 && dj == 0.0) break;  // numerical stall on the best pair
        const double yi = static_cast<double>(y[ii]), yjv = static_cast<double>(y[jj]);
        for (std::size_t t = 0; t < n; ++t) {
            const double yt = static_cast<double>(y[t]);
            grad[t] += yt * (yi * kij(ii, t) * di + yjv * kij(jj, t) * dj);
        }
    }
    sol.iterations = it;

    // Intercept: mean of -y*G over free vectors, else midpoint of the KKT
    // bound interval.
    double sum_free = 0.0, ub = 1e300, lb = -1e300;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = static_cast<double>(y[t]) * grad[t];
        if (sol.alpha[t] >= C) {
            if (y[t] < 0)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else if (sol.alpha[t] <= 0.0) {
            if (y[t] > 0)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
    sol.b = -rho;
    return sol;
}

// Soft-margin RBF classifier. gamma <= 0 requests the data-driven "scale"
// value. Keeps the full dual vector so feasibility (0 <= a <= C,
// |sum a_i y_i| small) stays inspectable after training.
struct SvmClassifier {
    double C = 1.0;
    double gamma = 0.0;  // <= 0: use rbf_gamma_scale(X)
    double tol = 1e-3;

    double gamma_used = 0.0;
    Matrix support_vectors;
    std::vector<double> coef;  // alpha_t * y_t per support vector
    double b = 0.0;
    std::vector<double> dual_alpha;     // all rows, training order
    std::vector<signed char> dual_y;    // all rows, +/-1
    bool converged = false;

    void fit(const Matrix& X, const std::vector<int>& y) {
        if (X.empty()) throw EmptyMatrix("SvmClassifier: empty training matrix");
        std::size_t count[2] = {0, 0};
        for (int v : y) ++count[v];
        if (count[0] == 0 || count[1] == 0)
            throw SingleClassTraining("SvmClassifier: training labels contain one class");
        for (const auto& row : X)
            if (!all_finite(row)) throw NonFiniteFeature("SvmClassifier: non-finite feature");

        gamma_used = gamma > 0.0 ? gamma : rbf_gamma_scale(X);
        const std::size_t n = X.size();
        std::vector<double> gram = rbf_gram(X, gamma_used);
        std::vector<std::uint32_t> rows(n);
        for (std::size_t i = 0; i < n; ++i) rows[i] = static_cast<std::uint32_t>(i);
        std::vector<signed char> ypm(n);
        for (std::size_t i = 0; i < n; ++i) ypm[i] = y[i] == 1 ? 1 : -1;

        SvmSolution sol = smo_solve(gram, n, rows, ypm, C, tol);
        b = sol.b;
        converged = sol.converged;
        dual_alpha = sol.alpha;
        dual_y = ypm;
        support_vectors.clear();
        coef.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (sol.alpha[i] > 0.0) {
                support_vectors.push_back(X[i]);
                coef.push_back(sol.alpha[i] * static_cast<double>(ypm[i]));
            }
        }
    }

    double decision(const std::vector<double>& x) const {
        double s = b;
        for (std::size_t t = 0; t < support_vectors.size(); ++t)
            s += coef[t] * rbf_kernel(support_vectors[t], x, gamma_used);
        return s;
    }

    int predict_one(const std::vector<double>& x) const { return decision(x) > 0.0 ? 1 : 0; }

    std::vector<int> predict(const Matrix& X) const {
        std::vector<int> out(X.size());
        for (std::size_t i = 0; i < X.size(); ++i) out[i] = predict_one(X[i]);
        return out;
    }
};

}  // namespace biovoice
