#pragma once

#include <cmath>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/mathutil.hpp"
#include "biovoice/ml/scaler.hpp"

namespace biovoice {

// Gaussian class-conditional classifier with variance smoothing: every
// per-class variance gets var_smoothing * max feature variance added.
struct GaussianNB {
    double var_smoothing = 1e-9;
    std::vector<double> log_prior;              // per class
    std::vector<std::vector<double>> mu;        // [class][feature]
    std::vector<std::vector<double>> var;       // [class][feature]

    void fit(const Matrix& X, const std::vector<int>& y) {
        if (X.empty()) throw EmptyMatrix("GaussianNB: empty training matrix");
        const std::size_t d = X[0].size();
        std::size_t count[2] = {0, 0};
        for (int v : y) ++count[v];
        if (count[0] == 0 || count[1] == 0)
            throw SingleClassTraining("GaussianNB: training labels contain one class");
        for (const auto& row : X)
            if (!all_finite(row)) throw NonFiniteFeature("GaussianNB: non-finite feature");

        mu.assign(2, std::vector<double>(d, 0.0));
        var.assign(2, std::vector<double>(d, 0.0));
        log_prior.assign(2, 0.0);
        for (std::size_t i = 0; i < X.size(); ++i)
            for (std::size_t j = 0; j < d; ++j) mu[y[i]][j] += X[i][j];
        for (int c = 0; c < 2; ++c)
            for (std::size_t j = 0; j < d; ++j) mu[c][j] /= static_cast<double>(count[c]);
        for (std::size_t i = 0; i < X.size(); ++i)
            for (std::size_t j = 0; j < d; ++j) {
                double cdev = X[i][j] - mu[y[i]][j];
                var[y[i]][j] += cdev * cdev;
            }
        for (int c = 0; c < 2; ++c)
            for (std::size_t j = 0; j < d; ++j) var[c][j] /= static_cast<double>(count[c]);

        // Smoothing scale: largest overall feature variance.
        double max_var = 0.0;
        std::vector<double> col(X.size());
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t i = 0; i < X.size(); ++i) col[i] = X[i][j];
            max_var = std::max(max_var, pop_var(col));
        }
        double eps = var_smoothing * max_var;
        if (eps <= 0.0) eps = var_smoothing;  // all-constant data still needs a floor
        for (int c = 0; c < 2; ++c)
            for (std::size_t j = 0; j < d; ++j) var[c][j] += eps;

        for (int c = 0; c < 2; ++c)
            log_prior[c] = std::log(static_cast<double>(count[c]) /
                                    static_cast<double>(X.size()));
    }

    int predict_one(const std::vector<double>& x) const {
        double best_score = 0.0;
        int best = 0;
        const double log2pi = 1.8378770664093454835606594728112;
        for (int c = 0; c < 2; ++c) {
            double s = log_prior[c];
            for (std::size_t j = 0; j < x.size(); ++j) {
                double dev = x[j] - mu[c][j];
                s += -0.5 * (log2pi + std::log(var[c][j])) - dev * dev / (2.0 * var[c][j]);
            }
            if (c == 0 || s > best_score) {  // ties keep the first class
                best_score = s;
                best = c;
            }
        }
        return best;
    }

    std::vector<int> predict(const Matrix& X) const {
        std::vector<int> out(X.size());
        for (std::size_t i = 0; i < X.size(); ++i) out[i] = predict_one(X[i]);
        return out;
    }
};

}  // namespace biovoice
