#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/mathutil.hpp"
#include "biovoice/core/rng.hpp"
#include "biovoice/ml/scaler.hpp"

namespace biovoice {

// Feed-forward binary classifier: ReLU hidden layers, logistic output, mean
// binary cross-entropy, plain mini-batch SGD with a fixed epoch budget.
// Parameters are reachable through a flat index (layer by layer, weights
// row-major then biases) so training gradients can be validated against
// central finite differences.
struct MlpClassifier {
    std::vector<std::size_t> hidden = {32};
    double learning_rate = 0.01;
    std::size_t epochs = 300;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;

    std::vector<std::size_t> dims;         // [d, hidden..., 1]
    std::vector<std::vector<double>> W;    // per layer, row-major (out x in)
    std::vector<std::vector<double>> B;    // per layer, length out

    void init_params(std::size_t d) {
        dims.clear();
        dims.push_back(d);
        for (std::size_t h : hidden) dims.push_back(h);
        dims.push_back(1);
        const std::size_t L = dims.size() - 1;
        W.assign(L, {});
        B.assign(L, {});
        Rng rng(seed);
        for (std::size_t l = 0; l < L; ++l) {
            const std::size_t fan_in = dims[l], fan_out = dims[l + 1];
            const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
            W[l].resize(fan_out * fan_in);
            for (double& w : W[l]) w = (2.0 * rng.uniform01() - 1.0) * limit;
            B[l].assign(fan_out, 0.0);
        }
    }

    std::size_t n_params() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l < W.size(); ++l) n += W[l].size() + B[l].size();
        return n;
    }
    double get_param(std::size_t i) const {
        for (std::size_t l = 0; l < W.size(); ++l) {
            if (i < W[l].size()) return W[l][i];
            i -= W[l].size();
            if (i < B[l].size()) return B[l][i];
            i -= B[l].size();
        }
        throw RangeViolation("MlpClassifier: parameter index out of range");
    }
    void set_param(std::size_t i, double v) {
        for (std::size_t l = 0; l < W.size(); ++l) {
            if (i < W[l].size()) {
                W[l][i] = v;
                return;
            }
            i -= W[l].size();
            if (i < B[l].size()) {
                B[l][i] = v;
                return;
            }
            i -= B[l].size();
        }
        throw RangeViolation("MlpClassifier: parameter index out of range");
    }

    // Output logit for one sample; optionally records post-activation values
    // per layer (acts[0] = input, acts[l+1] = layer l output).
    double forward_logit(const std::vector<double>& x,
                         std::vector<std::vector<double>>* acts = nullptr) const {
        std::vector<double> a = x, z;
        if (acts) {
            acts->clear();
            acts->push_back(a);
        }
        for (std::size_t l = 0; l < W.size(); ++l) {
            const std::size_t out = dims[l + 1], in = dims[l];
            z.assign(out, 0.0);
            for (std::size_t o = 0; o < out; ++o) {
                double s = B[l][o];
                const double* wrow = &W[l][o * in];
                for (std::size_t j = 0; j < in; ++j) s += wrow[j] * a[j];
                z[o] = s;
            }
            if (l + 1 < W.size())
                for (double& v : z) v = v > 0.0 ? v : 0.0;  // ReLU
            a = z;
            if (acts) acts->push_back(a);
        }
        return a[0];
    }

    static double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
    // Stable BCE from the logit: softplus(z) - y*z.
    static double bce_from_logit(double z, int y) {
        const double sp = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
        return sp - static_cast<double>(y) * z;
    }

    // Mean BCE over the batch plus gradient in flat-parameter order.
    double loss_and_grad(const Matrix& X, const std::vector<int>& y,
                         std::vector<double>* grad_out) const {
        const std::size_t L = W.size(), n = X.size();
        std::vector<std::vector<double>> gW(L), gB(L);
        for (std::size_t l = 0; l < L; ++l) {
            gW[l].assign(W[l].size(), 0.0);
            gB[l].assign(B[l].size(), 0.0);
        }
        double loss = 0.0;
        std::vector<std::vector<double>> acts;
        std::vector<double> delta, delta_prev;
        for (std::size_t s = 0; s < n; ++s) {
            const double z = forward_logit(X[s], &acts);
            loss += bce_from_logit(z, y[s]);
            delta.assign(1, sigmoid(z) - static_cast<double>(y[s]));
            for (std::size_t li = L; li-- > 0;) {
                const std::size_t out = dims[li + 1], in = dims[li];
                const auto& a_in = acts[li];
                for (std::size_t o = 0; o < out; ++o) {
                    gB[li][o] += delta[o];
                    double* grow = &gW[li][o * in];
                    for (std::size_t j = 0; j < in; ++j) grow[j] += delta[o] * a_in[j];
                }
                if (li == 0) break;
                delta_prev.assign(in, 0.0);
                for (std::size_t o = 0; o < out; ++o) {
                    const double* wrow = &W[li][o * in];
                    for (std::size_t j = 0; j < in; ++j) delta_prev[j] += wrow[j] * delta[o];
                }
                // ReLU derivative uses the recorded post-activation values.
                for (std::size_t j = 0; j < in; ++j)
                    if (acts[li][j] <= 0.0) delta_prev[j] = 0.0;
                delta = delta_prev;
            }
        }
        const double inv = 1.0 / static_cast<double>(n);
        loss *= inv;
        if (grad_out) {
            grad_out->clear();
            grad_out->reserve(n_params());
            for (std::size_t l = 0; l < L; ++l) {
                for (double g : gW[l]) grad_out->push_back(g * inv);
                for (double g : gB[l]) grad_out->push_back(g * inv);
            }
        }
        return loss;
    }

    void fit(const Matrix& X, const std::vector<int>& y) {
        if (X.empty()) throw EmptyMatrix("MlpClassifier: empty training matrix");
        std::size_t count[2] = {0, 0};
        for (int v : y) ++count[v];
        if (count[0] == 0 || count[1] == 0)
            throw SingleClassTraining("MlpClassifier: training labels contain one class");
        for (const auto& row : X)
            if (!all_finite(row)) throw NonFiniteFeature("MlpClassifier: non-finite feature");

        init_params(X[0].size());
        Rng order_rng(mix_seed(seed, 0x6f72646572ULL));  // epoch shuffling stream
        const std::size_t n = X.size();
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        Matrix bx;
        std::vector<int> by;
        std::vector<double> grad;
        for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
            order_rng.shuffle(idx);
            for (std::size_t start = 0; start < n; start += batch_size) {
                const std::size_t stop = std::min(n, start + batch_size);
                bx.clear();
                by.clear();
                for (std::size_t t = start; t < stop; ++t) {
                    bx.push_back(X[idx[t]]);
                    by.push_back(y[idx[t]]);
                }
                loss_and_grad(bx, by, &grad);
                std::size_t g = 0;
                for (std::size_t l = 0; l < W.size(); ++l) {
                    for (double& w : W[l]) w -= learning_rate * grad[g++];
                    for (double& b : B[l]) b -= learning_rate * grad[g++];
                }
            }
        }
    }

    double predict_proba_one(const std::vector<double>& x) const {
        return sigmoid(forward_logit(x));
    }
    int predict_one(const std::vector<double>& x) const {
        return predict_proba_one(x) >= 0.5 ? 1 : 0;
    }
    std::vector<int> predict(const Matrix& X) const {
        std::vector<int> out(X.size());
        for (std::size_t i = 0; i < X.size(); ++i) out[i] = predict_one(X[i]);
        return out;
    }
};

}  // namespace biovoice
