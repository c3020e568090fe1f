#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/rng.hpp"
#include "biovoice/ml/scaler.hpp"

namespace biovoice {

struct SmoteResult {
    Matrix X;                     // originals followed by synthetic rows
    std::vector<int> y;
    std::vector<char> synthetic;  // 1 for generated rows
};

// Oversample the minority class to exact parity with the majority. Each
// synthetic point is x + u * (x_nn - x) with one gap u ~ U(0,1) per point and
// x_nn drawn uniformly from x's k nearest minority neighbours (Euclidean,
// distance ties by index). Base points rotate round-robin through the minority.
// RngLike needs uniform01() and below(n); injectable for exact-value tests.
template <typename RngLike>
inline SmoteResult smote(const Matrix& X, const std::vector<int>& y, std::size_t k,
                         RngLike& rng) {
    if (X.size() != y.size()) throw LengthMismatch("smote: X and y length differ");
    std::size_t count[2] = {0, 0};
    for (int v : y) ++count[v];
    SmoteResult out{X, y, std::vector<char>(X.size(), 0)};
    if (count[0] == count[1]) return out;
    const int minority = count[0] < count[1] ? 0 : 1;
    const std::size_t need = (count[0] < count[1] ? count[1] - count[0] : count[0] - count[1]);
    std::vector<std::size_t> mino;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] == minority) mino.push_back(i);
    if (mino.size() < 2)
        throw MinorityTooSmall("smote: minority class has " + std::to_string(mino.size()) +
                               " samples, needs >= 2");
    const std::size_t k_eff = std::min(k, mino.size() - 1);

    // k nearest minority neighbours per minority sample.
    std::vector<std::vector<std::size_t>> nn(mino.size());
    for (std::size_t a = 0; a < mino.size(); ++a) {
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(mino.size() - 1);
        for (std::size_t b = 0; b < mino.size(); ++b) {
            if (a == b) continue;
            double d2 = 0.0;
            const auto& xa = X[mino[a]];
            const auto& xb = X[mino[b]];
            for (std::size_t j = 0; j < xa.size(); ++j) {
                double diff = xa[j] - xb[j];
                d2 += diff * diff;
            }
            dist.emplace_back(d2, mino[b]);
        }
        std::sort(dist.begin(), dist.end());
        nn[a].reserve(k_eff);
        for (std::size_t t = 0; t < k_eff; ++t) nn[a].push_back(dist[t].second);
    }

    for (std::size_t t = 0; t < need; ++t) {
        std::size_t a = t % mino.size();
        const auto& base = X[mino[a]];
        const auto& other = X[nn[a][rng.below(k_eff)]];
        double u = rng.uniform01();
        std::vector<double> syn(base.size());
        for (std::size_t j = 0; j < base.size(); ++j)
            syn[j] = base[j] + u * (other[j] - base[j]);
        out.X.push_back(std::move(syn));
        out.y.push_back(minority);
        out.synthetic.push_back(1);
    }
    return out;
}

}  // namespace biovoice
