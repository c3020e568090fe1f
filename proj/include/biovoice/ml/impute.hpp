#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/mathutil.hpp"
#include "biovoice/ml/scaler.hpp"

namespace biovoice {

// Fills missing voice features from the k nearest complete vectors, with
// distances computed on the always-present leading `bio_dim` features.
// Fit on training rows only; the donor pool never includes test rows.
struct KnnImputer {
    std::size_t bio_dim = 0;
    std::size_t k = 5;
    Matrix donors;  // complete training rows (full dimension)

    static KnnImputer fit(const Matrix& train_X, const std::vector<char>& voice_missing,
                          std::size_t bio_dim, std::size_t k = 5) {
        KnnImputer imp;
        imp.bio_dim = bio_dim;
        imp.k = k;
        for (std::size_t i = 0; i < train_X.size(); ++i)
            if (!voice_missing[i]) imp.donors.push_back(train_X[i]);
        if (imp.donors.empty())
            throw NoCompleteVectors("imputer: no training vectors with complete voice features");
        return imp;
    }

    // Returns the row with voice features replaced by the mean over the k
    // nearest donors (distance ties broken by donor order).
    std::vector<double> impute_row(const std::vector<double>& row) const {
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(donors.size());
        for (std::size_t i = 0; i < donors.size(); ++i) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < bio_dim; ++j) {
                double diff = row[j] - donors[i][j];
                d2 += diff * diff;
            }
            dist.emplace_back(d2, i);
        }
        std::sort(dist.begin(), dist.end());
        const std::size_t kk = std::min(k, donors.size());
        std::vector<double> out = row;
        const std::size_t full = donors[0].size();
        for (std::size_t j = bio_dim; j < full; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < kk; ++t) acc += donors[dist[t].second][j];
            out[j] = acc / static_cast<double>(kk);
        }
        return out;
    }

    std::uint64_t fingerprint() const {
        std::uint64_t h = fnv1a64(&bio_dim, sizeof(bio_dim));
        h = fnv1a64(&k, sizeof(k), h);
        for (const auto& row : donors) h = fnv1a64(row, h);
        return h;
    }
};

}  // namespace biovoice
