#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/rng.hpp"

namespace biovoice {

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Stratified hold-out split: per class, round(ratio * count) rows go to train,
// clamped so both sides keep at least one row of each class. Output index
// lists are sorted, so downstream row order is independent of shuffle order.
inline SplitIndices stratified_split(const std::vector<int>& y, double ratio,
                                     std::uint64_t seed) {
    std::vector<std::size_t> per_class[2];
    for (std::size_t i = 0; i < y.size(); ++i) per_class[y[i]].push_back(i);
    if (per_class[0].size() < 2 || per_class[1].size() < 2)
        throw ClassTooSmall("stratified_split: both classes need at least 2 members");

    Rng rng(seed);
    SplitIndices out;
    for (int c = 0; c < 2; ++c) {
        auto& idx = per_class[c];
        rng.shuffle(idx);
        const double want = ratio * static_cast<double>(idx.size());
        std::size_t n_train = static_cast<std::size_t>(std::llround(want));
        n_train = std::max<std::size_t>(1, std::min(idx.size() - 1, n_train));
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < n_train ? out.train : out.test).push_back(idx[i]);
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

}  // namespace biovoice
