#pragma once

#include <cstddef>
#include <vector>

#include "biovoice/core/error.hpp"

namespace biovoice {

struct Metrics {
    double precision = 0.0;  // macro over the two classes
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
};

// Macro-averaged binary metrics. A class predicted zero times contributes
// precision 0; macro-F1 is the mean of per-class F1 values (not the harmonic
// mean of macro precision/recall).
inline Metrics macro_metrics(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size())
        throw LengthMismatch("macro_metrics: prediction/truth length mismatch");
    std::size_t tp[2] = {0, 0}, fp[2] = {0, 0}, fn[2] = {0, 0}, correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int p = predicted[i], t = truth[i];
        if (p == t) {
            ++tp[t];
            ++correct;
        } else {
            ++fp[p];
            ++fn[t];
        }
    }
    Metrics m;
    for (int c = 0; c < 2; ++c) {
        const double denom_p = static_cast<double>(tp[c] + fp[c]);
        const double denom_r = static_cast<double>(tp[c] + fn[c]);
        const double prec = denom_p > 0.0 ? tp[c] / denom_p : 0.0;
        const double rec = denom_r > 0.0 ? tp[c] / denom_r : 0.0;
        const double f1 = (prec + rec) > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
        m.precision += 0.5 * prec;
        m.recall += 0.5 * rec;
        m.f1 += 0.5 * f1;
    }
    m.accuracy = truth.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(truth.size());
    return m;
}

// Train-majority class (ties go to class 0, the first-listed label) predicted
// for every test item.
inline int majority_class(const std::vector<int>& train_y) {
    std::size_t count[2] = {0, 0};
    for (int v : train_y) ++count[v];
    return count[1] > count[0] ? 1 : 0;
}

inline Metrics majority_baseline(const std::vector<int>& train_y,
                                 const std::vector<int>& test_y) {
    const int maj = majority_class(train_y);
    std::vector<int> pred(test_y.size(), maj);
    return macro_metrics(pred, test_y);
}

}  // namespace biovoice
